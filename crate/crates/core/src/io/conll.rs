//! Ten-column CoNLL-X style word-level corpora.

use std::fmt::Write as _;
use std::path::Path;

use super::{blocks, is_projective_tree, is_rooted_tree, valid_token};
use crate::error::{Error, Result};
use crate::types::{CharSentence, Segmentation, WordTree};

/// A sentence read from a CoNLL file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConllSentence {
    pub sentence: CharSentence,
    pub tree: WordTree,
    /// Whether the word tree is projective.
    pub projective: bool,
    /// Line number of the first row.
    pub line: usize,
}

/// Parses blank-line separated blocks of rows
/// `id form lemma cpos pos feats head deprel _ _`. Lines starting with `#`
/// are comments.
pub fn parse_conll(text: &str) -> Result<Vec<ConllSentence>> {
    let mut out = Vec::new();
    for block in blocks(text) {
        let rows: Vec<_> = block
            .into_iter()
            .filter(|(_, l)| !l.starts_with('#'))
            .collect();
        if rows.is_empty() {
            continue;
        }
        let first = rows[0].0;
        let mut chars = Vec::new();
        let mut lengths = Vec::new();
        let mut heads = vec![0];
        let mut labels = vec![String::new()];
        for (k, &(line, row)) in rows.iter().enumerate() {
            let cols: Vec<&str> = row.split('\t').collect();
            if cols.len() != 10 {
                return Err(Error::parse(
                    line,
                    format!("expected 10 tab-separated columns, found {}", cols.len()),
                ));
            }
            let id: usize = cols[0]
                .parse()
                .map_err(|_| Error::parse(line, format!("non-integer id {:?}", cols[0])))?;
            if id != k + 1 {
                return Err(Error::parse(
                    line,
                    format!("expected id {}, found {}", k + 1, id),
                ));
            }
            let form = cols[1];
            if !valid_token(form) {
                return Err(Error::parse(
                    line,
                    "empty form or form containing whitespace",
                ));
            }
            let head: usize = cols[6]
                .parse()
                .map_err(|_| Error::parse(line, format!("non-integer head {:?}", cols[6])))?;
            if head > rows.len() {
                return Err(Error::parse(
                    line,
                    format!("head {} out of range 0..={}", head, rows.len()),
                ));
            }
            if head == id {
                return Err(Error::parse(line, "word headed by itself"));
            }
            let label = cols[7];
            if !valid_token(label) {
                return Err(Error::parse(line, "empty label"));
            }
            chars.extend(form.chars());
            lengths.push(form.chars().count());
            heads.push(head);
            labels.push(label.to_owned());
        }
        if !is_rooted_tree(&heads) {
            return Err(Error::parse(
                first,
                "heads do not form a single-rooted tree",
            ));
        }
        let segmentation = Segmentation::from_lengths(&lengths)?;
        let projective = is_projective_tree(&heads);
        out.push(ConllSentence {
            sentence: CharSentence::new(chars)?,
            tree: WordTree::new(segmentation, heads, labels)?,
            projective,
            line: first,
        });
    }
    Ok(out)
}

pub fn read_conll(path: impl AsRef<Path>) -> Result<Vec<ConllSentence>> {
    parse_conll(&std::fs::read_to_string(path)?)
}

/// Writes word trees in the same ten-column layout; unused columns hold `_`.
pub fn format_conll(items: &[(CharSentence, WordTree)]) -> String {
    let mut out = String::new();
    for (sentence, tree) in items {
        let seg = tree.segmentation();
        for w in 1..=tree.num_words() {
            let (b, e) = seg.span(w);
            let _ = writeln!(
                out,
                "{}\t{}\t_\t_\t_\t_\t{}\t{}\t_\t_",
                w,
                sentence.substring(b, e),
                tree.head(w),
                tree.label(w)
            );
        }
        out.push('\n');
    }
    out
}

pub fn write_conll(path: impl AsRef<Path>, items: &[(CharSentence, WordTree)]) -> Result<()> {
    std::fs::write(path, format_conll(items))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::*;

    const FIGURE: &str = "1\t上海\t_\tNR\tNR\t_\t2\tnsubj\t_\t_\n\
2\t计划\t_\tVV\tVV\t_\t0\troot\t_\t_\n\
3\t发展\t_\tVV\tVV\t_\t2\tccomp\t_\t_\n\
4\t金融业\t_\tNN\tNN\t_\t3\tdobj\t_\t_\n\n";

    #[test]
    fn figure_sentence() {
        let s = parse_conll(FIGURE).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].sentence.to_string(), FIGURE_TEXT);
        assert_eq!(s[0].tree, figure_word_tree());
        assert!(s[0].projective);
    }

    #[test]
    fn one_word() {
        let s = parse_conll("1\t你好\t_\t_\t_\t_\t0\troot\t_\t_\n").unwrap();
        assert_eq!(s[0].sentence.len(), 2);
        assert_eq!(s[0].tree.heads(), &[0, 0]);
    }

    #[test]
    fn non_projective_is_flagged() {
        let text = "1\ta\t_\t_\t_\t_\t3\tx\t_\t_\n2\tb\t_\t_\t_\t_\t4\tx\t_\t_\n\
3\tc\t_\t_\t_\t_\t0\troot\t_\t_\n4\td\t_\t_\t_\t_\t3\tx\t_\t_\n";
        let s = parse_conll(text).unwrap();
        assert!(!s[0].projective);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad_cols = "1\ta\t_\t_\t_\t_\t0\troot\t_\t_\n\n1\tb\t_\n";
        assert!(matches!(
            parse_conll(bad_cols),
            Err(Error::Parse { line: 3, .. })
        ));
        let bad_head = "1\ta\t_\t_\t_\t_\tx\troot\t_\t_\n";
        assert!(matches!(
            parse_conll(bad_head),
            Err(Error::Parse { line: 1, .. })
        ));
        let range = "1\ta\t_\t_\t_\t_\t0\troot\t_\t_\n2\tb\t_\t_\t_\t_\t7\tdep\t_\t_\n";
        assert!(matches!(
            parse_conll(range),
            Err(Error::Parse { line: 2, .. })
        ));
        let cycle = "1\ta\t_\t_\t_\t_\t2\tdep\t_\t_\n2\tb\t_\t_\t_\t_\t1\tdep\t_\t_\n";
        assert!(matches!(
            parse_conll(cycle),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn write_then_read() {
        let s = parse_conll(FIGURE).unwrap();
        let items: Vec<_> = s
            .iter()
            .map(|c| (c.sentence.clone(), c.tree.clone()))
            .collect();
        let text = format_conll(&items);
        let back = parse_conll(&text).unwrap();
        assert_eq!(back[0].tree, s[0].tree);
        assert_eq!(format_conll(&items), text);
        assert!(parse_conll("").unwrap().is_empty());
    }
}
