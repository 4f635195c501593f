//! Four-column character-tree files: `id char head label` per character,
//! sentences separated by a blank line.

use std::fmt::Write as _;
use std::path::Path;

use super::{blocks, valid_token};
use crate::error::{Error, Result};
use crate::types::{CharSentence, CharTree};

pub fn parse_char_trees(text: &str) -> Result<Vec<(CharSentence, CharTree)>> {
    let mut out = Vec::new();
    for block in blocks(text) {
        let first = block[0].0;
        let mut chars = Vec::new();
        let mut heads = vec![0];
        let mut labels = vec![String::new()];
        for (k, &(line, row)) in block.iter().enumerate() {
            let cols: Vec<&str> = row.split('\t').collect();
            if cols.len() != 4 {
                return Err(Error::parse(
                    line,
                    format!("expected 4 tab-separated columns, found {}", cols.len()),
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
            let mut cs = cols[1].chars();
            let c = match (cs.next(), cs.next()) {
                (Some(c), None) if !c.is_whitespace() => c,
                _ => {
                    return Err(Error::parse(
                        line,
                        "second column must be a single character",
                    ))
                }
            };
            let head: usize = cols[2]
                .parse()
                .map_err(|_| Error::parse(line, format!("non-integer head {:?}", cols[2])))?;
            if head > block.len() {
                return Err(Error::parse(
                    line,
                    format!("head {} out of range 0..={}", head, block.len()),
                ));
            }
            if !valid_token(cols[3]) {
                return Err(Error::parse(line, "empty label"));
            }
            chars.push(c);
            heads.push(head);
            labels.push(cols[3].to_owned());
        }
        let tree = CharTree::new(heads, labels)?;
        if !tree.is_valid() {
            return Err(Error::parse(
                first,
                "heads do not form a projective single-rooted tree",
            ));
        }
        out.push((CharSentence::new(chars)?, tree));
    }
    Ok(out)
}

pub fn read_char_trees(path: impl AsRef<Path>) -> Result<Vec<(CharSentence, CharTree)>> {
    parse_char_trees(&std::fs::read_to_string(path)?)
}

pub fn format_char_trees(items: &[(CharSentence, CharTree)]) -> String {
    let mut out = String::new();
    for (sentence, tree) in items {
        for (h, m, label) in tree.arcs() {
            let c = sentence.char_at(m).unwrap_or('?');
            let _ = writeln!(out, "{}\t{}\t{}\t{}", m, c, h, label);
        }
        out.push('\n');
    }
    out
}

pub fn write_char_trees(path: impl AsRef<Path>, items: &[(CharSentence, CharTree)]) -> Result<()> {
    std::fs::write(path, format_char_trees(items))?;
    Ok(())
}
