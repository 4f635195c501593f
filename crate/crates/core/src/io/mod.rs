//! Corpus formats. Every reader has a `parse_*` entry point over `&str`
//! (used by the fuzz targets) and a `read_*` wrapper over a file path.
//! Text is UTF-8 and a character is a Unicode scalar value.

mod annotations;
mod char_tree;
mod conll;
mod text;

pub use annotations::{parse_intra_annotations, read_intra_annotations, Annotations};
pub use char_tree::{format_char_trees, parse_char_trees, read_char_trees, write_char_trees};
pub use conll::{format_conll, parse_conll, read_conll, write_conll, ConllSentence};
pub use text::{parse_plain_text, read_plain_text};

use crate::types::validate_heads;

/// Single root and acyclic; projectivity is not required.
pub(crate) fn is_rooted_tree(heads: &[usize]) -> bool {
    let n = heads.len().saturating_sub(1);
    if n == 0 || heads[1..].iter().filter(|&&h| h == 0).count() != 1 {
        return false;
    }
    for start in 1..=n {
        let mut x = start;
        for _ in 0..=n {
            if x == 0 {
                break;
            }
            if heads[x] > n || heads[x] == x {
                return false;
            }
            x = heads[x];
        }
        if x != 0 {
            return false;
        }
    }
    true
}

/// Single root, acyclic and projective.
pub(crate) fn is_projective_tree(heads: &[usize]) -> bool {
    validate_heads(heads)
}

/// Splits `text` into blank-line separated blocks of `(line number, line)`.
pub(crate) fn blocks(text: &str) -> Vec<Vec<(usize, &str)>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
        } else {
            cur.push((i + 1, line));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// Label tokens: non-empty, no whitespace.
pub(crate) fn valid_token(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(char::is_whitespace)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rooted_tree_allows_crossing() {
        assert!(is_rooted_tree(&[0, 3, 4, 0, 3]));
        assert!(!is_projective_tree(&[0, 3, 4, 0, 3]));
        assert!(!is_rooted_tree(&[0, 2, 1]));
        assert!(!is_rooted_tree(&[0, 0, 0]));
    }

    #[test]
    fn block_splitting() {
        let b = blocks("a\nb\n\n\nc\r\n");
        assert_eq!(b, vec![vec![(1, "a"), (2, "b")], vec![(5, "c")]]);
    }
}
