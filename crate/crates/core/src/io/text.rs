//! Plain text input: one sentence per line, words separated by whitespace.
//! Blank lines are skipped.

use std::path::Path;

use crate::error::{Error, Result};
use crate::types::{CharSentence, Segmentation};

/// Sentences with the segmentation given by their whitespace.
pub fn parse_plain_text(text: &str) -> Result<Vec<(CharSentence, Segmentation)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let words: Vec<&str> = line.split_whitespace().collect();
        if words.is_empty() {
            continue;
        }
        let lengths: Vec<usize> = words.iter().map(|w| w.chars().count()).collect();
        let chars: Vec<char> = words.iter().flat_map(|w| w.chars()).collect();
        if let Some(c) = chars.iter().find(|c| c.is_control()) {
            return Err(Error::parse(
                i + 1,
                format!("control character {:?} in sentence", c),
            ));
        }
        let seg =
            Segmentation::from_lengths(&lengths).map_err(|e| Error::parse(i + 1, e.to_string()))?;
        out.push((CharSentence::new(chars)?, seg));
    }
    Ok(out)
}

pub fn read_plain_text(path: impl AsRef<Path>) -> Result<Vec<(CharSentence, Segmentation)>> {
    parse_plain_text(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words_define_segmentation() {
        let got = parse_plain_text("上海 计划\n\n  发展金融业 \n").unwrap();
        assert_eq!(got.len(), 2);
        assert_eq!(got[0].0.to_string(), "上海计划");
        assert_eq!(got[0].1.word_lengths(), vec![2, 2]);
        assert_eq!(got[1].1.word_lengths(), vec![5]);
        assert!(parse_plain_text("").unwrap().is_empty());
    }

    #[test]
    fn control_characters_are_rejected() {
        assert!(matches!(
            parse_plain_text("ok\na\u{7}b\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}
