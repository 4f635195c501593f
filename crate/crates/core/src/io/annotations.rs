//! Intra-word structure annotations.
//!
//! One entry per line: `word<TAB>h1 h2 ... hk`, where `hi` is the 1-based
//! position inside the word of the head of character `i` and `0` marks the
//! word root. Lines starting with `#` and blank lines are ignored. Repeated
//! entries for a word must agree.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::types::IntraStructure;

/// Annotated local head arrays keyed by word form.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Annotations {
    map: BTreeMap<String, Vec<usize>>,
}

impl Annotations {
    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Local heads of `word`, if annotated.
    pub fn get(&self, word: &str) -> Option<&[usize]> {
        self.map.get(word).map(|v| v.as_slice())
    }

    /// Structure of `word` placed at absolute position `begin`.
    pub fn structure_at(&self, word: &str, begin: usize) -> Option<IntraStructure> {
        self.get(word)
            .map(|h| IntraStructure::from_local_heads(begin, h).expect("validated on load"))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[usize])> {
        self.map.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }
}

pub fn parse_intra_annotations(text: &str) -> Result<Annotations> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (word, heads) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(line_no, "expected word<TAB>heads"))?;
        if word.is_empty() || word.chars().any(char::is_whitespace) {
            return Err(Error::parse(line_no, "invalid word"));
        }
        let heads: Vec<usize> = heads
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::parse(line_no, format!("non-integer head {:?}", t)))
            })
            .collect::<Result<_>>()?;
        let len = word.chars().count();
        if heads.len() != len {
            return Err(Error::parse(
                line_no,
                format!("{} heads for a word of {} characters", heads.len(), len),
            ));
        }
        IntraStructure::from_local_heads(1, &heads)
            .map_err(|e| Error::parse(line_no, format!("invalid structure: {}", e)))?;
        if let Some(prev) = map.get(word) {
            if prev != &heads {
                return Err(Error::parse(
                    line_no,
                    format!("conflicting annotation for {}", word),
                ));
            }
        }
        map.insert(word.to_owned(), heads);
    }
    Ok(Annotations { map })
}

pub fn read_intra_annotations(path: impl AsRef<Path>) -> Result<Annotations> {
    parse_intra_annotations(&std::fs::read_to_string(path)?)
}
