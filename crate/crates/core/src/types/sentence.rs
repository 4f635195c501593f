use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sentence as a sequence of characters.
///
/// Characters are addressed 1..=n; position 0 is the virtual ROOT token and
/// never appears as a modifier.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CharSentence {
    chars: Vec<char>,
}

impl CharSentence {
    pub fn new(chars: Vec<char>) -> Result<Self> {
        if chars.is_empty() {
            return Err(Error::LengthMismatch {
                expected: 1,
                got: 0,
            });
        }
        Ok(CharSentence { chars })
    }

    /// Number of characters, excluding ROOT.
    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    /// The character at 1-based position `i`.
    pub fn char_at(&self, i: usize) -> Option<char> {
        if i == 0 {
            None
        } else {
            self.chars.get(i - 1).copied()
        }
    }

    pub fn chars(&self) -> &[char] {
        &self.chars
    }

    /// Characters of the inclusive 1-based span `[begin, end]`.
    pub fn substring(&self, begin: usize, end: usize) -> String {
        self.chars[begin - 1..end].iter().collect()
    }
}

impl std::str::FromStr for CharSentence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CharSentence::new(s.chars().collect())
    }
}

impl fmt::Display for CharSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.chars {
            write!(f, "{}", c)?;
        }
        Ok(())
    }
}
