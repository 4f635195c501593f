use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Segmentation tag of a character within its word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Bmes {
    /// First character of a multi-character word.
    B,
    /// Interior character of a word of length three or more.
    M,
    /// Last character of a multi-character word.
    E,
    /// Single-character word.
    S,
}

impl Bmes {
    pub const ALL: [Bmes; 4] = [Bmes::B, Bmes::M, Bmes::E, Bmes::S];

    pub fn index(self) -> usize {
        match self {
            Bmes::B => 0,
            Bmes::M => 1,
            Bmes::E => 2,
            Bmes::S => 3,
        }
    }

    /// Whether `next` may directly follow `self` in a well-formed tag sequence.
    pub fn may_precede(self, next: Bmes) -> bool {
        matches!(
            (self, next),
            (Bmes::B, Bmes::M)
                | (Bmes::B, Bmes::E)
                | (Bmes::M, Bmes::M)
                | (Bmes::M, Bmes::E)
                | (Bmes::E, Bmes::B)
                | (Bmes::E, Bmes::S)
                | (Bmes::S, Bmes::B)
                | (Bmes::S, Bmes::S)
        )
    }

    pub fn may_start(self) -> bool {
        matches!(self, Bmes::B | Bmes::S)
    }

    pub fn may_end(self) -> bool {
        matches!(self, Bmes::E | Bmes::S)
    }
}

impl fmt::Display for Bmes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Bmes::B => 'B',
            Bmes::M => 'M',
            Bmes::E => 'E',
            Bmes::S => 'S',
        };
        write!(f, "{}", c)
    }
}

/// A partition of the characters 1..=n into contiguous words.
///
/// Words are numbered 1..=m; word 0 is reserved for ROOT.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Segmentation {
    spans: Vec<(usize, usize)>,
    // word_of[i] for character i; word_of[0] = 0 (ROOT).
    word_of: Vec<usize>,
}

impl Segmentation {
    /// Build from inclusive `(begin, end)` character spans.
    pub fn new(spans: Vec<(usize, usize)>) -> Result<Self> {
        if spans.is_empty() {
            return Err(Error::InvalidSegmentation("no words".into()));
        }
        let mut expected = 1;
        for &(b, e) in &spans {
            if b != expected {
                return Err(Error::InvalidSegmentation(format!(
                    "span ({}, {}) does not start at {}",
                    b, e, expected
                )));
            }
            if e < b {
                return Err(Error::InvalidSegmentation(format!(
                    "span ({}, {}) ends before it begins",
                    b, e
                )));
            }
            expected = e + 1;
        }
        let n = expected - 1;
        let mut word_of = vec![0; n + 1];
        for (w, &(b, e)) in spans.iter().enumerate() {
            for slot in &mut word_of[b..=e] {
                *slot = w + 1;
            }
        }
        Ok(Segmentation { spans, word_of })
    }

    /// Build from word lengths in order.
    pub fn from_lengths(lengths: &[usize]) -> Result<Self> {
        let mut spans = Vec::with_capacity(lengths.len());
        let mut begin = 1;
        for &len in lengths {
            if len == 0 {
                return Err(Error::InvalidSegmentation("zero-length word".into()));
            }
            spans.push((begin, begin + len - 1));
            begin += len;
        }
        Segmentation::new(spans)
    }

    /// Every character is its own word.
    pub fn singletons(n: usize) -> Result<Self> {
        Segmentation::from_lengths(&vec![1; n])
    }

    pub fn from_bmes(tags: &[Bmes]) -> Result<Self> {
        let mut spans = Vec::new();
        let mut begin = None;
        for (idx, &tag) in tags.iter().enumerate() {
            let pos = idx + 1;
            match (tag, begin) {
                (Bmes::S, None) => spans.push((pos, pos)),
                (Bmes::B, None) => begin = Some(pos),
                (Bmes::M, Some(_)) => {}
                (Bmes::E, Some(b)) => {
                    spans.push((b, pos));
                    begin = None;
                }
                _ => {
                    return Err(Error::InvalidSegmentation(format!(
                        "ill-formed tag {} at position {}",
                        tag, pos
                    )))
                }
            }
        }
        if begin.is_some() {
            return Err(Error::InvalidSegmentation(
                "tag sequence ends inside a word".into(),
            ));
        }
        Segmentation::new(spans)
    }

    pub fn to_bmes(&self) -> Vec<Bmes> {
        let mut tags = Vec::with_capacity(self.len());
        for &(b, e) in &self.spans {
            if b == e {
                tags.push(Bmes::S);
            } else {
                tags.push(Bmes::B);
                tags.extend(std::iter::repeat_n(Bmes::M, e - b - 1));
                tags.push(Bmes::E);
            }
        }
        tags
    }

    /// Number of characters covered.
    pub fn len(&self) -> usize {
        self.word_of.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn num_words(&self) -> usize {
        self.spans.len()
    }

    pub fn spans(&self) -> &[(usize, usize)] {
        &self.spans
    }

    /// Span of the 1-based word `w`.
    pub fn span(&self, w: usize) -> (usize, usize) {
        self.spans[w - 1]
    }

    /// Word index of character `i`; ROOT (0) maps to word 0.
    pub fn word_of(&self, i: usize) -> usize {
        self.word_of[i]
    }

    pub fn word_lengths(&self) -> Vec<usize> {
        self.spans.iter().map(|&(b, e)| e - b + 1).collect()
    }

    pub fn same_word(&self, a: usize, b: usize) -> bool {
        a != 0 && b != 0 && self.word_of[a] == self.word_of[b]
    }

    pub fn is_word_begin(&self, i: usize) -> bool {
        i >= 1 && self.span(self.word_of[i]).0 == i
    }

    pub fn is_word_end(&self, i: usize) -> bool {
        i >= 1 && self.span(self.word_of[i]).1 == i
    }
}
