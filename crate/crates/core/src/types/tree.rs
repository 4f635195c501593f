use serde::{Deserialize, Serialize};

use super::{ArcScores, Segmentation};
use crate::error::{Error, Result};

/// Checks that `heads` (index 0 unused) encodes a single-rooted, acyclic,
/// projective tree over positions 1..heads.len()-1 with ROOT at 0.
pub fn validate_heads(heads: &[usize]) -> bool {
    if heads.len() < 2 {
        return false;
    }
    let n = heads.len() - 1;
    let mut roots = 0;
    for m in 1..=n {
        let h = heads[m];
        if h > n || h == m {
            return false;
        }
        if h == 0 {
            roots += 1;
        }
    }
    if roots != 1 {
        return false;
    }
    // Acyclic: every chain reaches ROOT in at most n steps.
    for start in 1..=n {
        let mut cur = start;
        let mut steps = 0;
        while cur != 0 {
            cur = heads[cur];
            steps += 1;
            if steps > n {
                return false;
            }
        }
    }
    is_projective(heads)
}

/// No two arcs cross when drawn above the sentence (ROOT at position 0).
pub fn is_projective(heads: &[usize]) -> bool {
    let n = heads.len().saturating_sub(1);
    for a in 1..=n {
        let (l1, r1) = ordered(heads[a], a);
        for b in (a + 1)..=n {
            let (l2, r2) = ordered(heads[b], b);
            if (l1 < l2 && l2 < r1 && r1 < r2) || (l2 < l1 && l1 < r2 && r2 < r1) {
                return false;
            }
        }
    }
    true
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Sum of `scores` over the arcs of `heads`, accumulated in modifier order.
pub fn tree_score(heads: &[usize], scores: &ArcScores) -> f64 {
    (1..heads.len()).map(|m| scores.get(heads[m], m)).sum()
}

/// Labeled character-level dependency tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CharTree {
    heads: Vec<usize>,
    labels: Vec<String>,
}

impl CharTree {
    /// `heads` and `labels` are indexed by character position with an unused
    /// slot 0. Structure is not validated here; see [`CharTree::is_valid`].
    pub fn new(heads: Vec<usize>, labels: Vec<String>) -> Result<Self> {
        if heads.len() != labels.len() {
            return Err(Error::LengthMismatch {
                expected: heads.len(),
                got: labels.len(),
            });
        }
        if heads.len() < 2 {
            return Err(Error::InvalidTree("tree has no characters".into()));
        }
        Ok(CharTree { heads, labels })
    }

    /// Unlabeled tree with the same label on every arc.
    pub fn unlabeled(heads: Vec<usize>, label: &str) -> Result<Self> {
        let mut labels = vec![label.to_owned(); heads.len()];
        if let Some(first) = labels.first_mut() {
            first.clear();
        }
        CharTree::new(heads, labels)
    }

    pub fn len(&self) -> usize {
        self.heads.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn heads(&self) -> &[usize] {
        &self.heads
    }

    pub fn head(&self, m: usize) -> usize {
        self.heads[m]
    }

    pub fn label(&self, m: usize) -> &str {
        &self.labels[m]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn set_label(&mut self, m: usize, label: &str) {
        self.labels[m] = label.to_owned();
    }

    /// `(head, modifier, label)` triples in modifier order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, &str)> + '_ {
        (1..self.heads.len()).map(move |m| (self.heads[m], m, self.labels[m].as_str()))
    }

    /// Single root, acyclic and projective.
    pub fn is_valid(&self) -> bool {
        validate_heads(&self.heads)
    }
}

/// Checks the structural invariants of a character tree.
pub fn validate_char_tree(tree: &CharTree) -> bool {
    tree.is_valid()
}

/// Labeled word-level dependency tree over a segmented sentence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WordTree {
    segmentation: Segmentation,
    heads: Vec<usize>,
    labels: Vec<String>,
}

impl WordTree {
    /// `heads` and `labels` are indexed by word (1..=m) with an unused slot 0.
    pub fn new(segmentation: Segmentation, heads: Vec<usize>, labels: Vec<String>) -> Result<Self> {
        let expected = segmentation.num_words() + 1;
        if heads.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: heads.len(),
            });
        }
        if labels.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: labels.len(),
            });
        }
        Ok(WordTree {
            segmentation,
            heads,
            labels,
        })
    }

    pub fn segmentation(&self) -> &Segmentation {
        &self.segmentation
    }

    pub fn num_words(&self) -> usize {
        self.segmentation.num_words()
    }

    pub fn heads(&self) -> &[usize] {
        &self.heads
    }

    pub fn head(&self, w: usize) -> usize {
        self.heads[w]
    }

    pub fn label(&self, w: usize) -> &str {
        &self.labels[w]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Single root, acyclic and projective at word granularity.
    pub fn is_valid(&self) -> bool {
        validate_heads(&self.heads)
    }

    pub fn is_projective(&self) -> bool {
        is_projective(&self.heads)
    }
}
