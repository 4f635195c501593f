use serde::{Deserialize, Serialize};

use super::tree::validate_heads;
use super::{Segmentation, WordTree};
use crate::error::{Error, Result};

/// A fixed intra-word dependency structure over one word span.
///
/// Positions are absolute character indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntraStructure {
    begin: usize,
    end: usize,
    root: usize,
    // heads[i - begin] is the head of character i; the root maps to 0.
    heads: Vec<usize>,
}

impl IntraStructure {
    /// Build from `(head, modifier)` arcs over `[begin, end]`. The arcs must
    /// form a projective tree over the span rooted at `root`.
    pub fn new(span: (usize, usize), root: usize, arcs: &[(usize, usize)]) -> Result<Self> {
        let (begin, end) = span;
        if begin == 0 || end < begin {
            return Err(Error::InvalidTree(format!(
                "bad word span ({}, {})",
                begin, end
            )));
        }
        if root < begin || root > end {
            return Err(Error::InvalidTree(format!(
                "root {} outside word span ({}, {})",
                root, begin, end
            )));
        }
        let len = end - begin + 1;
        let mut heads = vec![usize::MAX; len];
        heads[root - begin] = 0;
        for &(h, m) in arcs {
            for p in [h, m] {
                if p < begin || p > end {
                    return Err(Error::InvalidTree(format!(
                        "arc {} -> {} leaves word span ({}, {})",
                        h, m, begin, end
                    )));
                }
            }
            if m == root || heads[m - begin] != usize::MAX {
                return Err(Error::InvalidTree(format!("character {} has two heads", m)));
            }
            heads[m - begin] = h;
        }
        if heads.contains(&usize::MAX) {
            return Err(Error::InvalidTree(format!(
                "word span ({}, {}) is not fully attached",
                begin, end
            )));
        }
        let structure = IntraStructure {
            begin,
            end,
            root,
            heads,
        };
        if !validate_heads(&structure.local_heads_with_slot()) {
            return Err(Error::InvalidTree(format!(
                "intra-word structure over ({}, {}) is not a projective tree",
                begin, end
            )));
        }
        Ok(structure)
    }

    /// Build from 1-based word-local heads where 0 marks the root, e.g.
    /// `[2, 0]` for a two-character word headed by its second character.
    pub fn from_local_heads(begin: usize, local: &[usize]) -> Result<Self> {
        if local.is_empty() {
            return Err(Error::InvalidTree("empty intra-word structure".into()));
        }
        let end = begin + local.len() - 1;
        let mut root = None;
        let mut arcs = Vec::new();
        for (k, &h) in local.iter().enumerate() {
            let pos = begin + k;
            if h == 0 {
                if root.replace(pos).is_some() {
                    return Err(Error::InvalidTree(
                        "intra-word structure has two roots".into(),
                    ));
                }
            } else if h > local.len() {
                return Err(Error::InvalidTree(format!(
                    "local head {} exceeds word length {}",
                    h,
                    local.len()
                )));
            } else {
                arcs.push((begin + h - 1, pos));
            }
        }
        let root =
            root.ok_or_else(|| Error::InvalidTree("intra-word structure has no root".into()))?;
        IntraStructure::new((begin, end), root, &arcs)
    }

    pub fn span(&self) -> (usize, usize) {
        (self.begin, self.end)
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// Head of character `m` within the word; `None` for the root.
    pub fn head_of(&self, m: usize) -> Option<usize> {
        match self.heads[m - self.begin] {
            0 => None,
            h => Some(h),
        }
    }

    /// `(head, modifier)` arcs in modifier order.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        (self.begin..=self.end)
            .filter_map(|m| self.head_of(m).map(|h| (h, m)))
            .collect()
    }

    /// 1-based word-local heads with 0 marking the root.
    pub fn local_heads(&self) -> Vec<usize> {
        self.heads
            .iter()
            .map(|&h| if h == 0 { 0 } else { h - self.begin + 1 })
            .collect()
    }

    fn local_heads_with_slot(&self) -> Vec<usize> {
        let mut v = vec![0];
        v.extend(self.local_heads());
        v
    }

    /// The same structure moved to start at `begin`.
    pub fn relocated(&self, begin: usize) -> IntraStructure {
        IntraStructure::from_local_heads(begin, &self.local_heads())
            .expect("relocating a valid structure")
    }
}

/// Compatibility constraints induced by a segmentation and, optionally, the
/// word-level heads of a gold tree.
///
/// Without word heads a `ForestSpec` only fixes word boundaries (any word may head
/// any other word); this is the mode used for decoding under a given
/// segmentation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestSpec {
    segmentation: Segmentation,
    word_heads: Option<Vec<usize>>,
    // fixed[w] for words 1..=m; slot 0 unused.
    fixed: Vec<Option<IntraStructure>>,
}

impl ForestSpec {
    pub fn new(segmentation: Segmentation, word_heads: Option<Vec<usize>>) -> Result<Self> {
        let m = segmentation.num_words();
        if let Some(heads) = &word_heads {
            if heads.len() != m + 1 {
                return Err(Error::LengthMismatch {
                    expected: m + 1,
                    got: heads.len(),
                });
            }
            if !validate_heads(heads) {
                return Err(Error::InvalidTree(
                    "word heads do not form a projective tree".into(),
                ));
            }
        }
        Ok(ForestSpec {
            segmentation,
            word_heads,
            fixed: vec![None; m + 1],
        })
    }

    pub fn from_word_tree(gold: &WordTree) -> Result<Self> {
        ForestSpec::new(gold.segmentation().clone(), Some(gold.heads().to_vec()))
    }

    /// Constrain only word boundaries.
    pub fn segmentation_only(segmentation: Segmentation) -> Self {
        let m = segmentation.num_words();
        ForestSpec {
            segmentation,
            word_heads: None,
            fixed: vec![None; m + 1],
        }
    }

    pub fn n(&self) -> usize {
        self.segmentation.len()
    }

    pub fn segmentation(&self) -> &Segmentation {
        &self.segmentation
    }

    pub fn word_heads(&self) -> Option<&[usize]> {
        self.word_heads.as_deref()
    }

    pub fn fixed(&self, w: usize) -> Option<&IntraStructure> {
        self.fixed.get(w).and_then(|s| s.as_ref())
    }

    pub(crate) fn set_fixed(&mut self, w: usize, structure: IntraStructure) {
        self.fixed[w] = Some(structure);
    }

    /// Whether arc `h -> m` may appear in a compatible tree.
    pub fn arc_admissible(&self, h: usize, m: usize) -> Result<bool> {
        let n = self.n();
        if h > n {
            return Err(Error::IndexOutOfRange {
                index: h,
                min: 0,
                max: n,
            });
        }
        if m == 0 || m > n {
            return Err(Error::IndexOutOfRange {
                index: m,
                min: 1,
                max: n,
            });
        }
        if h == m {
            return Err(Error::IndexOutOfRange {
                index: h,
                min: 0,
                max: n,
            });
        }
        Ok(self.admissible_unchecked(h, m))
    }

    pub(crate) fn admissible_unchecked(&self, h: usize, m: usize) -> bool {
        let seg = &self.segmentation;
        let wm = seg.word_of(m);
        let wh = seg.word_of(h);
        if h != 0 && wh == wm {
            return match self.fixed(wm) {
                Some(s) => s.head_of(m) == Some(h),
                None => true,
            };
        }
        if let Some(s) = self.fixed(wm) {
            if s.root() != m {
                return false;
            }
        }
        if h != 0 {
            if let Some(s) = self.fixed(wh) {
                if s.root() != h {
                    return false;
                }
            }
        }
        match &self.word_heads {
            Some(heads) => heads[wm] == wh,
            None => true,
        }
    }

    /// Row-major `(n+1) x (n+1)` admissibility table.
    pub fn admissibility_mask(&self) -> Vec<bool> {
        let n = self.n();
        let mut mask = vec![false; (n + 1) * (n + 1)];
        for h in 0..=n {
            for m in 1..=n {
                if h != m {
                    mask[h * (n + 1) + m] = self.admissible_unchecked(h, m);
                }
            }
        }
        mask
    }
}
