//! Mask tensors for the compatibility constraints.

use crate::types::ForestSpec;

/// Switches for the two compatibility constraints. Disabling one
/// reproduces the corresponding ablation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Constraints {
    /// Inter-word complete spans must end on a word boundary.
    pub single_root: bool,
    /// A complete span hanging below an intra-word arc may not leave the word.
    pub root_as_head: bool,
}

impl Default for Constraints {
    fn default() -> Self {
        Constraints {
            single_root: true,
            root_as_head: true,
        }
    }
}

impl Constraints {
    pub const NONE: Constraints = Constraints {
        single_root: false,
        root_as_head: false,
    };
}

/// Precomputed admissibility of chart items and combinations.
///
/// `right_end[i][j]`: complete span `i -> j` may exist.
/// `left_end[i][j]`: complete span `i <- j` may exist.
/// `right_comb[i][k][j]`: `C(i->j) = I(i->k) + C(k->j)` is allowed.
/// `left_comb[i][k][j]`: `C(i<-j) = C(i<-k) + I(k<-j)` is allowed.
/// `arc[h][m]`: arc admissibility.
pub(crate) struct SpanMasks {
    n: usize,
    right_end: Vec<bool>,
    left_end: Vec<bool>,
    right_comb: Vec<bool>,
    left_comb: Vec<bool>,
    arc: Vec<bool>,
}

impl SpanMasks {
    pub fn unconstrained(n: usize) -> Self {
        let sq = (n + 1) * (n + 1);
        SpanMasks {
            n,
            right_end: vec![true; sq],
            left_end: vec![true; sq],
            right_comb: vec![true; sq * (n + 1)],
            left_comb: vec![true; sq * (n + 1)],
            arc: vec![true; sq],
        }
    }

    pub fn from_spec(spec: &ForestSpec, constraints: Constraints) -> Self {
        let n = spec.n();
        let seg = spec.segmentation();
        let mut masks = SpanMasks::unconstrained(n);
        masks.arc = spec.admissibility_mask();
        for i in 1..=n {
            for j in i..=n {
                let same = seg.same_word(i, j);
                let ij = i * (n + 1) + j;
                if constraints.single_root {
                    masks.right_end[ij] = same || seg.is_word_end(j);
                    masks.left_end[ij] = same || seg.is_word_begin(i);
                }
                if constraints.root_as_head {
                    for k in i..=j {
                        let idx = ij * (n + 1) + k;
                        // I(i->k) intra requires C(k->j) inside the word.
                        masks.right_comb[idx] = !seg.same_word(i, k) || seg.same_word(k, j);
                        // I(k<-j) intra requires C(i<-k) inside the word.
                        masks.left_comb[idx] = !seg.same_word(k, j) || seg.same_word(i, k);
                    }
                }
            }
        }
        masks
    }

    #[inline]
    pub fn right_end(&self, i: usize, j: usize) -> bool {
        self.right_end[i * (self.n + 1) + j]
    }

    #[inline]
    pub fn left_end(&self, i: usize, j: usize) -> bool {
        self.left_end[i * (self.n + 1) + j]
    }

    #[inline]
    pub fn right_comb(&self, i: usize, k: usize, j: usize) -> bool {
        self.right_comb[(i * (self.n + 1) + j) * (self.n + 1) + k]
    }

    #[inline]
    pub fn left_comb(&self, i: usize, k: usize, j: usize) -> bool {
        self.left_comb[(i * (self.n + 1) + j) * (self.n + 1) + k]
    }

    #[inline]
    pub fn arc(&self, h: usize, m: usize) -> bool {
        self.arc[h * (self.n + 1) + m]
    }
}
