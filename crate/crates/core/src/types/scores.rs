use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Score assigned to masked arcs. Any value at or below `MASKED / 2` is
/// treated as the semiring zero.
pub const MASKED: f64 = -1e9;

pub fn is_masked(v: f64) -> bool {
    v <= MASKED / 2.0
}

/// Dense arc score table `s[h][m]` over positions 0..=n.
///
/// The diagonal and column 0 are never read.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcScores {
    n: usize,
    data: Vec<f64>,
}

impl ArcScores {
    pub fn zeros(n: usize) -> Self {
        ArcScores {
            n,
            data: vec![0.0; (n + 1) * (n + 1)],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut scores = ArcScores::zeros(n);
        for h in 0..=n {
            for m in 1..=n {
                if h != m {
                    scores.set(h, m, f(h, m));
                }
            }
        }
        scores
    }

    /// Build from a row-major `(n+1) x (n+1)` buffer.
    pub fn from_vec(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != (n + 1) * (n + 1) {
            return Err(Error::LengthMismatch {
                expected: (n + 1) * (n + 1),
                got: data.len(),
            });
        }
        Ok(ArcScores { n, data })
    }

    /// Sentence length (excluding ROOT).
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, h: usize, m: usize) -> f64 {
        self.data[h * (self.n + 1) + m]
    }

    #[inline]
    pub fn set(&mut self, h: usize, m: usize, v: f64) {
        self.data[h * (self.n + 1) + m] = v;
    }

    pub fn mask(&mut self, h: usize, m: usize) {
        self.set(h, m, MASKED);
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }
}

/// Separate score tables for the intra-word and inter-word roles of an arc.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct C2fArcScores {
    intra: ArcScores,
    inter: ArcScores,
}

impl C2fArcScores {
    /// ROOT never heads an intra-word arc, so row 0 of `intra` is masked.
    pub fn new(mut intra: ArcScores, inter: ArcScores) -> Result<Self> {
        if intra.n() != inter.n() {
            return Err(Error::LengthMismatch {
                expected: intra.n(),
                got: inter.n(),
            });
        }
        for m in 1..=intra.n() {
            intra.mask(0, m);
        }
        Ok(C2fArcScores { intra, inter })
    }

    pub fn n(&self) -> usize {
        self.intra.n()
    }

    pub fn intra(&self) -> &ArcScores {
        &self.intra
    }

    pub fn inter(&self) -> &ArcScores {
        &self.inter
    }
}

/// Dense label score table `t[h][m][l]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelScores {
    n: usize,
    num_labels: usize,
    data: Vec<f64>,
}

impl LabelScores {
    pub fn zeros(n: usize, num_labels: usize) -> Self {
        LabelScores {
            n,
            num_labels,
            data: vec![0.0; (n + 1) * (n + 1) * num_labels],
        }
    }

    pub fn from_fn(
        n: usize,
        num_labels: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Self {
        let mut scores = LabelScores::zeros(n, num_labels);
        for h in 0..=n {
            for m in 1..=n {
                for l in 0..num_labels {
                    scores.set(h, m, l, f(h, m, l));
                }
            }
        }
        scores
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_labels(&self) -> usize {
        self.num_labels
    }

    #[inline]
    fn offset(&self, h: usize, m: usize) -> usize {
        (h * (self.n + 1) + m) * self.num_labels
    }

    #[inline]
    pub fn get(&self, h: usize, m: usize, l: usize) -> f64 {
        self.data[self.offset(h, m) + l]
    }

    #[inline]
    pub fn set(&mut self, h: usize, m: usize, l: usize, v: f64) {
        let o = self.offset(h, m);
        self.data[o + l] = v;
    }

    /// Scores of all labels for arc `h -> m`.
    pub fn row(&self, h: usize, m: usize) -> &[f64] {
        let o = self.offset(h, m);
        &self.data[o..o + self.num_labels]
    }

    pub fn row_mut(&mut self, h: usize, m: usize) -> &mut [f64] {
        let o = self.offset(h, m);
        &mut self.data[o..o + self.num_labels]
    }

    /// `log p(l | h, m)` under a softmax over labels.
    pub fn log_prob(&self, h: usize, m: usize, l: usize) -> f64 {
        let row = self.row(h, m);
        row[l] - log_sum_exp(row)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

pub(crate) fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}
