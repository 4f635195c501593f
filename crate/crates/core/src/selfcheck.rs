//! Oracle agreement suite over small random instances.
//!
//! The chart algorithms are reached through [`ChartImpl`] so that a faulty
//! implementation can be substituted to show that the suite detects it.

use std::fmt;

use crate::chart::{self, C2fParse, Marginals, Parse};
use crate::error::{Error, Result};
use crate::oracle::{
    brute_argmax, brute_c2f_argmax, brute_c2f_log_z, brute_log_z, brute_marginals, enumerate_c2f,
    enumerate_projective, filter_compatible, MAX_N,
};
use crate::sample::{random_c2f_scores, random_scores, random_spec, rng};
use crate::types::{ArcScores, C2fArcScores, ForestSpec};

/// Tolerance of log-partition and marginal comparisons.
pub const TOLERANCE: f64 = 1e-6;

/// The chart operations under test.
pub trait ChartImpl: Sync {
    fn inside(&self, scores: &ArcScores) -> f64;
    fn constrained_inside(&self, scores: &ArcScores, spec: &ForestSpec) -> Result<f64>;
    fn eisner(&self, scores: &ArcScores) -> Result<Parse>;
    fn constrained_eisner(&self, scores: &ArcScores, spec: &ForestSpec) -> Result<Parse>;
    fn marginals(&self, scores: &ArcScores, spec: Option<&ForestSpec>) -> Result<Marginals>;
    fn c2f_inside(&self, scores: &C2fArcScores) -> f64;
    fn c2f_eisner(&self, scores: &C2fArcScores) -> Result<C2fParse>;
}

/// The library's implementation.
#[derive(Clone, Copy, Debug, Default)]
pub struct Reference;

impl ChartImpl for Reference {
    fn inside(&self, scores: &ArcScores) -> f64 {
        chart::inside(scores)
    }
    fn constrained_inside(&self, scores: &ArcScores, spec: &ForestSpec) -> Result<f64> {
        chart::constrained_inside(scores, spec)
    }
    fn eisner(&self, scores: &ArcScores) -> Result<Parse> {
        chart::eisner_decode(scores)
    }
    fn constrained_eisner(&self, scores: &ArcScores, spec: &ForestSpec) -> Result<Parse> {
        chart::constrained_eisner(scores, spec)
    }
    fn marginals(&self, scores: &ArcScores, spec: Option<&ForestSpec>) -> Result<Marginals> {
        chart::arc_marginals(scores, spec)
    }
    fn c2f_inside(&self, scores: &C2fArcScores) -> f64 {
        chart::c2f_inside(scores)
    }
    fn c2f_eisner(&self, scores: &C2fArcScores) -> Result<C2fParse> {
        chart::c2f_eisner(scores)
    }
}

/// Deliberately broken implementation: the unconstrained inside pass reads
/// every arc score with its sign flipped.
#[derive(Clone, Copy, Debug, Default)]
pub struct SignFlippedInside;

impl ChartImpl for SignFlippedInside {
    fn inside(&self, scores: &ArcScores) -> f64 {
        let n = scores.n();
        chart::inside(&ArcScores::from_fn(n, |h, m| -scores.get(h, m)))
    }
    fn constrained_inside(&self, scores: &ArcScores, spec: &ForestSpec) -> Result<f64> {
        Reference.constrained_inside(scores, spec)
    }
    fn eisner(&self, scores: &ArcScores) -> Result<Parse> {
        Reference.eisner(scores)
    }
    fn constrained_eisner(&self, scores: &ArcScores, spec: &ForestSpec) -> Result<Parse> {
        Reference.constrained_eisner(scores, spec)
    }
    fn marginals(&self, scores: &ArcScores, spec: Option<&ForestSpec>) -> Result<Marginals> {
        Reference.marginals(scores, spec)
    }
    fn c2f_inside(&self, scores: &C2fArcScores) -> f64 {
        Reference.c2f_inside(scores)
    }
    fn c2f_eisner(&self, scores: &C2fArcScores) -> Result<C2fParse> {
        Reference.c2f_eisner(scores)
    }
}

/// A failed comparison with everything needed to reproduce it.
#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    pub check: &'static str,
    pub n: usize,
    pub seed: u64,
    pub expected: String,
    pub got: String,
    /// Row-major `(n+1) x (n+1)` arc scores (the inter table for
    /// coarse-to-fine checks).
    pub scores: Vec<f64>,
    /// Word spans and word heads of the forest, when one was used.
    pub forest: Option<ForestDump>,
}

/// Word spans and word heads.
pub type ForestDump = (Vec<(usize, usize)>, Vec<usize>);

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "check: {}", self.check)?;
        writeln!(f, "n: {}", self.n)?;
        writeln!(f, "seed: {}", self.seed)?;
        writeln!(f, "expected: {}", self.expected)?;
        writeln!(f, "got: {}", self.got)?;
        if let Some((spans, heads)) = &self.forest {
            writeln!(f, "words: {:?}", spans)?;
            writeln!(f, "word heads: {:?}", heads)?;
        }
        writeln!(f, "scores:")?;
        let w = self.n + 1;
        for row in self.scores.chunks(w) {
            let cells: Vec<String> = row.iter().map(|v| format!("{}", v)).collect();
            writeln!(f, "  {}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Totals of a passing run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SelfCheckReport {
    pub instances: usize,
    pub comparisons: usize,
}

struct Instance<'a> {
    n: usize,
    seed: u64,
    scores: &'a ArcScores,
    spec: Option<&'a ForestSpec>,
}

impl Instance<'_> {
    fn fail(
        &self,
        check: &'static str,
        expected: impl fmt::Display,
        got: impl fmt::Display,
    ) -> Counterexample {
        Counterexample {
            check,
            n: self.n,
            seed: self.seed,
            expected: expected.to_string(),
            got: got.to_string(),
            scores: self.scores.as_slice().to_vec(),
            forest: self.spec.map(|s| {
                (
                    s.segmentation().spans().to_vec(),
                    s.word_heads().map(|h| h.to_vec()).unwrap_or_default(),
                )
            }),
        }
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOLERANCE
}

fn max_table_diff(a: &ArcScores, b: &ArcScores) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn show<T: fmt::Display>(r: &Result<T>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => format!("error: {}", e),
    }
}

/// Runs every comparison for `n` in `1..=max_n` and `seeds` random
/// instances per length, stopping at the first disagreement.
pub fn run_selfcheck(
    max_n: usize,
    seeds: u64,
    imp: &dyn ChartImpl,
) -> Result<std::result::Result<SelfCheckReport, Box<Counterexample>>> {
    if max_n == 0 || max_n > MAX_N {
        return Err(Error::OracleRange(max_n));
    }
    let mut report = SelfCheckReport::default();
    for n in 1..=max_n {
        let trees = enumerate_projective(n)?;
        let tagged = enumerate_c2f(n, true)?;
        for seed in 0..seeds {
            let mut r = rng(seed.wrapping_mul(1_000_003).wrapping_add(n as u64));
            let scores = random_scores(&mut r, n);
            let spec = random_spec(&mut r, n);
            let c2f = random_c2f_scores(&mut r, n);
            report.instances += 1;

            let plain = Instance {
                n,
                seed,
                scores: &scores,
                spec: None,
            };
            let want = brute_log_z(&trees, &scores)?;
            let got = imp.inside(&scores);
            report.comparisons += 1;
            if !close(want, got) {
                return Ok(Err(Box::new(plain.fail("inside", want, got))));
            }
            let (_, best) = brute_argmax(&trees, &scores)?;
            let got = imp.eisner(&scores).map(|p| p.score);
            report.comparisons += 1;
            if got.as_ref().ok() != Some(&best) {
                return Ok(Err(Box::new(plain.fail("eisner_decode", best, show(&got)))));
            }
            let want = brute_marginals(&trees, &scores)?;
            let got = imp.marginals(&scores, None);
            report.comparisons += 1;
            match &got {
                Ok(m) if max_table_diff(&m.probs, &want) <= TOLERANCE => {}
                Ok(m) => {
                    let d = max_table_diff(&m.probs, &want);
                    return Ok(Err(Box::new(plain.fail(
                        "arc_marginals",
                        "difference 0",
                        format!("difference {}", d),
                    ))));
                }
                Err(e) => {
                    return Ok(Err(Box::new(plain.fail(
                        "arc_marginals",
                        "marginals",
                        format!("error: {}", e),
                    ))))
                }
            }

            let con = Instance {
                spec: Some(&spec),
                ..plain
            };
            let kept = filter_compatible(&trees, &spec);
            let want = brute_log_z(&kept, &scores)?;
            let got = imp.constrained_inside(&scores, &spec);
            report.comparisons += 1;
            if !got.as_ref().is_ok_and(|g| close(want, *g)) {
                return Ok(Err(Box::new(con.fail(
                    "constrained_inside",
                    want,
                    show(&got),
                ))));
            }
            let (_, best) = brute_argmax(&kept, &scores)?;
            let got = imp.constrained_eisner(&scores, &spec).map(|p| p.score);
            report.comparisons += 1;
            if got.as_ref().ok() != Some(&best) {
                return Ok(Err(Box::new(con.fail(
                    "constrained_eisner",
                    best,
                    show(&got),
                ))));
            }
            let want = brute_marginals(&kept, &scores)?;
            let got = imp.marginals(&scores, Some(&spec));
            report.comparisons += 1;
            match &got {
                Ok(m) if max_table_diff(&m.probs, &want) <= TOLERANCE => {}
                Ok(m) => {
                    let d = max_table_diff(&m.probs, &want);
                    return Ok(Err(Box::new(con.fail(
                        "constrained arc_marginals",
                        "difference 0",
                        format!("difference {}", d),
                    ))));
                }
                Err(e) => {
                    return Ok(Err(Box::new(con.fail(
                        "constrained arc_marginals",
                        "marginals",
                        format!("error: {}", e),
                    ))))
                }
            }

            let dual = Instance {
                scores: c2f.inter(),
                spec: None,
                ..plain
            };
            let want = brute_c2f_log_z(&tagged, &c2f)?;
            let got = imp.c2f_inside(&c2f);
            report.comparisons += 1;
            if !close(want, got) {
                return Ok(Err(Box::new(dual.fail("c2f_inside", want, got))));
            }
            let (_, best) = brute_c2f_argmax(&tagged, &c2f)?;
            let got = imp.c2f_eisner(&c2f).map(|p| p.score);
            report.comparisons += 1;
            if got.as_ref().ok() != Some(&best) {
                return Ok(Err(Box::new(dual.fail("c2f_eisner", best, show(&got)))));
            }
        }
    }
    Ok(Ok(report))
}
