//! Span-based dynamic programs over character positions.
//!
//! All algorithms share one engine: the deduction rules of a parser are
//! compiled, with the compatibility masks applied, into a packed forest
//! (see `hypergraph`), and max-product or sum-product passes run over it.
//! Scores are log-domain; masked entries behave as the semiring zero.

mod c2f;
mod eisner;
mod hypergraph;
mod masks;
mod semiring;

pub use c2f::ArcRole;
pub use masks::Constraints;
pub use semiring::{log_add, MaxProduct, Semiring, SumProduct};

use crate::error::{Error, Result};
use crate::types::{ArcScores, C2fArcScores, ForestSpec, MASKED};
use hypergraph::Hypergraph;
use masks::SpanMasks;

/// Best tree found by a max-product pass together with its chart value.
#[derive(Clone, Debug, PartialEq)]
pub struct Parse {
    /// Head of each character; slot 0 unused.
    pub heads: Vec<usize>,
    pub score: f64,
}

/// Best coarse-to-fine derivation: a tree plus the role of every arc.
#[derive(Clone, Debug, PartialEq)]
pub struct C2fParse {
    pub heads: Vec<usize>,
    /// Role of the arc entering each character; slot 0 unused.
    pub roles: Vec<ArcRole>,
    pub score: f64,
}

/// Log-partition function and arc posteriors.
#[derive(Clone, Debug)]
pub struct Marginals {
    pub log_z: f64,
    pub probs: ArcScores,
}

#[derive(Clone, Debug)]
pub struct C2fMarginals {
    pub log_z: f64,
    pub intra: ArcScores,
    pub inter: ArcScores,
}

fn check_len(scores: &ArcScores, spec: &ForestSpec) -> Result<()> {
    if scores.n() != spec.n() {
        return Err(Error::LengthMismatch {
            expected: spec.n(),
            got: scores.n(),
        });
    }
    Ok(())
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::LengthMismatch {
            expected: 1,
            got: 0,
        });
    }
    Ok(())
}

fn graph(n: usize, spec: Option<&ForestSpec>, constraints: Constraints) -> Hypergraph {
    let masks = match spec {
        Some(spec) => SpanMasks::from_spec(spec, constraints),
        None => SpanMasks::unconstrained(n),
    };
    eisner::build(n, &masks)
}

/// Chart root value of the (optionally constrained) first-order parser in
/// semiring `S`.
pub fn chart_value<S: Semiring>(
    scores: &ArcScores,
    spec: Option<&ForestSpec>,
    constraints: Constraints,
) -> Result<f64> {
    check_n(scores.n())?;
    if let Some(spec) = spec {
        check_len(scores, spec)?;
    }
    let g = graph(scores.n(), spec, constraints);
    let chart = g.inside::<S>(&eisner::weights(scores));
    Ok(g.goal_value(&chart))
}

fn decode(
    scores: &ArcScores,
    spec: Option<&ForestSpec>,
    constraints: Constraints,
) -> Result<Parse> {
    check_n(scores.n())?;
    if let Some(spec) = spec {
        check_len(scores, spec)?;
    }
    let n = scores.n();
    let g = graph(n, spec, constraints);
    let chart = g.inside::<MaxProduct>(&eisner::weights(scores));
    let score = g.goal_value(&chart);
    let slots = g.best_arcs(&chart)?;
    Ok(Parse {
        heads: eisner::heads_from_slots(n, &slots),
        score,
    })
}

/// Highest-scoring projective tree (single ROOT child).
pub fn eisner_decode(scores: &ArcScores) -> Result<Parse> {
    decode(scores, None, Constraints::NONE)
}

/// Highest-scoring tree compatible with `spec`.
pub fn constrained_eisner(scores: &ArcScores, spec: &ForestSpec) -> Result<Parse> {
    constrained_eisner_with(scores, spec, Constraints::default())
}

pub fn constrained_eisner_with(
    scores: &ArcScores,
    spec: &ForestSpec,
    constraints: Constraints,
) -> Result<Parse> {
    decode(scores, Some(spec), constraints)
}

/// `log Z(x)` over all projective trees. Returns negative infinity when
/// every tree is masked out.
pub fn inside(scores: &ArcScores) -> f64 {
    if scores.n() == 0 {
        return f64::NEG_INFINITY;
    }
    chart_value::<SumProduct>(scores, None, Constraints::NONE).unwrap_or(f64::NEG_INFINITY)
}

/// `log Z(x, F)` over the trees compatible with `spec`.
pub fn constrained_inside(scores: &ArcScores, spec: &ForestSpec) -> Result<f64> {
    constrained_inside_with(scores, spec, Constraints::default())
}

pub fn constrained_inside_with(
    scores: &ArcScores,
    spec: &ForestSpec,
    constraints: Constraints,
) -> Result<f64> {
    let log_z = chart_value::<SumProduct>(scores, Some(spec), constraints)?;
    if log_z == f64::NEG_INFINITY {
        return Err(Error::EmptyForest);
    }
    Ok(log_z)
}

/// Posterior probability of every arc, unconstrained or under `spec`.
///
/// Computed with an outside pass; entries equal the gradient of the
/// corresponding log-partition with respect to each arc score.
pub fn arc_marginals(scores: &ArcScores, spec: Option<&ForestSpec>) -> Result<Marginals> {
    arc_marginals_with(scores, spec, Constraints::default())
}

pub fn arc_marginals_with(
    scores: &ArcScores,
    spec: Option<&ForestSpec>,
    constraints: Constraints,
) -> Result<Marginals> {
    check_n(scores.n())?;
    if let Some(spec) = spec {
        check_len(scores, spec)?;
    }
    let n = scores.n();
    let g = graph(n, spec, constraints);
    let (log_z, probs) = g.marginals(&eisner::weights(scores))?;
    Ok(Marginals {
        log_z,
        probs: ArcScores::from_vec(n, probs)?,
    })
}

/// Best coarse-to-fine derivation with the root-as-head rule exclusion.
pub fn c2f_eisner(scores: &C2fArcScores) -> Result<C2fParse> {
    c2f_eisner_with(scores, true)
}

pub fn c2f_eisner_with(scores: &C2fArcScores, root_as_head: bool) -> Result<C2fParse> {
    let n = scores.n();
    check_n(n)?;
    let g = c2f::build(n, root_as_head);
    let chart = g.inside::<MaxProduct>(&c2f::weights(scores));
    let score = g.goal_value(&chart);
    let slots = g.best_arcs(&chart)?;
    let mut heads = vec![0; n + 1];
    let mut roles = vec![ArcRole::Inter; n + 1];
    for slot in slots {
        let (role, h, m) = c2f::decode_slot(n, slot);
        heads[m] = h;
        roles[m] = role;
    }
    Ok(C2fParse {
        heads,
        roles,
        score,
    })
}

/// `log` of the total weight of all coarse-to-fine derivations.
pub fn c2f_inside(scores: &C2fArcScores) -> f64 {
    c2f_inside_with(scores, true)
}

pub fn c2f_inside_with(scores: &C2fArcScores, root_as_head: bool) -> f64 {
    let n = scores.n();
    if n == 0 {
        return f64::NEG_INFINITY;
    }
    let g = c2f::build(n, root_as_head);
    let chart = g.inside::<SumProduct>(&c2f::weights(scores));
    g.goal_value(&chart)
}

/// Role-specific arc posteriors over coarse-to-fine derivations.
pub fn c2f_marginals(scores: &C2fArcScores) -> Result<C2fMarginals> {
    let n = scores.n();
    check_n(n)?;
    let g = c2f::build(n, true);
    let (log_z, probs) = g.marginals(&c2f::weights(scores))?;
    let sq = (n + 1) * (n + 1);
    Ok(C2fMarginals {
        log_z,
        inter: ArcScores::from_vec(n, probs[..sq].to_vec())?,
        intra: ArcScores::from_vec(n, probs[sq..].to_vec())?,
    })
}

/// Routes each admissible arc to the score of the role it plays under the
/// segmentation of `spec`; inadmissible arcs are masked.
pub fn merge_c2f_scores(scores: &C2fArcScores, spec: &ForestSpec) -> Result<ArcScores> {
    let n = scores.n();
    if n != spec.n() {
        return Err(Error::LengthMismatch {
            expected: spec.n(),
            got: n,
        });
    }
    let seg = spec.segmentation();
    Ok(ArcScores::from_fn(n, |h, m| {
        if !spec.admissible_unchecked(h, m) {
            MASKED
        } else if seg.same_word(h, m) {
            scores.intra().get(h, m)
        } else {
            scores.inter().get(h, m)
        }
    }))
}
