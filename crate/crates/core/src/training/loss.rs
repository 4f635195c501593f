//! Forest CRF objectives and their gradients with respect to score tables.
//!
//! The tree loss is `log Z(x) - log Z(x, F)`. The labeled loss folds the
//! log-probability of the gold label of every arc into its score before the
//! constrained sum, so the forest term marginalises over latent intra-word
//! structure and labels jointly:
//! `L = log Z(x; s) - log Z(x, F; s + log p(l* | h, m))`, where `l*` is
//! [`INTRA`](crate::types::INTRA) inside a word and the gold word-level label
//! between words.

use crate::chart::{arc_marginals, c2f_marginals, constrained_inside, inside, merge_c2f_scores};
use crate::error::{Error, Result};
use crate::types::{
    ArcScores, C2fArcScores, CharTree, ForestSpec, LabelId, LabelScores, LabelSet, WordTree,
    INTRA_ID,
};

/// Loss of one sentence. With the integrated labeled objective the tree and
/// label parts are not separable and are reported as `None`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossBreakdown {
    pub tree_loss: Option<f64>,
    pub label_loss: Option<f64>,
    /// Segmentation tagging loss, when the scorer has a tagger.
    pub tag_loss: Option<f64>,
    pub total: f64,
}

/// `log Z(x) - log Z(x, F)`; non-negative.
pub fn tree_loss(scores: &ArcScores, spec: &ForestSpec) -> Result<f64> {
    let z = inside(scores);
    let zf = constrained_inside(scores, spec)?;
    Ok(z - zf)
}

/// Tree loss and its gradient: unconstrained minus constrained marginals.
pub fn tree_loss_grad(scores: &ArcScores, spec: &ForestSpec) -> Result<(f64, ArcScores)> {
    let all = arc_marginals(scores, None)?;
    let forest = arc_marginals(scores, Some(spec))?;
    let n = scores.n();
    let grad = ArcScores::from_fn(n, |h, m| all.probs.get(h, m) - forest.probs.get(h, m));
    Ok((all.log_z - forest.log_z, grad))
}

/// Gold label id of every admissible arc: `gold_labels[h][m]`.
pub(crate) fn gold_label_table(
    spec: &ForestSpec,
    gold: &WordTree,
    labels: &LabelSet,
) -> Result<Vec<Option<LabelId>>> {
    let n = spec.n();
    let seg = spec.segmentation();
    let mut word_label = vec![0; seg.num_words() + 1];
    for w in 1..=seg.num_words() {
        let name = gold.label(w);
        if name.is_empty() {
            let (b, _) = seg.span(w);
            return Err(Error::MissingLabel {
                head: gold.head(w),
                modifier: b,
            });
        }
        word_label[w] = labels.require(name)?;
    }
    let mut table = vec![None; (n + 1) * (n + 1)];
    let mask = spec.admissibility_mask();
    for h in 0..=n {
        for m in 1..=n {
            let idx = h * (n + 1) + m;
            if !mask[idx] {
                continue;
            }
            table[idx] = Some(if seg.same_word(h, m) {
                INTRA_ID
            } else {
                word_label[seg.word_of(m)]
            });
        }
    }
    Ok(table)
}

fn check_label_dims(arcs_n: usize, labels: &LabelScores, set: &LabelSet) -> Result<()> {
    if labels.n() != arcs_n {
        return Err(Error::LengthMismatch {
            expected: arcs_n,
            got: labels.n(),
        });
    }
    if labels.num_labels() != set.len() {
        return Err(Error::LengthMismatch {
            expected: set.len(),
            got: labels.num_labels(),
        });
    }
    Ok(())
}

/// Arc scores augmented with gold-label log-probabilities; inadmissible
/// arcs keep their plain score (they are masked by the constrained chart).
fn augmented(base: &ArcScores, labels: &LabelScores, gold: &[Option<LabelId>]) -> ArcScores {
    let n = base.n();
    ArcScores::from_fn(n, |h, m| match gold[h * (n + 1) + m] {
        Some(l) => base.get(h, m) + labels.log_prob(h, m, l),
        None => base.get(h, m),
    })
}

/// Gradient of the labeled loss with respect to label scores, given the
/// constrained marginals `nu` of the augmented chart.
fn label_grad(labels: &LabelScores, gold: &[Option<LabelId>], nu: &ArcScores) -> LabelScores {
    let n = labels.n();
    let mut g = LabelScores::zeros(n, labels.num_labels());
    for h in 0..=n {
        for m in 1..=n {
            let Some(gl) = gold[h * (n + 1) + m] else {
                continue;
            };
            let w = nu.get(h, m);
            if w == 0.0 {
                continue;
            }
            let row = labels.row(h, m);
            let lse = crate::types::log_sum_exp(row);
            let out = g.row_mut(h, m);
            for (l, &s) in row.iter().enumerate() {
                let p = (s - lse).exp();
                out[l] = w * (p - if l == gl { 1.0 } else { 0.0 });
            }
        }
    }
    g
}

/// Integrated labeled forest loss for a single score table.
pub fn labeled_forest_loss(
    scores: &ArcScores,
    labels: &LabelScores,
    label_set: &LabelSet,
    spec: &ForestSpec,
    gold: &WordTree,
) -> Result<f64> {
    check_label_dims(scores.n(), labels, label_set)?;
    let table = gold_label_table(spec, gold, label_set)?;
    let aug = augmented(scores, labels, &table);
    Ok(inside(scores) - constrained_inside(&aug, spec)?)
}

/// Labeled loss with gradients `(loss, d/d arc scores, d/d label scores)`.
pub fn labeled_forest_loss_grad(
    scores: &ArcScores,
    labels: &LabelScores,
    label_set: &LabelSet,
    spec: &ForestSpec,
    gold: &WordTree,
) -> Result<(f64, ArcScores, LabelScores)> {
    check_label_dims(scores.n(), labels, label_set)?;
    let table = gold_label_table(spec, gold, label_set)?;
    let aug = augmented(scores, labels, &table);
    let all = arc_marginals(scores, None)?;
    let forest = arc_marginals(&aug, Some(spec))?;
    let n = scores.n();
    let arc_grad = ArcScores::from_fn(n, |h, m| all.probs.get(h, m) - forest.probs.get(h, m));
    let lgrad = label_grad(labels, &table, &forest.probs);
    Ok((all.log_z - forest.log_z, arc_grad, lgrad))
}

/// Gradients of the coarse-to-fine labeled loss.
#[derive(Clone, Debug)]
pub struct C2fGrad {
    pub intra: ArcScores,
    pub inter: ArcScores,
    pub labels: LabelScores,
}

/// Coarse-to-fine labeled loss: the partition function runs over all
/// coarse-to-fine derivations; the forest term routes every arc to the
/// score of the role the gold segmentation assigns it.
pub fn labeled_forest_loss_c2f_grad(
    scores: &C2fArcScores,
    labels: &LabelScores,
    label_set: &LabelSet,
    spec: &ForestSpec,
    gold: &WordTree,
) -> Result<(f64, C2fGrad)> {
    check_label_dims(scores.n(), labels, label_set)?;
    let table = gold_label_table(spec, gold, label_set)?;
    let merged = merge_c2f_scores(scores, spec)?;
    let aug = augmented(&merged, labels, &table);
    let all = c2f_marginals(scores)?;
    let forest = arc_marginals(&aug, Some(spec))?;
    let n = scores.n();
    let seg = spec.segmentation();
    let nu = |h: usize, m: usize, intra: bool| {
        if seg.same_word(h, m) == intra {
            forest.probs.get(h, m)
        } else {
            0.0
        }
    };
    let intra = ArcScores::from_fn(n, |h, m| all.intra.get(h, m) - nu(h, m, true));
    let inter = ArcScores::from_fn(n, |h, m| all.inter.get(h, m) - nu(h, m, false));
    let lgrad = label_grad(labels, &table, &forest.probs);
    Ok((
        all.log_z - forest.log_z,
        C2fGrad {
            intra,
            inter,
            labels: lgrad,
        },
    ))
}

pub fn labeled_forest_loss_c2f(
    scores: &C2fArcScores,
    labels: &LabelScores,
    label_set: &LabelSet,
    spec: &ForestSpec,
    gold: &WordTree,
) -> Result<f64> {
    check_label_dims(scores.n(), labels, label_set)?;
    let table = gold_label_table(spec, gold, label_set)?;
    let merged = merge_c2f_scores(scores, spec)?;
    let aug = augmented(&merged, labels, &table);
    Ok(crate::chart::c2f_inside(scores) - constrained_inside(&aug, spec)?)
}

/// Assigns every arc of `heads` its highest-scoring label (lowest id on ties).
pub fn label_decode(
    labels: &LabelScores,
    label_set: &LabelSet,
    heads: &[usize],
) -> Result<CharTree> {
    if labels.n() + 1 != heads.len() {
        return Err(Error::LengthMismatch {
            expected: labels.n() + 1,
            got: heads.len(),
        });
    }
    let mut names = vec![String::new(); heads.len()];
    for m in 1..heads.len() {
        names[m] = label_set.name(argmax(labels.row(heads[m], m))).to_owned();
    }
    CharTree::new(heads.to_vec(), names)
}

/// Best syntactic (non-INTRA) label of arc `h -> m`.
pub fn best_syntactic_label(
    labels: &LabelScores,
    label_set: &LabelSet,
    h: usize,
    m: usize,
) -> LabelId {
    let row = labels.row(h, m);
    if row.len() <= 1 {
        return label_set.root_label();
    }
    1 + argmax(&row[1..])
}

fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = i;
        }
    }
    best
}
