//! Turning scorer outputs into labeled character and word trees.

use super::loss::{best_syntactic_label, label_decode};
use super::scorer::{ArcTables, Scores};
use crate::chart::{c2f_eisner, constrained_eisner, eisner_decode, merge_c2f_scores, ArcRole};
use crate::convert::{recover_with_fallback, recover_word_tree, Fallback};
use crate::error::{Error, Result};
use crate::types::{
    Bmes, CharTree, ForestSpec, LabelScores, LabelSet, Segmentation, WordTree, INTRA,
};

/// A decoded sentence.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub char_tree: CharTree,
    pub word_tree: WordTree,
    /// Whether intra-word labels had to be replaced to obtain a word tree.
    pub fallback_used: bool,
}

/// Best well-formed BMES sequence under per-character tag scores; ties go
/// to the lower tag index.
pub fn bmes_viterbi(tags: &[[f64; 4]]) -> Vec<Bmes> {
    let n = tags.len();
    if n == 0 {
        return Vec::new();
    }
    let mut best = vec![[f64::NEG_INFINITY; 4]; n];
    let mut back = vec![[0usize; 4]; n];
    for t in Bmes::ALL {
        if t.may_start() {
            best[0][t.index()] = tags[0][t.index()];
        }
    }
    for i in 1..n {
        for t in Bmes::ALL {
            for p in Bmes::ALL {
                if !p.may_precede(t) {
                    continue;
                }
                let v = best[i - 1][p.index()] + tags[i][t.index()];
                if v > best[i][t.index()] {
                    best[i][t.index()] = v;
                    back[i][t.index()] = p.index();
                }
            }
        }
    }
    let mut last = None;
    for t in Bmes::ALL {
        if t.may_end() && last.is_none_or(|l: Bmes| best[n - 1][t.index()] > best[n - 1][l.index()])
        {
            last = Some(t);
        }
    }
    let mut out = vec![last.expect("S may end a sequence"); n];
    for i in (1..n).rev() {
        out[i - 1] = Bmes::ALL[back[i][out[i].index()]];
    }
    out
}

/// Labels arcs by role: INTRA for intra-word arcs, the best syntactic
/// label otherwise.
fn role_labels(
    heads: &[usize],
    intra: impl Fn(usize, usize) -> bool,
    labels: &LabelScores,
    set: &LabelSet,
) -> Result<CharTree> {
    let mut names = vec![String::new(); heads.len()];
    for m in 1..heads.len() {
        let h = heads[m];
        names[m] = if intra(h, m) {
            INTRA.to_owned()
        } else {
            set.name(best_syntactic_label(labels, set, h, m)).to_owned()
        };
    }
    CharTree::new(heads.to_vec(), names)
}

fn finish(tree: CharTree, labels: &LabelScores, set: &LabelSet) -> Result<Prediction> {
    match recover_word_tree(&tree) {
        Ok(word_tree) => Ok(Prediction {
            char_tree: tree,
            word_tree,
            fallback_used: false,
        }),
        Err(Error::IllegalStructure { .. }) => {
            let default = set.name(set.root_label()).to_owned();
            let fallback = Fallback {
                scores: Some((labels, set)),
                default_label: &default,
            };
            let (word_tree, char_tree) = recover_with_fallback(&tree, &fallback)?;
            Ok(Prediction {
                char_tree,
                word_tree,
                fallback_used: true,
            })
        }
        Err(e) => Err(e),
    }
}

/// Decodes with a known segmentation: the chart is restricted to trees in
/// which every word is a single-rooted subtree whose root alone takes part
/// in inter-word arcs.
fn decode_segmented(scores: &Scores, set: &LabelSet, seg: &Segmentation) -> Result<Prediction> {
    if seg.len() != scores.arcs.n() {
        return Err(Error::LengthMismatch {
            expected: scores.arcs.n(),
            got: seg.len(),
        });
    }
    let spec = ForestSpec::segmentation_only(seg.clone());
    let parse = match &scores.arcs {
        ArcTables::Single(s) => constrained_eisner(s, &spec)?,
        ArcTables::Dual(s) => constrained_eisner(&merge_c2f_scores(s, &spec)?, &spec)?,
    };
    let tree = role_labels(
        &parse.heads,
        |h, m| h != 0 && seg.same_word(h, m),
        &scores.labels,
        set,
    )?;
    finish(tree, &scores.labels, set)
}

/// Decodes one sentence. With `gold_seg`, decoding is constrained to that
/// segmentation. Otherwise a tagger, when present, segments first; without
/// one the whole tree is decoded jointly and words are read off the labels
/// (single table) or arc roles (coarse-to-fine tables).
pub fn decode(
    scores: &Scores,
    set: &LabelSet,
    gold_seg: Option<&Segmentation>,
) -> Result<Prediction> {
    if let Some(seg) = gold_seg {
        return decode_segmented(scores, set, seg);
    }
    if let Some(tags) = &scores.tags {
        let seg = Segmentation::from_bmes(&bmes_viterbi(tags))?;
        return decode_segmented(scores, set, &seg);
    }
    match &scores.arcs {
        ArcTables::Single(s) => {
            let parse = eisner_decode(s)?;
            let tree = label_decode(&scores.labels, set, &parse.heads)?;
            finish(tree, &scores.labels, set)
        }
        ArcTables::Dual(s) => {
            let parse = c2f_eisner(s)?;
            let roles = parse.roles;
            let tree = role_labels(
                &parse.heads,
                |_, m| roles[m] == ArcRole::Intra,
                &scores.labels,
                set,
            )?;
            finish(tree, &scores.labels, set)
        }
    }
}
