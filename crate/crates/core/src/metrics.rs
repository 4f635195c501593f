//! Evaluation: segmentation F1, word-level dependency F1, attachment scores,
//! complete match and intra-word structure statistics.
//!
//! Sentence-level counts merge by addition, so corpus aggregation is
//! order-independent and may be computed in parallel.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::types::{IntraStructure, Segmentation, WordTree};

/// Precision, recall and F1 in [0, 1].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Matched / gold / predicted item counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counts {
    pub correct: usize,
    pub gold: usize,
    pub pred: usize,
}

impl Counts {
    pub fn merge(self, other: Counts) -> Counts {
        Counts {
            correct: self.correct + other.correct,
            gold: self.gold + other.gold,
            pred: self.pred + other.pred,
        }
    }

    /// F1 is 0 when nothing was predicted or expected.
    pub fn prf(&self) -> Prf {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(self.correct, self.pred);
        let recall = ratio(self.correct, self.gold);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Prf {
            precision,
            recall,
            f1,
        }
    }
}

/// Labels that mark punctuation arcs, excluded from dependency scores.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PunctLabels(BTreeSet<String>);

impl Default for PunctLabels {
    fn default() -> Self {
        PunctLabels::new(["punct", "P"])
    }
}

impl PunctLabels {
    pub fn new<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        PunctLabels(labels.into_iter().map(Into::into).collect())
    }

    pub fn none() -> Self {
        PunctLabels(BTreeSet::new())
    }

    pub fn contains(&self, label: &str) -> bool {
        self.0.contains(label)
    }
}

fn check_lengths(a: &Segmentation, b: &Segmentation) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(())
}

/// Span-exact word counts.
pub fn seg_counts(gold: &Segmentation, pred: &Segmentation) -> Result<Counts> {
    check_lengths(gold, pred)?;
    let g: BTreeSet<_> = gold.spans().iter().collect();
    let correct = pred.spans().iter().filter(|s| g.contains(s)).count();
    Ok(Counts {
        correct,
        gold: gold.num_words(),
        pred: pred.num_words(),
    })
}

pub fn seg_f1(gold: &Segmentation, pred: &Segmentation) -> Result<Prf> {
    Ok(seg_counts(gold, pred)?.prf())
}

type WordArc = ((usize, usize), (usize, usize), String);

fn word_arcs(tree: &WordTree, labeled: bool, punct: &PunctLabels) -> BTreeSet<WordArc> {
    let seg = tree.segmentation();
    (1..=tree.num_words())
        .filter(|&w| !punct.contains(tree.label(w)))
        .map(|w| {
            let h = tree.head(w);
            let head_span = if h == 0 { (0, 0) } else { seg.span(h) };
            let label = if labeled {
                tree.label(w).to_owned()
            } else {
                String::new()
            };
            (head_span, seg.span(w), label)
        })
        .collect()
}

/// Word-level dependency counts: an arc is correct when its head and
/// modifier word spans (and label, if `labeled`) match a gold arc.
pub fn dep_counts(
    gold: &WordTree,
    pred: &WordTree,
    labeled: bool,
    punct: &PunctLabels,
) -> Result<Counts> {
    check_lengths(gold.segmentation(), pred.segmentation())?;
    let g = word_arcs(gold, labeled, punct);
    let p = word_arcs(pred, labeled, punct);
    Ok(Counts {
        correct: p.intersection(&g).count(),
        gold: g.len(),
        pred: p.len(),
    })
}

/// UF (`labeled = false`) or LF (`labeled = true`).
pub fn dep_f1(gold: &WordTree, pred: &WordTree, labeled: bool, punct: &PunctLabels) -> Result<f64> {
    Ok(dep_counts(gold, pred, labeled, punct)?.prf().f1)
}

/// Correct-head and correct-head-and-label counts over non-punctuation gold
/// words: `(unlabeled, labeled, total)`.
pub fn attachment_counts(
    gold: &WordTree,
    pred: &WordTree,
    punct: &PunctLabels,
) -> Result<(usize, usize, usize)> {
    if gold.segmentation() != pred.segmentation() {
        return Err(Error::InvalidSegmentation(
            "attachment scores need identical segmentations".into(),
        ));
    }
    let mut counts = (0, 0, 0);
    for w in 1..=gold.num_words() {
        if punct.contains(gold.label(w)) {
            continue;
        }
        counts.2 += 1;
        if gold.head(w) == pred.head(w) {
            counts.0 += 1;
            if gold.label(w) == pred.label(w) {
                counts.1 += 1;
            }
        }
    }
    Ok(counts)
}

/// `(UAS, LAS)`; both 1 for a sentence of punctuation only.
pub fn attachment_scores(
    gold: &WordTree,
    pred: &WordTree,
    punct: &PunctLabels,
) -> Result<(f64, f64)> {
    let (u, l, t) = attachment_counts(gold, pred, punct)?;
    if t == 0 {
        return Ok((1.0, 1.0));
    }
    Ok((u as f64 / t as f64, l as f64 / t as f64))
}

/// Segmentation identical and every non-punctuation word correctly attached.
pub fn complete_match(gold: &WordTree, pred: &WordTree, punct: &PunctLabels) -> bool {
    match attachment_counts(gold, pred, punct) {
        Ok((u, _, t)) => u == t,
        Err(_) => false,
    }
}

/// Canonical encoding of an intra-word structure: the 1-based local head of
/// every character, `0` marking the root (e.g. `2,0` is a two-character word
/// rooted at its second character).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Shape(pub Vec<usize>);

impl Shape {
    pub fn of(structure: &IntraStructure) -> Shape {
        Shape(structure.local_heads())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|h| h.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Shape counts per word length; single-character words are excluded.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StructureHistogram {
    counts: BTreeMap<usize, BTreeMap<Shape, usize>>,
}

impl StructureHistogram {
    pub fn add(&mut self, shape: Shape) {
        if shape.len() > 1 {
            *self
                .counts
                .entry(shape.len())
                .or_default()
                .entry(shape)
                .or_default() += 1;
        }
    }

    pub fn merge(mut self, other: StructureHistogram) -> Self {
        for (_, shapes) in other.counts {
            for (shape, c) in shapes {
                if shape.len() > 1 {
                    *self
                        .counts
                        .entry(shape.len())
                        .or_default()
                        .entry(shape)
                        .or_default() += c;
                }
            }
        }
        self
    }

    pub fn lengths(&self) -> impl Iterator<Item = usize> + '_ {
        self.counts.keys().copied()
    }

    pub fn count(&self, shape: &Shape) -> usize {
        self.counts
            .get(&shape.len())
            .and_then(|m| m.get(shape))
            .copied()
            .unwrap_or(0)
    }

    /// Percentages of each shape among words of `length`, in shape order.
    pub fn percentages(&self, length: usize) -> Vec<(Shape, f64)> {
        let Some(shapes) = self.counts.get(&length) else {
            return Vec::new();
        };
        let total: usize = shapes.values().sum();
        shapes
            .iter()
            .map(|(s, &c)| (s.clone(), 100.0 * c as f64 / total as f64))
            .collect()
    }

    /// `length<TAB>shape<TAB>count<TAB>percent` rows.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("length\tshape\tcount\tpercent\n");
        for (&len, shapes) in &self.counts {
            let total: usize = shapes.values().sum();
            for (shape, &c) in shapes {
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{:.2}",
                    len,
                    shape,
                    c,
                    100.0 * c as f64 / total as f64
                );
            }
        }
        out
    }
}

/// Histogram of intra-word structures.
pub fn structure_distribution<'a, I>(structures: I) -> StructureHistogram
where
    I: IntoIterator<Item = &'a IntraStructure>,
{
    let mut h = StructureHistogram::default();
    for s in structures {
        h.add(Shape::of(s));
    }
    h
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mapping {
    /// Exact-match rate per run, averaged over runs.
    OneToOne,
    /// A word matches if any run predicts its gold structure.
    ManyToOne,
}

/// Complete-match percentage of predicted structures against annotations.
/// `runs[r][i]` is the prediction of run `r` for word occurrence `i`;
/// occurrences with no annotation (`gold[i] == None`) are skipped.
pub fn structure_cm(runs: &[Vec<Shape>], gold: &[Option<Shape>], mapping: Mapping) -> Result<f64> {
    if runs.is_empty() {
        return Err(Error::LengthMismatch {
            expected: 1,
            got: 0,
        });
    }
    for run in runs {
        if run.len() != gold.len() {
            return Err(Error::LengthMismatch {
                expected: gold.len(),
                got: run.len(),
            });
        }
    }
    let evaluated: Vec<usize> = (0..gold.len()).filter(|&i| gold[i].is_some()).collect();
    if evaluated.is_empty() {
        return Ok(0.0);
    }
    let hit = |run: &Vec<Shape>, i: usize| gold[i].as_ref() == Some(&run[i]);
    let total = evaluated.len() as f64;
    Ok(match mapping {
        Mapping::OneToOne => {
            let sum: f64 = runs
                .iter()
                .map(|run| evaluated.iter().filter(|&&i| hit(run, i)).count() as f64 / total)
                .sum();
            100.0 * sum / runs.len() as f64
        }
        Mapping::ManyToOne => {
            let matched = evaluated
                .iter()
                .filter(|&&i| runs.iter().any(|run| hit(run, i)))
                .count();
            100.0 * matched as f64 / total
        }
    })
}

/// Corpus-level scores.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub sentences: usize,
    pub seg: Counts,
    pub unlabeled: Counts,
    pub labeled: Counts,
    /// Present when every predicted segmentation equals the gold one.
    pub attachment: Option<(f64, f64)>,
    /// Fraction of sentences matched completely.
    pub complete_match: f64,
}

impl Evaluation {
    /// `key: value` lines in a fixed order.
    pub fn to_text(&self) -> String {
        let seg = self.seg.prf();
        let mut out = String::new();
        let _ = writeln!(out, "sentences: {}", self.sentences);
        let _ = writeln!(out, "seg_precision: {:.6}", seg.precision);
        let _ = writeln!(out, "seg_recall: {:.6}", seg.recall);
        let _ = writeln!(out, "seg_f1: {:.6}", seg.f1);
        let _ = writeln!(out, "uf: {:.6}", self.unlabeled.prf().f1);
        let _ = writeln!(out, "lf: {:.6}", self.labeled.prf().f1);
        match self.attachment {
            Some((u, l)) => {
                let _ = writeln!(out, "uas: {:.6}", u);
                let _ = writeln!(out, "las: {:.6}", l);
            }
            None => {
                let _ = writeln!(out, "uas: n/a");
                let _ = writeln!(out, "las: n/a");
            }
        }
        let _ = writeln!(out, "complete_match: {:.6}", self.complete_match);
        out
    }
}

/// Scores `pred` against `gold`, sentence by sentence.
pub fn evaluate(gold: &[WordTree], pred: &[WordTree], punct: &PunctLabels) -> Result<Evaluation> {
    if gold.len() != pred.len() {
        return Err(Error::LengthMismatch {
            expected: gold.len(),
            got: pred.len(),
        });
    }
    let mut seg = Counts::default();
    let mut unlabeled = Counts::default();
    let mut labeled = Counts::default();
    let mut att = Some((0usize, 0usize, 0usize));
    let mut cm = 0usize;
    for (g, p) in gold.iter().zip(pred) {
        seg = seg.merge(seg_counts(g.segmentation(), p.segmentation())?);
        unlabeled = unlabeled.merge(dep_counts(g, p, false, punct)?);
        labeled = labeled.merge(dep_counts(g, p, true, punct)?);
        att = match (att, attachment_counts(g, p, punct)) {
            (Some(a), Ok(b)) => Some((a.0 + b.0, a.1 + b.1, a.2 + b.2)),
            _ => None,
        };
        if complete_match(g, p, punct) {
            cm += 1;
        }
    }
    let attachment = att.map(|(u, l, t)| {
        if t == 0 {
            (1.0, 1.0)
        } else {
            (u as f64 / t as f64, l as f64 / t as f64)
        }
    });
    Ok(Evaluation {
        sentences: gold.len(),
        seg,
        unlabeled,
        labeled,
        attachment,
        complete_match: if gold.is_empty() {
            0.0
        } else {
            cm as f64 / gold.len() as f64
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::*;
    use proptest::prelude::*;

    fn seg(lengths: &[usize]) -> Segmentation {
        Segmentation::from_lengths(lengths).unwrap()
    }

    #[test]
    fn seg_f1_examples() {
        let gold = seg(&[2, 2]);
        assert_eq!(seg_f1(&gold, &gold).unwrap().f1, 1.0);
        let p = seg_f1(&gold, &seg(&[1, 1, 2])).unwrap();
        assert!((p.precision - 1.0 / 3.0).abs() < 1e-12);
        assert!((p.recall - 0.5).abs() < 1e-12);
        assert!((p.f1 - 0.4).abs() < 1e-12);
        assert_eq!(seg_f1(&seg(&[2, 2]), &seg(&[1, 2, 1])).unwrap().f1, 0.0);
        assert!(seg_f1(&gold, &seg(&[3])).is_err());
    }

    #[test]
    fn dep_f1_examples() {
        let gold = figure_word_tree();
        let none = PunctLabels::none();
        assert_eq!(dep_f1(&gold, &gold, true, &none).unwrap(), 1.0);
        // Split 金融业 into 金融 + 业: the dobj arc and nothing else changes.
        let pred = WordTree::new(
            seg(&[2, 2, 2, 2, 1]),
            vec![0, 2, 0, 2, 3, 4],
            ["", "nsubj", "root", "ccomp", "dobj", "dep"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        )
        .unwrap();
        let c = dep_counts(&gold, &pred, false, &none).unwrap();
        assert_eq!(
            c,
            Counts {
                correct: 3,
                gold: 4,
                pred: 5
            }
        );
        let f = dep_f1(&gold, &pred, false, &none).unwrap();
        assert!((f - 2.0 * 0.6 * 0.75 / 1.35).abs() < 1e-12);
    }

    #[test]
    fn punctuation_is_removed() {
        let gold = WordTree::new(
            seg(&[1, 1]),
            vec![0, 0, 1],
            vec!["".into(), "root".into(), "punct".into()],
        )
        .unwrap();
        let pred = WordTree::new(
            seg(&[1, 1]),
            vec![0, 2, 0],
            vec!["".into(), "dep".into(), "root".into()],
        )
        .unwrap();
        let c = dep_counts(&gold, &pred, false, &PunctLabels::default()).unwrap();
        assert_eq!(c.gold, 1);
        assert_eq!(c.pred, 2);
        let (u, _) = attachment_scores(&gold, &pred, &PunctLabels::default()).unwrap();
        assert_eq!(u, 0.0);
    }

    #[test]
    fn attachment_examples() {
        let s = seg(&[1, 1, 1, 1, 1]);
        let labels: Vec<String> = ["", "a", "root", "b", "c", "d"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let gold = WordTree::new(s.clone(), vec![0, 2, 0, 2, 3, 4], labels.clone()).unwrap();
        let mut heads = gold.heads().to_vec();
        heads[5] = 3;
        let pred = WordTree::new(s.clone(), heads, labels).unwrap();
        let (u, l) = attachment_scores(&gold, &pred, &PunctLabels::none()).unwrap();
        assert!((u - 0.8).abs() < 1e-12);
        assert!(l <= u);
        assert_eq!(
            attachment_scores(&gold, &gold, &PunctLabels::none()).unwrap(),
            (1.0, 1.0)
        );
        let other = figure_word_tree();
        assert!(attachment_scores(
            &other,
            &WordTree::new(seg(&[1; 9]), vec![0; 10], vec![String::new(); 10]).unwrap(),
            &PunctLabels::none()
        )
        .is_err());
    }

    fn structure(local: &[usize]) -> IntraStructure {
        IntraStructure::from_local_heads(1, local).unwrap()
    }

    #[test]
    fn distribution() {
        let same: Vec<_> = (0..5).map(|_| structure(&[0, 1])).collect();
        let h = structure_distribution(&same);
        assert_eq!(h.percentages(2), vec![(Shape(vec![0, 1]), 100.0)]);

        let mixed = vec![
            structure(&[0, 1]),
            structure(&[2, 0]),
            structure(&[2, 0]),
            structure(&[0]),
            structure(&[2, 0, 2]),
        ];
        let h = structure_distribution(&mixed);
        assert_eq!(h.lengths().collect::<Vec<_>>(), vec![2, 3]);
        assert_eq!(h.count(&Shape(vec![2, 0])), 2);
        assert_eq!(h.count(&Shape(vec![0])), 0);
        let p = h.percentages(2);
        assert!((p.iter().map(|x| x.1).sum::<f64>() - 100.0).abs() < 1e-9);
        assert!((p[1].1 - 200.0 / 3.0).abs() < 1e-9);
        assert_eq!(Shape(vec![2, 0, 2]).to_string(), "2,0,2");
    }

    #[test]
    fn complete_match_mappings() {
        let a = Shape(vec![0, 1]);
        let b = Shape(vec![2, 0]);
        let gold = vec![Some(a.clone()), Some(a.clone()), None];
        let run1 = vec![a.clone(), b.clone(), b.clone()];
        let run2 = vec![b.clone(), a.clone(), a.clone()];
        assert_eq!(
            structure_cm(std::slice::from_ref(&run1), &gold, Mapping::OneToOne).unwrap(),
            50.0
        );
        let runs = [run1, run2];
        assert_eq!(structure_cm(&runs, &gold, Mapping::OneToOne).unwrap(), 50.0);
        assert_eq!(
            structure_cm(&runs, &gold, Mapping::ManyToOne).unwrap(),
            100.0
        );
        let perfect = vec![vec![a.clone(), a.clone(), b]];
        assert_eq!(
            structure_cm(&perfect, &gold, Mapping::OneToOne).unwrap(),
            100.0
        );
    }

    #[test]
    fn evaluation_report() {
        let gold = vec![figure_word_tree()];
        let e = evaluate(&gold, &gold, &PunctLabels::default()).unwrap();
        assert_eq!(e.attachment, Some((1.0, 1.0)));
        assert_eq!(e.complete_match, 1.0);
        let text = e.to_text();
        assert!(text.contains("seg_f1: 1.000000"));
        assert!(text.contains("lf: 1.000000"));
        assert!(evaluate(&gold, &[], &PunctLabels::default()).is_err());
    }

    proptest! {
        #[test]
        fn metric_properties(seed in any::<u64>(), n in 1usize..=10) {
            let mut r = rng(seed);
            let gold = random_word_tree(&mut r, n);
            let pred = random_word_tree(&mut r, n);
            let punct = PunctLabels::new(["ccomp"]);
            let uf = dep_f1(&gold, &pred, false, &punct).unwrap();
            let lf = dep_f1(&gold, &pred, true, &punct).unwrap();
            prop_assert!(lf <= uf);
            prop_assert!((0.0..=1.0).contains(&uf));
            let f = seg_f1(gold.segmentation(), pred.segmentation()).unwrap().f1;
            prop_assert!((0.0..=1.0).contains(&f));
            // An arc can only match if both of its word spans exist in the prediction.
            let c = dep_counts(&gold, &pred, false, &punct).unwrap();
            let spans: BTreeSet<_> = pred.segmentation().spans().iter().copied().collect();
            let g = gold.segmentation();
            let possible = (1..=gold.num_words())
                .filter(|&w| !punct.contains(gold.label(w)))
                .filter(|&w| spans.contains(&g.span(w)) && (gold.head(w) == 0 || spans.contains(&g.span(gold.head(w)))))
                .count();
            prop_assert!(c.correct <= possible);
            // Order invariance.
            let pair = vec![gold.clone(), pred.clone()];
            let rev = vec![pred.clone(), gold.clone()];
            let a = evaluate(&pair, &rev, &punct).unwrap();
            let b = evaluate(&rev, &pair, &punct).unwrap();
            prop_assert_eq!(a.seg.correct, b.seg.correct);
            prop_assert_eq!(a.unlabeled.correct, b.unlabeled.correct);
        }
    }
}
