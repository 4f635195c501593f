//! Per-sentence training objective on top of a scorer's outputs.

use rayon::prelude::*;

use super::config::Mode;
use super::loss::{labeled_forest_loss_c2f_grad, labeled_forest_loss_grad, LossBreakdown};
use super::scorer::{ArcGrads, ArcTables, ScoreGrads, Scorer, Scores};
use crate::convert::{pseudo_forest, word_tree_to_forest, Direction};
use crate::error::{Error, Result};
use crate::types::{log_sum_exp, CharSentence, ForestSpec, LabelSet, WordTree};

/// A training sentence with its gold tree and the forest it induces.
#[derive(Clone, Debug)]
pub struct Example {
    pub sentence: CharSentence,
    pub gold: WordTree,
    pub spec: ForestSpec,
}

/// Training forest of a gold tree under `mode`.
pub fn training_forest(gold: &WordTree, mode: Mode) -> Result<ForestSpec> {
    match mode {
        Mode::Latent | Mode::LatentC2f | Mode::PipelineParse => word_tree_to_forest(gold),
        Mode::Leftward => pseudo_forest(gold, Direction::Leftward),
        Mode::Rightward => pseudo_forest(gold, Direction::Rightward),
    }
}

/// Builds training examples. Non-projective gold trees are skipped; the
/// number skipped is returned alongside.
pub fn prepare_examples(
    corpus: &[(CharSentence, WordTree)],
    mode: Mode,
) -> Result<(Vec<Example>, usize)> {
    let mut out = Vec::with_capacity(corpus.len());
    let mut skipped = 0;
    for (sentence, gold) in corpus {
        if sentence.len() != gold.segmentation().len() {
            return Err(Error::LengthMismatch {
                expected: sentence.len(),
                got: gold.segmentation().len(),
            });
        }
        if !gold.is_projective() {
            skipped += 1;
            continue;
        }
        out.push(Example {
            sentence: sentence.clone(),
            gold: gold.clone(),
            spec: training_forest(gold, mode)?,
        });
    }
    Ok((out, skipped))
}

/// Softmax cross-entropy of the gold BMES tags and its gradient.
fn tag_loss_grad(tags: &[[f64; 4]], gold: &WordTree) -> Result<(f64, Vec<[f64; 4]>)> {
    let targets = gold.segmentation().to_bmes();
    if targets.len() != tags.len() {
        return Err(Error::LengthMismatch {
            expected: targets.len(),
            got: tags.len(),
        });
    }
    let mut loss = 0.0;
    let mut grad = Vec::with_capacity(tags.len());
    for (row, t) in tags.iter().zip(&targets) {
        let lse = log_sum_exp(row);
        let gold = t.index();
        loss += lse - row[gold];
        let mut g = [0.0; 4];
        for (i, v) in row.iter().enumerate() {
            g[i] = (v - lse).exp() - if i == gold { 1.0 } else { 0.0 };
        }
        grad.push(g);
    }
    Ok((loss, grad))
}

/// Loss of one example and its gradient with respect to the scores.
pub fn example_loss_grad(
    scores: &Scores,
    labels: &LabelSet,
    ex: &Example,
) -> Result<(LossBreakdown, ScoreGrads)> {
    let (parse, arcs, label_grad) = match &scores.arcs {
        ArcTables::Single(s) => {
            let (l, ga, gl) =
                labeled_forest_loss_grad(s, &scores.labels, labels, &ex.spec, &ex.gold)?;
            (l, ArcGrads::Single(ga), gl)
        }
        ArcTables::Dual(s) => {
            let (l, g) =
                labeled_forest_loss_c2f_grad(s, &scores.labels, labels, &ex.spec, &ex.gold)?;
            (
                l,
                ArcGrads::Dual {
                    intra: g.intra,
                    inter: g.inter,
                },
                g.labels,
            )
        }
    };
    let (tag_loss, tags) = match &scores.tags {
        Some(t) => {
            let (l, g) = tag_loss_grad(t, &ex.gold)?;
            (Some(l), Some(g))
        }
        None => (None, None),
    };
    let breakdown = LossBreakdown {
        tree_loss: None,
        label_loss: None,
        tag_loss,
        total: parse + tag_loss.unwrap_or(0.0),
    };
    Ok((
        breakdown,
        ScoreGrads {
            arcs,
            labels: label_grad,
            tags,
        },
    ))
}

/// Mean loss over `examples` and its gradient with respect to the scorer
/// parameters. Per-example work runs in parallel; gradients are summed in
/// example order so the result does not depend on scheduling.
pub fn batch_loss_grad<S: Scorer>(
    scorer: &S,
    labels: &LabelSet,
    examples: &[&Example],
) -> Result<(f64, Vec<f64>)> {
    let dim = scorer.params().len();
    let parts: Vec<(f64, Vec<f64>)> = examples
        .par_iter()
        .map(|ex| {
            let scores = scorer.score(&ex.sentence)?;
            let (loss, up) = example_loss_grad(&scores, labels, ex)?;
            let mut grad = vec![0.0; dim];
            scorer.backprop(&ex.sentence, &up, &mut grad)?;
            Ok((loss.total, grad))
        })
        .collect::<Result<_>>()?;
    let mut total = 0.0;
    let mut grad = vec![0.0; dim];
    for (l, g) in parts {
        total += l;
        for (a, b) in grad.iter_mut().zip(&g) {
            *a += b;
        }
    }
    let scale = 1.0 / examples.len().max(1) as f64;
    grad.iter_mut().for_each(|g| *g *= scale);
    Ok((total * scale, grad))
}

/// Mean loss over `examples` without gradients.
pub fn mean_loss<S: Scorer>(scorer: &S, labels: &LabelSet, examples: &[Example]) -> Result<f64> {
    let losses: Vec<f64> = examples
        .par_iter()
        .map(|ex| {
            let scores = scorer.score(&ex.sentence)?;
            Ok(example_loss_grad(&scores, labels, ex)?.0.total)
        })
        .collect::<Result<_>>()?;
    Ok(losses.iter().sum::<f64>() / examples.len().max(1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{enumerate_projective, filter_compatible};
    use crate::testutil::*;
    use crate::training::{BiaffineScorer, BiaffineShape, ConstantScorer, TrainConfig, Vocab};

    fn corpus(seed: u64, count: usize, max_n: usize) -> Vec<(CharSentence, WordTree)> {
        let mut r = rng(seed);
        (0..count)
            .map(|i| {
                let n = 1 + (i * 3 + 2) % max_n;
                let gold = random_word_tree(&mut r, n);
                let text: String = (0..n)
                    .map(|j| char::from(b'a' + ((i + j * 5) % 7) as u8))
                    .collect();
                (text.parse().unwrap(), gold)
            })
            .collect()
    }

    #[test]
    fn constant_scorer_matches_closed_form() {
        let set = LabelSet::new(SYNTACTIC, "root").unwrap();
        let data = corpus(50, 6, 6);
        let (examples, skipped) = prepare_examples(&data, Mode::Latent).unwrap();
        assert_eq!(skipped, 0);
        let scorer = ConstantScorer {
            mode: Mode::Latent,
            num_labels: set.len(),
        };
        let mut want = 0.0;
        for ex in &examples {
            let n = ex.sentence.len();
            let trees = enumerate_projective(n).unwrap();
            let kept = filter_compatible(&trees, &ex.spec).len();
            want += (trees.len() as f64 / kept as f64).ln() + n as f64 * (set.len() as f64).ln();
        }
        want /= examples.len() as f64;
        let got = mean_loss(&scorer, &set, &examples).unwrap();
        assert!((got - want).abs() < 1e-9, "{} vs {}", got, want);
        let refs: Vec<&Example> = examples.iter().collect();
        let (l, g) = batch_loss_grad(&scorer, &set, &refs).unwrap();
        assert!((l - want).abs() < 1e-9);
        assert!(g.is_empty());
    }

    #[test]
    fn pseudo_modes_fix_structures() {
        let data = vec![(
            FIGURE_TEXT.parse::<CharSentence>().unwrap(),
            figure_word_tree(),
        )];
        let trees = enumerate_projective(9).unwrap();
        let latent = prepare_examples(&data, Mode::Latent).unwrap().0;
        let left = prepare_examples(&data, Mode::Leftward).unwrap().0;
        assert_eq!(filter_compatible(&trees, &latent[0].spec).len(), 56);
        assert_eq!(filter_compatible(&trees, &left[0].spec).len(), 1);
    }

    fn relative_error(a: &[f64], b: &[f64]) -> f64 {
        let diff: f64 = a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
        let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        diff / na.max(nb).max(1e-12)
    }

    #[test]
    fn parameter_gradient_matches_finite_differences() {
        for mode in Mode::ALL {
            let set = LabelSet::new(SYNTACTIC, "root").unwrap();
            let data = corpus(51, 3, 5);
            let (examples, _) = prepare_examples(&data, mode).unwrap();
            let cfg = TrainConfig {
                embedding_dim: 3,
                hidden_dim: 3,
                distance_clip: 2,
                mode,
                ..TrainConfig::default()
            };
            let vocab = Vocab::build(data.iter().map(|(s, _)| s));
            let mut scorer =
                BiaffineScorer::new(BiaffineShape::new(&vocab, set.len(), &cfg), vocab, 5);
            let refs: Vec<&Example> = examples.iter().collect();
            let (_, grad) = batch_loss_grad(&scorer, &set, &refs).unwrap();
            let eps = 1e-5;
            let mut fd = vec![0.0; grad.len()];
            for i in 0..grad.len() {
                let orig = scorer.params()[i];
                scorer.params_mut()[i] = orig + eps;
                let a = mean_loss(&scorer, &set, &examples).unwrap();
                scorer.params_mut()[i] = orig - eps;
                let b = mean_loss(&scorer, &set, &examples).unwrap();
                scorer.params_mut()[i] = orig;
                fd[i] = (a - b) / (2.0 * eps);
            }
            let err = relative_error(&grad, &fd);
            assert!(err < 1e-4, "{:?}: relative error {}", mode, err);
        }
    }
}
