//! First-order training loop.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::TrainConfig;
use super::objective::{batch_loss_grad, mean_loss, Example};
use super::scorer::Scorer;
use crate::error::{Error, Result};
use crate::types::LabelSet;

/// Summary of one finished epoch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpochSummary {
    /// Zero-based epoch index.
    pub epoch: usize,
    /// Mean loss of the epoch's batches, measured before each update.
    pub loss: f64,
    pub learning_rate: f64,
}

/// Loss trace of a training run.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainReport {
    /// Mean corpus loss at the initial parameters.
    pub initial_loss: f64,
    pub epochs: Vec<EpochSummary>,
    /// Mean corpus loss at the final parameters.
    pub final_loss: f64,
}

impl TrainReport {
    /// Tab-separated trace: a header, the initial loss as epoch 0, one line
    /// per epoch, and the final loss.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("epoch\tloss\tlearning_rate\n");
        out.push_str(&format!("0\t{}\t-\n", self.initial_loss));
        for e in &self.epochs {
            out.push_str(&format!(
                "{}\t{}\t{}\n",
                e.epoch + 1,
                e.loss,
                e.learning_rate
            ));
        }
        out.push_str(&format!("final\t{}\t-\n", self.final_loss));
        out
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Minimises the mean loss of `examples` by mini-batch gradient descent with
/// global-norm clipping and step size `lr / (1 + decay * epoch)`. Batches
/// are drawn from a shuffle seeded by `cfg.seed`, so a run is a pure
/// function of its inputs. `on_epoch` runs after every epoch.
pub fn train<S: Scorer>(
    scorer: &mut S,
    examples: &[Example],
    labels: &LabelSet,
    cfg: &TrainConfig,
    mut on_epoch: impl FnMut(&EpochSummary, &S) -> Result<()>,
) -> Result<TrainReport> {
    cfg.validate()?;
    let initial_loss = mean_loss(scorer, labels, examples)?;
    if !initial_loss.is_finite() {
        return Err(Error::Diverged {
            epoch: 0,
            batch: 0,
            detail: format!("initial loss is {}", initial_loss),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut epochs = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let lr = cfg.learning_rate / (1.0 + cfg.lr_decay * epoch as f64);
        let mut weighted = 0.0;
        for (b, chunk) in order.chunks(cfg.batch_size).enumerate() {
            let batch: Vec<&Example> = chunk.iter().map(|&i| &examples[i]).collect();
            // Gold forests are nonempty by construction, so an empty forest
            // here means scores have blown past the masking threshold.
            let (loss, mut grad) =
                batch_loss_grad(scorer, labels, &batch).map_err(|e| match e {
                    Error::EmptyForest => Error::Diverged {
                        epoch: epoch + 1,
                        batch: b,
                        detail: "arc scores overflowed the masking threshold".into(),
                    },
                    e => e,
                })?;
            let g = norm(&grad);
            if !loss.is_finite() || !g.is_finite() {
                return Err(Error::Diverged {
                    epoch: epoch + 1,
                    batch: b,
                    detail: format!("loss {} with gradient norm {}", loss, g),
                });
            }
            if cfg.clip_norm > 0.0 && g > cfg.clip_norm {
                let scale = cfg.clip_norm / g;
                grad.iter_mut().for_each(|x| *x *= scale);
            }
            for (p, d) in scorer.params_mut().iter_mut().zip(&grad) {
                *p -= lr * d;
            }
            weighted += loss * batch.len() as f64;
        }
        let summary = EpochSummary {
            epoch,
            loss: weighted / examples.len().max(1) as f64,
            learning_rate: lr,
        };
        if scorer.params().iter().any(|p| !p.is_finite()) {
            return Err(Error::Diverged {
                epoch: epoch + 1,
                batch: 0,
                detail: "non-finite parameter after update".into(),
            });
        }
        epochs.push(summary);
        on_epoch(&summary, scorer)?;
    }
    let final_loss = mean_loss(scorer, labels, examples)?;
    Ok(TrainReport {
        initial_loss,
        epochs,
        final_loss,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::*;
    use crate::training::{prepare_examples, BiaffineScorer, BiaffineShape, Mode, Vocab};
    use crate::types::{CharSentence, WordTree};

    fn setup(mode: Mode, seed: u64) -> (BiaffineScorer, Vec<Example>, LabelSet, TrainConfig) {
        let mut r = rng(60);
        let data: Vec<(CharSentence, WordTree)> = (0..10)
            .map(|i| {
                let n = 2 + i % 5;
                let text: String = (0..n)
                    .map(|j| char::from(b'a' + ((i * 2 + j) % 6) as u8))
                    .collect();
                (text.parse().unwrap(), random_word_tree(&mut r, n))
            })
            .collect();
        let set = LabelSet::new(SYNTACTIC, "root").unwrap();
        let cfg = TrainConfig {
            embedding_dim: 8,
            hidden_dim: 8,
            epochs: 5,
            batch_size: 3,
            mode,
            seed,
            ..TrainConfig::default()
        };
        let vocab = Vocab::build(data.iter().map(|(s, _)| s));
        let scorer = BiaffineScorer::new(BiaffineShape::new(&vocab, set.len(), &cfg), vocab, seed);
        let (examples, _) = prepare_examples(&data, mode).unwrap();
        (scorer, examples, set, cfg)
    }

    #[test]
    fn loss_decreases_and_is_reproducible() {
        for mode in Mode::ALL {
            let (mut a, ex, set, cfg) = setup(mode, 3);
            let mut seen = 0;
            let report = train(&mut a, &ex, &set, &cfg, |_, _| {
                seen += 1;
                Ok(())
            })
            .unwrap();
            assert_eq!(seen, cfg.epochs);
            assert!(
                report.final_loss < report.initial_loss,
                "{:?}: {:?}",
                mode,
                report
            );
            let (mut b, ex, set, cfg) = setup(mode, 3);
            let again = train(&mut b, &ex, &set, &cfg, |_, _| Ok(())).unwrap();
            assert_eq!(report, again);
            assert_eq!(a.params(), b.params());
        }
    }

    #[test]
    fn divergence_is_reported() {
        let (mut a, ex, set, mut cfg) = setup(Mode::Latent, 4);
        cfg.learning_rate = 1e300;
        cfg.clip_norm = 0.0;
        let err = train(&mut a, &ex, &set, &cfg, |_, _| Ok(())).unwrap_err();
        assert!(matches!(err, Error::Diverged { .. }), "{:?}", err);
    }

    #[test]
    fn trace_format() {
        let r = TrainReport {
            initial_loss: 2.0,
            epochs: vec![EpochSummary {
                epoch: 0,
                loss: 1.5,
                learning_rate: 0.5,
            }],
            final_loss: 1.0,
        };
        assert_eq!(
            r.to_tsv(),
            "epoch\tloss\tlearning_rate\n0\t2\t-\n1\t1.5\t0.5\nfinal\t1\t-\n"
        );
    }
}
