//! Trained model: configuration, label set and reference scorer, stored as
//! JSON.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::TrainConfig;
use super::decode::{decode, Prediction};
use super::objective::prepare_examples;
use super::scorer::{BiaffineScorer, BiaffineShape, Scorer, Vocab};
use super::trainer::{train, EpochSummary, TrainReport};
use crate::error::{Error, Result};
use crate::types::{CharSentence, LabelSet, Segmentation, WordTree};

const FORMAT: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: u32,
    config: TrainConfig,
    labels: LabelSet,
    shape: BiaffineShape,
    vocab: Vocab,
    params: Vec<f64>,
}

/// A trained parser.
#[derive(Clone, Debug)]
pub struct Model {
    pub config: TrainConfig,
    pub labels: LabelSet,
    pub scorer: BiaffineScorer,
}

/// Outcome of [`Model::train`].
#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub model: Model,
    pub report: TrainReport,
    /// Gold trees left out because they are not projective.
    pub skipped_nonprojective: usize,
}

impl Model {
    /// Builds the vocabulary and label set from `corpus`, initialises the
    /// reference scorer from `config.seed` and trains it. `on_epoch`
    /// receives each epoch summary together with the current model.
    pub fn train(
        corpus: &[(CharSentence, WordTree)],
        config: &TrainConfig,
        mut on_epoch: impl FnMut(&EpochSummary, &Model) -> Result<()>,
    ) -> Result<TrainOutcome> {
        config.validate()?;
        let (examples, skipped) = prepare_examples(corpus, config.mode)?;
        if examples.is_empty() {
            return Err(Error::Config("no projective training sentences".into()));
        }
        let labels = LabelSet::new(
            examples
                .iter()
                .flat_map(|e| e.gold.labels().iter().skip(1).cloned()),
            &config.root_label,
        )?;
        let vocab = Vocab::build(examples.iter().map(|e| &e.sentence));
        let shape = BiaffineShape::new(&vocab, labels.len(), config);
        let mut scorer = BiaffineScorer::new(shape, vocab, config.seed);
        let report = train(
            &mut scorer,
            &examples,
            &labels,
            config,
            |summary, scorer| {
                let snapshot = Model {
                    config: config.clone(),
                    labels: labels.clone(),
                    scorer: scorer.clone(),
                };
                on_epoch(summary, &snapshot)
            },
        )?;
        Ok(TrainOutcome {
            model: Model {
                config: config.clone(),
                labels,
                scorer,
            },
            report,
            skipped_nonprojective: skipped,
        })
    }

    /// Decodes one sentence, optionally under a known segmentation.
    pub fn parse(
        &self,
        sentence: &CharSentence,
        gold_seg: Option<&Segmentation>,
    ) -> Result<Prediction> {
        let scores = self.scorer.score(sentence)?;
        decode(&scores, &self.labels, gold_seg)
    }

    /// Decodes sentences in parallel; results keep the input order.
    pub fn parse_all(
        &self,
        sentences: &[CharSentence],
        gold_segs: Option<&[Segmentation]>,
    ) -> Result<Vec<Prediction>> {
        if let Some(segs) = gold_segs {
            if segs.len() != sentences.len() {
                return Err(Error::LengthMismatch {
                    expected: sentences.len(),
                    got: segs.len(),
                });
            }
        }
        sentences
            .par_iter()
            .enumerate()
            .map(|(i, s)| self.parse(s, gold_segs.map(|g| &g[i])))
            .collect()
    }

    /// Serialises the model; the output is a pure function of the model.
    pub fn to_json(&self) -> Result<String> {
        let file = ModelFile {
            format: FORMAT,
            config: self.config.clone(),
            labels: self.labels.clone(),
            shape: self.scorer.shape().clone(),
            vocab: self.scorer.vocab().clone(),
            params: self.scorer.params().to_vec(),
        };
        let mut out = serde_json::to_string(&file)?;
        out.push('\n');
        Ok(out)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        if file.format != FORMAT {
            return Err(Error::Model(format!(
                "unsupported model format {}",
                file.format
            )));
        }
        if file.shape.num_labels != file.labels.len() {
            return Err(Error::Model("label count does not match the scorer".into()));
        }
        if (file.shape.roles == 2) != file.config.mode.is_c2f()
            || file.shape.tagger != file.config.mode.has_tagger()
        {
            return Err(Error::Model(
                "scorer shape does not match the configured mode".into(),
            ));
        }
        file.config.validate()?;
        let scorer = BiaffineScorer::from_parts(file.shape, file.vocab, file.params)?;
        Ok(Model {
            config: file.config,
            labels: file.labels,
            scorer,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Model::from_json(&fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::*;
    use crate::training::Mode;

    fn corpus() -> Vec<(CharSentence, WordTree)> {
        let mut r = rng(80);
        (0..6)
            .map(|i| {
                let n = 2 + i % 4;
                let text: String = (0..n)
                    .map(|j| char::from(b'p' + ((i + j) % 5) as u8))
                    .collect();
                (text.parse().unwrap(), random_word_tree(&mut r, n))
            })
            .collect()
    }

    fn config(mode: Mode) -> TrainConfig {
        TrainConfig {
            embedding_dim: 4,
            hidden_dim: 4,
            epochs: 2,
            mode,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        for mode in Mode::ALL {
            let out = Model::train(&corpus(), &config(mode), |_, _| Ok(())).unwrap();
            let json = out.model.to_json().unwrap();
            let back = Model::from_json(&json).unwrap();
            assert_eq!(back.to_json().unwrap(), json);
            let s: CharSentence = "pqrs".parse().unwrap();
            assert_eq!(
                back.parse(&s, None).unwrap(),
                out.model.parse(&s, None).unwrap()
            );
        }
    }

    #[test]
    fn training_is_deterministic() {
        let a = Model::train(&corpus(), &config(Mode::LatentC2f), |_, _| Ok(())).unwrap();
        let b = Model::train(&corpus(), &config(Mode::LatentC2f), |_, _| Ok(())).unwrap();
        assert_eq!(a.model.to_json().unwrap(), b.model.to_json().unwrap());
    }

    #[test]
    fn corrupt_models_are_rejected() {
        let out = Model::train(&corpus(), &config(Mode::Latent), |_, _| Ok(())).unwrap();
        let json = out.model.to_json().unwrap();
        let bad = json.replace("\"format\":1", "\"format\":9");
        assert!(matches!(Model::from_json(&bad), Err(Error::Model(_))));
        let bad = json.replace("\"mode\":\"latent\"", "\"mode\":\"latent-c2f\"");
        assert!(matches!(Model::from_json(&bad), Err(Error::Model(_))));
        assert!(Model::from_json("{").is_err());
    }

    #[test]
    fn parse_all_keeps_order_and_checks_lengths() {
        let out = Model::train(&corpus(), &config(Mode::Latent), |_, _| Ok(())).unwrap();
        let sents: Vec<CharSentence> = ["pq", "rstp", "q"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        let all = out.model.parse_all(&sents, None).unwrap();
        for (s, p) in sents.iter().zip(&all) {
            assert_eq!(&out.model.parse(s, None).unwrap(), p);
        }
        let segs = vec![Segmentation::singletons(2).unwrap()];
        assert!(out.model.parse_all(&sents, Some(&segs)).is_err());
    }
}
