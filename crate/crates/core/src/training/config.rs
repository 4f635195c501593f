//! Training configuration and its `key = value` text format.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::DEFAULT_ROOT_LABEL;

/// How gold word trees are turned into training forests and how the
/// sentence is scored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Latent intra-word structure, one arc score table.
    Latent,
    /// Latent structure with separate intra/inter arc scores and the
    /// coarse-to-fine chart.
    LatentC2f,
    /// Fixed left-branching intra-word structure.
    Leftward,
    /// Fixed right-branching intra-word structure.
    Rightward,
    /// A BMES tagger segments first; latent parsing on the predicted words.
    PipelineParse,
}

impl Mode {
    pub const ALL: [Mode; 5] = [
        Mode::Latent,
        Mode::LatentC2f,
        Mode::Leftward,
        Mode::Rightward,
        Mode::PipelineParse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Latent => "latent",
            Mode::LatentC2f => "latent-c2f",
            Mode::Leftward => "leftward",
            Mode::Rightward => "rightward",
            Mode::PipelineParse => "pipeline-parse",
        }
    }

    /// Whether the scorer emits separate intra and inter arc tables.
    pub fn is_c2f(self) -> bool {
        self == Mode::LatentC2f
    }

    /// Whether the scorer emits per-character segmentation tag scores.
    pub fn has_tagger(self) -> bool {
        self == Mode::PipelineParse
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Mode::ALL.iter().map(|m| m.name()).collect();
                Error::Config(format!(
                    "unknown mode '{}' (expected one of {})",
                    s,
                    names.join(", ")
                ))
            })
    }
}

/// Hyperparameters of the reference scorer and the optimizer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub embedding_dim: usize,
    pub hidden_dim: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    /// Global gradient-norm clip; 0 disables clipping.
    pub clip_norm: f64,
    pub seed: u64,
    pub mode: Mode,
    pub batch_size: usize,
    /// Step size at epoch `e` is `learning_rate / (1 + lr_decay * e)`.
    pub lr_decay: f64,
    /// Signed head-modifier distances are clipped to `±distance_clip`.
    pub distance_clip: usize,
    /// Label of the arc from ROOT to the sentence head.
    pub root_label: String,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            embedding_dim: 32,
            hidden_dim: 32,
            learning_rate: 0.5,
            epochs: 30,
            clip_norm: 5.0,
            seed: 1,
            mode: Mode::Latent,
            batch_size: 8,
            lr_decay: 0.05,
            distance_clip: 8,
            root_label: DEFAULT_ROOT_LABEL.to_owned(),
        }
    }
}

const KEYS: [&str; 11] = [
    "embedding_dim",
    "hidden_dim",
    "learning_rate",
    "epochs",
    "clip_norm",
    "seed",
    "mode",
    "batch_size",
    "lr_decay",
    "distance_clip",
    "root_label",
];

impl TrainConfig {
    /// Checks value ranges that the parser cannot express per key.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_owned()));
        if self.embedding_dim == 0 || self.hidden_dim == 0 {
            return bad("embedding_dim and hidden_dim must be positive");
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad("learning_rate must be a positive finite number");
        }
        if !(self.clip_norm.is_finite() && self.clip_norm >= 0.0) {
            return bad("clip_norm must be a non-negative finite number");
        }
        if !(self.lr_decay.is_finite() && self.lr_decay >= 0.0) {
            return bad("lr_decay must be a non-negative finite number");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be positive");
        }
        if self.root_label.is_empty() || self.root_label.contains(char::is_whitespace) {
            return bad("root_label must be non-empty without whitespace");
        }
        Ok(())
    }

    /// Renders the configuration in the text format accepted by
    /// [`parse_config`].
    pub fn to_text(&self) -> String {
        format!(
            "embedding_dim = {}\nhidden_dim = {}\nlearning_rate = {}\nepochs = {}\nclip_norm = {}\nseed = {}\nmode = {}\nbatch_size = {}\nlr_decay = {}\ndistance_clip = {}\nroot_label = {}\n",
            self.embedding_dim,
            self.hidden_dim,
            self.learning_rate,
            self.epochs,
            self.clip_norm,
            self.seed,
            self.mode,
            self.batch_size,
            self.lr_decay,
            self.distance_clip,
            self.root_label
        )
    }
}

fn number<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid value '{}' for {}", value, key)))
}

/// Parses `key = value` lines; `#` starts a comment, blank lines are
/// ignored, unspecified keys keep their defaults. Unknown and repeated keys
/// are errors.
pub fn parse_config(text: &str) -> Result<TrainConfig> {
    let mut cfg = TrainConfig::default();
    let mut seen = [false; KEYS.len()];
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Error::parse(line, "expected 'key = value'"))?;
        let (key, value) = (key.trim(), value.trim());
        let slot = KEYS
            .iter()
            .position(|k| *k == key)
            .ok_or_else(|| Error::parse(line, format!("unknown key '{}'", key)))?;
        if std::mem::replace(&mut seen[slot], true) {
            return Err(Error::parse(line, format!("duplicate key '{}'", key)));
        }
        match key {
            "embedding_dim" => cfg.embedding_dim = number(line, key, value)?,
            "hidden_dim" => cfg.hidden_dim = number(line, key, value)?,
            "learning_rate" => cfg.learning_rate = number(line, key, value)?,
            "epochs" => cfg.epochs = number(line, key, value)?,
            "clip_norm" => cfg.clip_norm = number(line, key, value)?,
            "seed" => cfg.seed = number(line, key, value)?,
            "mode" => {
                cfg.mode = value
                    .parse()
                    .map_err(|e: Error| Error::parse(line, e.to_string()))?
            }
            "batch_size" => cfg.batch_size = number(line, key, value)?,
            "lr_decay" => cfg.lr_decay = number(line, key, value)?,
            "distance_clip" => cfg.distance_clip = number(line, key, value)?,
            "root_label" => cfg.root_label = value.to_owned(),
            _ => unreachable!("key list and match arms agree"),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}
