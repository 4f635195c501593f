//! Training objective, scorer contract, reference scorer and trainer.

mod config;
mod decode;
mod loss;
mod model;
mod objective;
mod scorer;
mod trainer;

pub use config::{parse_config, Mode, TrainConfig};

pub use decode::{bmes_viterbi, decode, Prediction};
pub use loss::{
    best_syntactic_label, label_decode, labeled_forest_loss, labeled_forest_loss_c2f,
    labeled_forest_loss_c2f_grad, labeled_forest_loss_grad, tree_loss, tree_loss_grad, C2fGrad,
    LossBreakdown,
};
pub use model::{Model, TrainOutcome};
pub use objective::{
    batch_loss_grad, example_loss_grad, mean_loss, prepare_examples, training_forest, Example,
};
pub use scorer::{
    ArcGrads, ArcTables, BiaffineScorer, BiaffineShape, ConstantScorer, ScoreGrads, Scorer, Scores,
    Vocab, PAD, ROOT, UNK, WINDOW,
};
pub use trainer::{train, EpochSummary, TrainReport};
