//! Shared domain types: sentences, segmentations, labels, trees, score
//! tables and forest constraints.

mod forest;
mod labels;
mod scores;
mod segmentation;
mod sentence;
mod tree;

pub use forest::{ForestSpec, IntraStructure};
pub use labels::{LabelId, LabelSet, DEFAULT_ROOT_LABEL, INTRA, INTRA_ID};
pub(crate) use scores::log_sum_exp;
pub use scores::{is_masked, ArcScores, C2fArcScores, LabelScores, MASKED};
pub use segmentation::{Bmes, Segmentation};
pub use sentence::CharSentence;
pub use tree::{is_projective, tree_score, validate_char_tree, validate_heads, CharTree, WordTree};
