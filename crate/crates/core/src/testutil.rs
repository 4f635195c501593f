//! Shared fixtures for unit tests.

pub use crate::sample::SAMPLE_LABELS as SYNTACTIC;
pub use crate::sample::*;

use crate::types::{ForestSpec, Segmentation, WordTree};

/// Characters of the running example 上海计划发展金融业.
pub const FIGURE_TEXT: &str = "上海计划发展金融业";
pub const FIGURE_LENGTHS: [usize; 4] = [2, 2, 2, 3];
pub const FIGURE_WORD_HEADS: [usize; 5] = [0, 2, 0, 2, 3];
pub const FIGURE_WORD_LABELS: [&str; 5] = ["", "nsubj", "root", "ccomp", "dobj"];
/// Character heads of the annotated intra-word structure.
pub const FIGURE_CHAR_HEADS: [usize; 10] = [0, 2, 4, 4, 0, 4, 5, 9, 7, 5];

pub fn figure_word_tree() -> WordTree {
    WordTree::new(
        Segmentation::from_lengths(&FIGURE_LENGTHS).unwrap(),
        FIGURE_WORD_HEADS.to_vec(),
        FIGURE_WORD_LABELS.iter().map(|s| s.to_string()).collect(),
    )
    .unwrap()
}

pub fn figure_spec() -> ForestSpec {
    ForestSpec::from_word_tree(&figure_word_tree()).unwrap()
}
