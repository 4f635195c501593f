//! Seeded random instances for the oracle suites: score tables,
//! segmentations, word trees and forest constraints.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::oracle::enumerate_projective;
use crate::types::{ArcScores, C2fArcScores, ForestSpec, LabelScores, Segmentation, WordTree};

/// Generator used by every suite; instances are a pure function of `seed`.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Multiples of 1/8 in [-4, 4]: sums of a few of them are exact in f64.
pub fn dyadic(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(-32i32..=32) as f64 / 8.0
}

pub fn random_scores(rng: &mut ChaCha8Rng, n: usize) -> ArcScores {
    ArcScores::from_fn(n, |_, _| dyadic(rng))
}

pub fn random_c2f_scores(rng: &mut ChaCha8Rng, n: usize) -> C2fArcScores {
    let intra = random_scores(rng, n);
    let inter = random_scores(rng, n);
    C2fArcScores::new(intra, inter).expect("valid by construction")
}

pub fn random_label_scores(rng: &mut ChaCha8Rng, n: usize, labels: usize) -> LabelScores {
    LabelScores::from_fn(n, labels, |_, _, _| dyadic(rng))
}

/// Random segmentation of `n` characters into words of one to four characters.
pub fn random_segmentation(rng: &mut ChaCha8Rng, n: usize) -> Segmentation {
    let mut lengths = Vec::new();
    let mut left = n;
    while left > 0 {
        let l = rng.gen_range(1..=left.min(4));
        lengths.push(l);
        left -= l;
    }
    Segmentation::from_lengths(&lengths).expect("valid by construction")
}

/// Uniformly drawn projective tree over `m` words.
pub fn random_word_heads(rng: &mut ChaCha8Rng, m: usize) -> Vec<usize> {
    enumerate_projective(m)
        .expect("word count within oracle range")
        .choose(rng)
        .expect("valid by construction")
        .clone()
}

pub fn random_spec(rng: &mut ChaCha8Rng, n: usize) -> ForestSpec {
    let seg = random_segmentation(rng, n);
    let heads = random_word_heads(rng, seg.num_words());
    ForestSpec::new(seg, Some(heads)).expect("valid by construction")
}

/// Labels of [`random_word_tree`]; the root word gets "root".
pub const SAMPLE_LABELS: [&str; 4] = ["ccomp", "dobj", "nsubj", "root"];

pub fn random_word_tree(rng: &mut ChaCha8Rng, n: usize) -> WordTree {
    let seg = random_segmentation(rng, n);
    let heads = random_word_heads(rng, seg.num_words());
    let labels = (0..heads.len())
        .map(|w| {
            if w == 0 {
                String::new()
            } else if heads[w] == 0 {
                "root".to_owned()
            } else {
                SAMPLE_LABELS[rng.gen_range(0..3)].to_owned()
            }
        })
        .collect();
    WordTree::new(seg, heads, labels).expect("valid by construction")
}
