//! Deterministic synthetic corpus from a small template grammar.
//!
//! Every character belongs to exactly one word of a fixed lexicon, words
//! are one to three characters long, and each template fixes the word-level
//! tree. The corpus is a pure function of the seed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::types::{CharSentence, Segmentation, WordTree};

/// Nouns, two or three characters.
pub const NOUNS: [&str; 7] = ["上海", "金融业", "银行", "学生", "老师", "城市", "工程队"];
/// Verbs, one or two characters.
pub const VERBS: [&str; 6] = ["计划", "发展", "看", "写", "喜欢", "买"];
/// Adjectives, two characters.
pub const ADJECTIVES: [&str; 4] = ["美丽", "重要", "安静", "聪明"];

#[derive(Clone, Copy)]
enum Slot {
    N,
    V,
    A,
    Lit(&'static str),
}

/// A template: word slots, word heads (1-based, 0 = ROOT) and labels.
struct Template {
    slots: &'static [Slot],
    heads: &'static [usize],
    labels: &'static [&'static str],
}

const TEMPLATES: [Template; 5] = [
    // N V N 。
    Template {
        slots: &[Slot::N, Slot::V, Slot::N, Slot::Lit("。")],
        heads: &[2, 0, 2, 2],
        labels: &["nsubj", "root", "dobj", "punct"],
    },
    // N V 了 。
    Template {
        slots: &[Slot::N, Slot::V, Slot::Lit("了"), Slot::Lit("。")],
        heads: &[2, 0, 2, 2],
        labels: &["nsubj", "root", "aux", "punct"],
    },
    // A 的 N V N 。
    Template {
        slots: &[
            Slot::A,
            Slot::Lit("的"),
            Slot::N,
            Slot::V,
            Slot::N,
            Slot::Lit("。"),
        ],
        heads: &[3, 1, 4, 0, 4, 4],
        labels: &["amod", "mark", "nsubj", "root", "dobj", "punct"],
    },
    // N 很 A 。
    Template {
        slots: &[Slot::N, Slot::Lit("很"), Slot::A, Slot::Lit("。")],
        heads: &[3, 3, 0, 3],
        labels: &["nsubj", "advmod", "root", "punct"],
    },
    // N V A 的 N 。
    Template {
        slots: &[
            Slot::N,
            Slot::V,
            Slot::A,
            Slot::Lit("的"),
            Slot::N,
            Slot::Lit("。"),
        ],
        heads: &[2, 0, 5, 3, 2, 2],
        labels: &["nsubj", "root", "amod", "mark", "dobj", "punct"],
    },
];

/// Labels used by the grammar.
pub const LABELS: [&str; 8] = [
    "advmod", "amod", "aux", "dobj", "mark", "nsubj", "punct", "root",
];

fn sentence(rng: &mut ChaCha8Rng) -> (CharSentence, WordTree) {
    let t = &TEMPLATES[rng.gen_range(0..TEMPLATES.len())];
    let words: Vec<&str> = t
        .slots
        .iter()
        .map(|s| match *s {
            Slot::N => *NOUNS.choose(rng).expect("nonempty"),
            Slot::V => *VERBS.choose(rng).expect("nonempty"),
            Slot::A => *ADJECTIVES.choose(rng).expect("nonempty"),
            Slot::Lit(w) => w,
        })
        .collect();
    let text: String = words.concat();
    let lengths: Vec<usize> = words.iter().map(|w| w.chars().count()).collect();
    let seg = Segmentation::from_lengths(&lengths).expect("template words are nonempty");
    let heads = std::iter::once(0).chain(t.heads.iter().copied()).collect();
    let labels = std::iter::once(String::new())
        .chain(t.labels.iter().map(|l| (*l).to_owned()))
        .collect();
    let tree = WordTree::new(seg, heads, labels).expect("templates are well-formed");
    (text.parse().expect("template text is nonempty"), tree)
}

/// `count` sentences drawn with a generator seeded by `seed`.
pub fn toy_corpus(seed: u64, count: usize) -> Vec<(CharSentence, WordTree)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| sentence(&mut rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{BTreeMap, BTreeSet};

    #[test]
    fn lexicon_characters_are_unique_to_words() {
        let mut owner: BTreeMap<char, &str> = BTreeMap::new();
        let all = NOUNS
            .iter()
            .chain(&VERBS)
            .chain(&ADJECTIVES)
            .chain(&["的", "了", "很", "。"]);
        for w in all {
            let len = w.chars().count();
            assert!((1..=3).contains(&len));
            for c in w.chars() {
                assert!(owner.insert(c, w).is_none(), "{} shared", c);
            }
        }
        assert!(owner.len() <= 50);
    }

    #[test]
    fn corpus_is_deterministic_and_well_formed() {
        let a = toy_corpus(1, 200);
        assert_eq!(a, toy_corpus(1, 200));
        assert_ne!(a, toy_corpus(2, 200));
        let mut chars = BTreeSet::new();
        let mut labels = BTreeSet::new();
        for (s, t) in &a {
            assert!(t.is_valid() && t.is_projective());
            assert_eq!(s.len(), t.segmentation().len());
            chars.extend(s.chars().iter().copied());
            labels.extend(t.labels().iter().skip(1).cloned());
        }
        assert!(chars.len() <= 50);
        assert_eq!(labels, LABELS.iter().map(|l| l.to_string()).collect());
    }
}
