//! Conversions between word-level and character-level trees.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::types::{
    CharTree, ForestSpec, IntraStructure, LabelScores, LabelSet, Segmentation, WordTree, INTRA,
};

/// Reads a word tree as the forest of character trees compatible with it.
pub fn word_tree_to_forest(gold: &WordTree) -> Result<ForestSpec> {
    if !gold.is_valid() {
        return Err(Error::InvalidTree(
            "gold word tree is not a projective single-root tree".into(),
        ));
    }
    ForestSpec::from_word_tree(gold)
}

/// Deterministic chain structures for intra-word dependencies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Rooted at the last character; each character is headed by its right
    /// neighbour.
    Leftward,
    /// Rooted at the first character; each character is headed by its left
    /// neighbour.
    Rightward,
}

/// Chain structure over `span = (begin, end)`.
pub fn pseudo_structure(span: (usize, usize), direction: Direction) -> Result<IntraStructure> {
    let (begin, end) = span;
    if begin == 0 || end < begin {
        return Err(Error::InvalidTree(format!(
            "bad word span ({}, {})",
            begin, end
        )));
    }
    let (root, arcs): (usize, Vec<(usize, usize)>) = match direction {
        Direction::Leftward => (end, (begin..end).map(|i| (i + 1, i)).collect()),
        Direction::Rightward => (begin, (begin..end).map(|i| (i, i + 1)).collect()),
    };
    IntraStructure::new(span, root, &arcs)
}

/// Fixes the intra-word structure of the words in `fixed` (keyed by word
/// index); other words stay latent.
pub fn narrow_forest(
    spec: &ForestSpec,
    fixed: &BTreeMap<usize, IntraStructure>,
) -> Result<ForestSpec> {
    let seg = spec.segmentation();
    let mut out = spec.clone();
    for (&w, structure) in fixed {
        if w == 0 || w > seg.num_words() {
            return Err(Error::IndexOutOfRange {
                index: w,
                min: 1,
                max: seg.num_words(),
            });
        }
        if structure.span() != seg.span(w) {
            return Err(Error::InvalidTree(format!(
                "structure over {:?} does not match word {} at {:?}",
                structure.span(),
                w,
                seg.span(w)
            )));
        }
        out.set_fixed(w, structure.clone());
    }
    Ok(out)
}

/// Forest in which every multi-character word carries the chain structure
/// of `direction`.
pub fn pseudo_forest(gold: &WordTree, direction: Direction) -> Result<ForestSpec> {
    let spec = word_tree_to_forest(gold)?;
    let seg = gold.segmentation();
    let mut fixed = BTreeMap::new();
    for w in 1..=seg.num_words() {
        fixed.insert(w, pseudo_structure(seg.span(w), direction)?);
    }
    narrow_forest(&spec, &fixed)
}

/// Labels a character tree compatible with `gold`: intra-word arcs get
/// [`INTRA`], inter-word arcs the label of the gold word-level arc.
pub fn label_compatible_tree(heads: &[usize], gold: &WordTree) -> Result<CharTree> {
    let seg = gold.segmentation();
    if heads.len() != seg.len() + 1 {
        return Err(Error::LengthMismatch {
            expected: seg.len() + 1,
            got: heads.len(),
        });
    }
    let mut labels = vec![String::new(); heads.len()];
    for m in 1..heads.len() {
        labels[m] = if seg.same_word(heads[m], m) {
            INTRA.to_owned()
        } else {
            gold.label(seg.word_of(m)).to_owned()
        };
    }
    CharTree::new(heads.to_vec(), labels)
}

/// Builds the character tree obtained by expanding every word of `gold`
/// into `structures[w - 1]`.
pub fn expand_word_tree(gold: &WordTree, structures: &[IntraStructure]) -> Result<CharTree> {
    let seg = gold.segmentation();
    if structures.len() != seg.num_words() {
        return Err(Error::LengthMismatch {
            expected: seg.num_words(),
            got: structures.len(),
        });
    }
    let mut heads = vec![0; seg.len() + 1];
    for (i, s) in structures.iter().enumerate() {
        let w = i + 1;
        if s.span() != seg.span(w) {
            return Err(Error::InvalidTree(format!(
                "structure {} does not match its word",
                w
            )));
        }
        for (h, m) in s.arcs() {
            heads[m] = h;
        }
        let hw = gold.head(w);
        heads[s.root()] = if hw == 0 {
            0
        } else {
            structures[hw - 1].root()
        };
    }
    label_compatible_tree(&heads, gold)
}

/// Words whose characters do not form a subtree with exactly one externally
/// headed character.
pub fn single_root_violations(heads: &[usize], seg: &Segmentation) -> Vec<usize> {
    (1..=seg.num_words())
        .filter(|&w| {
            let (b, e) = seg.span(w);
            (b..=e).filter(|&c| heads[c] < b || heads[c] > e).count() != 1
        })
        .collect()
}

/// Inter-word arcs `(h, m)` whose head is not a root character, i.e. whose
/// head is itself attached inside its own word.
pub fn root_as_head_violations(heads: &[usize], seg: &Segmentation) -> Vec<(usize, usize)> {
    (1..heads.len())
        .filter(|&m| {
            let h = heads[m];
            h != 0 && !seg.same_word(h, m) && seg.same_word(heads[h], h)
        })
        .map(|m| (heads[m], m))
        .collect()
}

/// Intra-word arcs whose span strictly contains a non-intra arc.
/// `intra[m]` tells whether the arc entering `m` is intra-word.
pub fn intra_spanning_inter(heads: &[usize], intra: &[bool]) -> Vec<(usize, usize)> {
    let n = heads.len() - 1;
    let mut out = Vec::new();
    for m in 1..=n {
        if !intra[m] {
            continue;
        }
        let (lo, hi) = (heads[m].min(m), heads[m].max(m));
        let spans = (1..=n)
            .any(|c| c != m && !intra[c] && c >= lo && c <= hi && heads[c] >= lo && heads[c] <= hi);
        if spans {
            out.push((heads[m], m));
        }
    }
    out
}

/// Collapses the [`INTRA`]-connected components of `tree` into words.
pub fn recover_word_tree(tree: &CharTree) -> Result<WordTree> {
    if !tree.is_valid() {
        return Err(Error::InvalidTree(
            "character tree is not a projective tree".into(),
        ));
    }
    let n = tree.len();
    let heads = tree.heads();
    let intra: Vec<bool> = (0..=n).map(|m| m > 0 && tree.label(m) == INTRA).collect();
    let mut illegal: Vec<(usize, usize)> = (1..=n)
        .filter(|&m| intra[m] && heads[m] == 0)
        .map(|m| (0, m))
        .collect();
    illegal.extend(
        intra_spanning_inter(heads, &intra)
            .into_iter()
            .filter(|&(h, _)| h != 0),
    );
    if !illegal.is_empty() {
        illegal.sort_by_key(|&(_, m)| m);
        return Err(Error::IllegalStructure { arcs: illegal });
    }
    // Component root of every character.
    let root_of = |mut c: usize| {
        while intra[c] {
            c = heads[c];
        }
        c
    };
    let roots: Vec<usize> = (0..=n)
        .map(|c| if c == 0 { 0 } else { root_of(c) })
        .collect();
    // Components must be contiguous.
    let mut spans = Vec::new();
    let mut begin = 1;
    for c in 1..=n {
        if c == n || roots[c + 1] != roots[c] {
            spans.push((begin, c));
            begin = c + 1;
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    for &(b, _) in &spans {
        if !seen.insert(roots[b]) {
            let arcs = (1..=n)
                .filter(|&m| intra[m] && roots[m] == roots[b])
                .map(|m| (heads[m], m))
                .collect();
            return Err(Error::IllegalStructure { arcs });
        }
    }
    let seg = Segmentation::new(spans)?;
    let mut word_heads = vec![0; seg.num_words() + 1];
    let mut labels = vec![String::new(); seg.num_words() + 1];
    for w in 1..=seg.num_words() {
        let r = roots[seg.span(w).0];
        let h = heads[r];
        word_heads[w] = if h == 0 { 0 } else { seg.word_of(h) };
        labels[w] = tree.label(r).to_owned();
    }
    WordTree::new(seg, word_heads, labels)
}

/// Intra-word structure of every word of `seg` in the tree `heads`, or
/// `None` for words whose characters do not form a single-rooted subtree.
pub fn intra_structures(
    heads: &[usize],
    seg: &Segmentation,
) -> Result<Vec<Option<IntraStructure>>> {
    if heads.len() != seg.len() + 1 {
        return Err(Error::LengthMismatch {
            expected: seg.len() + 1,
            got: heads.len(),
        });
    }
    Ok(seg
        .spans()
        .iter()
        .map(|&(b, e)| {
            let outside = |i: usize| heads[i] < b || heads[i] > e;
            let roots: Vec<usize> = (b..=e).filter(|&i| outside(i)).collect();
            if roots.len() != 1 {
                return None;
            }
            let local: Vec<usize> = (b..=e)
                .map(|i| if outside(i) { 0 } else { heads[i] - b + 1 })
                .collect();
            IntraStructure::from_local_heads(b, &local).ok()
        })
        .collect())
}

/// Where replacement labels for illegal intra-word arcs come from.
#[derive(Clone, Copy, Debug)]
pub struct Fallback<'a> {
    /// Label scores of the parse and the label set indexing them.
    pub scores: Option<(&'a LabelScores, &'a LabelSet)>,
    /// Used when no scores are available.
    pub default_label: &'a str,
}

impl<'a> Fallback<'a> {
    pub fn with_default(default_label: &'a str) -> Self {
        Fallback {
            scores: None,
            default_label,
        }
    }

    fn label(&self, h: usize, m: usize) -> String {
        match self.scores {
            Some((scores, labels)) => {
                let mut best = None;
                for l in labels.syntactic() {
                    let s = scores.get(h, m, l);
                    if best.is_none_or(|(_, b)| s > b) {
                        best = Some((l, s));
                    }
                }
                best.map_or(self.default_label.to_owned(), |(l, _)| {
                    labels.name(l).to_owned()
                })
            }
            None => self.default_label.to_owned(),
        }
    }
}

/// Recovery that never fails on a valid tree: offending intra-word arcs are
/// relabeled, outermost first (largest span, then leftmost), until the tree
/// collapses cleanly. Returns the word tree and the repaired character tree.
pub fn recover_with_fallback(tree: &CharTree, fallback: &Fallback) -> Result<(WordTree, CharTree)> {
    let mut tree = tree.clone();
    loop {
        match recover_word_tree(&tree) {
            Ok(words) => return Ok((words, tree)),
            Err(Error::IllegalStructure { arcs }) => {
                let &(h, m) = arcs
                    .iter()
                    .max_by(|a, b| {
                        let wa = a.0.abs_diff(a.1);
                        let wb = b.0.abs_diff(b.1);
                        wa.cmp(&wb).then_with(|| b.0.min(b.1).cmp(&a.0.min(a.1)))
                    })
                    .expect("illegal structure carries arcs");
                let label = fallback.label(h, m);
                tree.set_label(m, &label);
            }
            Err(e) => return Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{enumerate_projective, filter_compatible};
    use crate::testutil::*;
    use proptest::prelude::*;

    fn figure_char_tree() -> CharTree {
        let gold = figure_word_tree();
        label_compatible_tree(&FIGURE_CHAR_HEADS, &gold).unwrap()
    }

    #[test]
    fn structures_of_figure_tree() {
        let seg = figure_word_tree().segmentation().clone();
        let got = intra_structures(&FIGURE_CHAR_HEADS, &seg).unwrap();
        let shapes: Vec<Vec<usize>> = got
            .iter()
            .map(|s| s.as_ref().unwrap().local_heads())
            .collect();
        assert_eq!(
            shapes,
            vec![vec![2, 0], vec![2, 0], vec![0, 1], vec![3, 1, 0]]
        );
        // Word 上海 split into two roots.
        let mut heads = FIGURE_CHAR_HEADS;
        heads[1] = 4;
        assert!(intra_structures(&heads, &seg).unwrap()[0].is_none());
        assert!(intra_structures(&heads[..5], &seg).is_err());
    }

    #[test]
    fn figure_tree_recovers() {
        let t = figure_char_tree();
        assert_eq!(t.label(9), "dobj");
        assert_eq!(t.label(7), INTRA);
        assert_eq!(recover_word_tree(&t).unwrap(), figure_word_tree());
    }

    #[test]
    fn no_intra_arcs_mirrors_char_tree() {
        let heads = vec![0, 2, 0, 2];
        let t = CharTree::unlabeled(heads.clone(), "dep").unwrap();
        let w = recover_word_tree(&t).unwrap();
        assert_eq!(w.segmentation(), &Segmentation::singletons(3).unwrap());
        assert_eq!(w.heads(), &heads[..]);
    }

    #[test]
    fn inter_under_intra_is_illegal() {
        // 1 <- 3 is intra and spans the inter arc 1 -> 2.
        let t = CharTree::new(
            vec![0, 3, 1, 0],
            vec!["".into(), INTRA.into(), "dep".into(), "root".into()],
        )
        .unwrap();
        match recover_word_tree(&t) {
            Err(Error::IllegalStructure { arcs }) => assert_eq!(arcs, vec![(3, 1)]),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn intra_root_arc_is_illegal() {
        let t = CharTree::new(vec![0, 0, 1], vec!["".into(), INTRA.into(), INTRA.into()]).unwrap();
        assert!(matches!(
            recover_word_tree(&t),
            Err(Error::IllegalStructure { .. })
        ));
    }

    #[test]
    fn fallback_splits_offending_word() {
        // Five characters rooted at 3; the intra arc 3 -> 1 spans the inter
        // arc 1 -> 2, while 3 -> 4 -> 5 is a legal intra chain.
        let t = CharTree::new(
            vec![0, 3, 1, 0, 3, 4],
            vec![
                "".into(),
                INTRA.into(),
                "dep".into(),
                "root".into(),
                INTRA.into(),
                INTRA.into(),
            ],
        )
        .unwrap();
        match recover_word_tree(&t) {
            Err(Error::IllegalStructure { arcs }) => assert_eq!(arcs, vec![(3, 1)]),
            other => panic!("{:?}", other),
        }
        let (words, fixed) = recover_with_fallback(&t, &Fallback::with_default("dep")).unwrap();
        assert_eq!(fixed.label(1), "dep");
        assert_eq!(words.segmentation().spans(), &[(1, 1), (2, 2), (3, 5)]);
        assert_eq!(words.heads(), &[0, 3, 1, 0]);
        assert_eq!(recover_word_tree(&fixed).unwrap(), words);
    }

    #[test]
    fn fallback_on_legal_tree_is_identity() {
        let t = figure_char_tree();
        let (w, fixed) = recover_with_fallback(&t, &Fallback::with_default("dep")).unwrap();
        assert_eq!(w, recover_word_tree(&t).unwrap());
        assert_eq!(fixed, t);
    }

    #[test]
    fn fallback_uses_label_scores() {
        let labels = LabelSet::new(["dep", "nmod"], "root").unwrap();
        let nmod = labels.id("nmod").unwrap();
        let scores = crate::types::LabelScores::from_fn(3, labels.len(), |_, _, l| {
            if l == nmod {
                2.0
            } else if l == 0 {
                5.0
            } else {
                0.0
            }
        });
        let t = CharTree::new(
            vec![0, 3, 1, 0],
            vec!["".into(), INTRA.into(), "dep".into(), "root".into()],
        )
        .unwrap();
        let fb = Fallback {
            scores: Some((&scores, &labels)),
            default_label: "dep",
        };
        let (_, fixed) = recover_with_fallback(&t, &fb).unwrap();
        assert_eq!(fixed.label(1), "nmod");
    }

    #[test]
    fn pseudo_structures() {
        let l = pseudo_structure((7, 9), Direction::Leftward).unwrap();
        assert_eq!(l.root(), 9);
        assert_eq!(l.arcs(), vec![(8, 7), (9, 8)]);
        let r = pseudo_structure((7, 9), Direction::Rightward).unwrap();
        assert_eq!(r.root(), 7);
        assert_eq!(r.arcs(), vec![(7, 8), (8, 9)]);
        let s = pseudo_structure((4, 4), Direction::Leftward).unwrap();
        assert_eq!(s.root(), 4);
        assert!(s.arcs().is_empty());
    }

    #[test]
    fn leftward_reversed_is_rightward() {
        for (b, e) in [(1, 1), (1, 4), (3, 7)] {
            let n = e + 2;
            let rev = |c: usize| n + 1 - c;
            let l = pseudo_structure((b, e), Direction::Leftward).unwrap();
            let r = pseudo_structure((rev(e), rev(b)), Direction::Rightward).unwrap();
            assert_eq!(rev(l.root()), r.root());
            let mut mapped: Vec<_> = l
                .arcs()
                .into_iter()
                .map(|(h, m)| (rev(h), rev(m)))
                .collect();
            let mut want = r.arcs();
            mapped.sort();
            want.sort();
            assert_eq!(mapped, want);
        }
    }

    #[test]
    fn single_character_words_have_one_tree() {
        let mut r = rng(20);
        for n in 1..=7 {
            let seg = Segmentation::singletons(n).unwrap();
            let heads = random_word_heads(&mut r, n);
            let spec = ForestSpec::new(seg, Some(heads.clone())).unwrap();
            let kept = filter_compatible(&enumerate_projective(n).unwrap(), &spec);
            assert_eq!(kept, vec![heads]);
        }
    }

    #[test]
    fn forests_are_nonempty_and_structurally_sound() {
        let mut r = rng(21);
        for n in 1..=8 {
            let trees = enumerate_projective(n).unwrap();
            for _ in 0..10 {
                let gold = random_word_tree(&mut r, n);
                let spec = word_tree_to_forest(&gold).unwrap();
                let kept = filter_compatible(&trees, &spec);
                assert!(!kept.is_empty());
                for t in &kept {
                    assert!(single_root_violations(t, gold.segmentation()).is_empty());
                    assert!(root_as_head_violations(t, gold.segmentation()).is_empty());
                }
            }
        }
    }

    #[test]
    fn round_trip_over_forest() {
        let mut r = rng(22);
        for n in 1..=8 {
            let trees = enumerate_projective(n).unwrap();
            for _ in 0..5 {
                let gold = random_word_tree(&mut r, n);
                let spec = word_tree_to_forest(&gold).unwrap();
                for t in filter_compatible(&trees, &spec) {
                    let labeled = label_compatible_tree(&t, &gold).unwrap();
                    assert_eq!(recover_word_tree(&labeled).unwrap(), gold);
                }
            }
        }
    }

    #[test]
    fn narrowing() {
        let mut r = rng(23);
        let trees = enumerate_projective(7).unwrap();
        for _ in 0..20 {
            let gold = random_word_tree(&mut r, 7);
            let spec = word_tree_to_forest(&gold).unwrap();
            let seg = gold.segmentation();
            let base = filter_compatible(&trees, &spec);
            // Fix none: unchanged.
            assert_eq!(narrow_forest(&spec, &BTreeMap::new()).unwrap(), spec);
            // Fix the longest word to a random structure.
            let w = (1..=seg.num_words())
                .max_by_key(|&w| seg.span(w).1 - seg.span(w).0)
                .unwrap();
            let (b, e) = seg.span(w);
            let local = random_word_heads(&mut r, e - b + 1);
            let s = IntraStructure::from_local_heads(b, &local[1..]).unwrap();
            let fixed: BTreeMap<_, _> = [(w, s.clone())].into_iter().collect();
            let narrowed = narrow_forest(&spec, &fixed).unwrap();
            let kept = filter_compatible(&trees, &narrowed);
            let want: Vec<_> = base
                .iter()
                .filter(|t| (b..=e).all(|c| c == s.root() || s.head_of(c) == Some(t[c])))
                .filter(|t| t[s.root()] < b || t[s.root()] > e)
                .cloned()
                .collect();
            assert_eq!(kept, want);
            assert!(kept.len() <= base.len());
            // Idempotent.
            assert_eq!(narrow_forest(&narrowed, &fixed).unwrap(), narrowed);
            // Fix every word: one tree.
            let all = pseudo_forest(&gold, Direction::Leftward).unwrap();
            assert_eq!(filter_compatible(&trees, &all).len(), 1);
        }
    }

    #[test]
    fn narrowing_rejects_wrong_span() {
        let spec = figure_spec();
        let s = pseudo_structure((6, 8), Direction::Leftward).unwrap();
        let fixed: BTreeMap<_, _> = [(4, s)].into_iter().collect();
        assert!(narrow_forest(&spec, &fixed).is_err());
    }

    #[test]
    fn expand_and_recover() {
        let gold = figure_word_tree();
        let seg = gold.segmentation();
        let structures: Vec<_> = (1..=4)
            .map(|w| pseudo_structure(seg.span(w), Direction::Leftward).unwrap())
            .collect();
        let t = expand_word_tree(&gold, &structures).unwrap();
        assert!(t.is_valid());
        assert_eq!(t.heads(), &[0, 2, 4, 4, 0, 6, 4, 8, 9, 6]);
        assert_eq!(recover_word_tree(&t).unwrap(), gold);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn fallback_always_recovers(seed in any::<u64>(), n in 1usize..=8) {
            let mut r = rng(seed);
            let heads = random_word_heads(&mut r, n);
            let labels: Vec<String> = (0..=n)
                .map(|m| if m == 0 { String::new() } else if rand::Rng::gen_bool(&mut r, 0.6) { INTRA.into() } else { "dep".into() })
                .collect();
            let t = CharTree::new(heads, labels).unwrap();
            let (words, fixed) = recover_with_fallback(&t, &Fallback::with_default("dep")).unwrap();
            prop_assert!(fixed.is_valid());
            prop_assert!(words.is_valid());
            prop_assert_eq!(recover_word_tree(&fixed).unwrap(), words);
        }
    }
}
