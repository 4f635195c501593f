//! Ground truth by exhaustive enumeration.
//!
//! Every projective tree over up to nine characters is generated by recursive
//! span splitting (each tree has exactly one split derivation, so the output
//! is duplicate-free by construction). Compatibility filtering uses a direct
//! structural checker that shares no code with the chart masks.

use std::collections::HashMap;

use crate::chart::ArcRole;
use crate::error::{Error, Result};
use crate::types::{log_sum_exp, tree_score, ArcScores, C2fArcScores, ForestSpec};

/// Largest supported sentence length.
pub const MAX_N: usize = 9;

type Arcs = Vec<(u8, u8)>;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Span {
    RightComplete,
    LeftComplete,
    RightIncomplete,
    LeftIncomplete,
}

struct Enumerator {
    memo: HashMap<(Span, usize, usize), Vec<Arcs>>,
}

impl Enumerator {
    fn get(&mut self, kind: Span, i: usize, j: usize) -> Vec<Arcs> {
        if let Some(v) = self.memo.get(&(kind, i, j)) {
            return v.clone();
        }
        let mut out = Vec::new();
        match kind {
            Span::RightComplete if i == j => out.push(Vec::new()),
            Span::LeftComplete if i == j => out.push(Vec::new()),
            Span::RightComplete => {
                for k in (i + 1)..=j {
                    let left = self.get(Span::RightIncomplete, i, k);
                    let right = self.get(Span::RightComplete, k, j);
                    product(&left, &right, None, &mut out);
                }
            }
            Span::LeftComplete => {
                for k in i..j {
                    let left = self.get(Span::LeftComplete, i, k);
                    let right = self.get(Span::LeftIncomplete, k, j);
                    product(&left, &right, None, &mut out);
                }
            }
            Span::RightIncomplete | Span::LeftIncomplete => {
                let arc = if kind == Span::RightIncomplete {
                    (i as u8, j as u8)
                } else {
                    (j as u8, i as u8)
                };
                for k in i..j {
                    let left = self.get(Span::RightComplete, i, k);
                    let right = self.get(Span::LeftComplete, k + 1, j);
                    product(&left, &right, Some(arc), &mut out);
                }
            }
        }
        self.memo.insert((kind, i, j), out.clone());
        out
    }
}

fn product(left: &[Arcs], right: &[Arcs], arc: Option<(u8, u8)>, out: &mut Vec<Arcs>) {
    for l in left {
        for r in right {
            let mut arcs = Vec::with_capacity(l.len() + r.len() + 1);
            arcs.extend_from_slice(l);
            arcs.extend_from_slice(r);
            arcs.extend(arc);
            out.push(arcs);
        }
    }
}

/// All head arrays (slot 0 unused) of projective trees over `n` characters
/// in which ROOT has exactly one child.
pub fn enumerate_projective(n: usize) -> Result<Vec<Vec<usize>>> {
    if n == 0 || n > MAX_N {
        return Err(Error::OracleRange(n));
    }
    let mut e = Enumerator {
        memo: HashMap::new(),
    };
    let mut trees = Vec::new();
    for r in 1..=n {
        let left = e.get(Span::LeftComplete, 1, r);
        let right = e.get(Span::RightComplete, r, n);
        let mut arcs = Vec::new();
        product(&left, &right, Some((0, r as u8)), &mut arcs);
        for a in arcs {
            let mut heads = vec![0usize; n + 1];
            for (h, m) in a {
                heads[m as usize] = h as usize;
            }
            trees.push(heads);
        }
    }
    Ok(trees)
}

/// Whether `heads` belongs to the forest described by `spec`: every word is a
/// connected subtree with exactly one externally headed character, inter-word
/// arcs connect root characters following the word heads, and fixed
/// intra-word structures are respected.
pub fn is_compatible(heads: &[usize], spec: &ForestSpec) -> bool {
    let seg = spec.segmentation();
    let n = seg.len();
    if heads.len() != n + 1 {
        return false;
    }
    let mut roots = vec![0usize; seg.num_words() + 1];
    for (w, &(b, e)) in seg.spans().iter().enumerate() {
        let w = w + 1;
        let external: Vec<usize> = (b..=e).filter(|&c| heads[c] < b || heads[c] > e).collect();
        if external.len() != 1 {
            return false;
        }
        roots[w] = external[0];
        if let Some(fixed) = spec.fixed(w) {
            for c in b..=e {
                let want = fixed.head_of(c).unwrap_or(0);
                if c == fixed.root() {
                    if roots[w] != c {
                        return false;
                    }
                } else if heads[c] != want {
                    return false;
                }
            }
        }
    }
    for m in 1..=n {
        let h = heads[m];
        let wm = seg.word_of(m);
        let inside = h != 0 && seg.word_of(h) == wm;
        if inside {
            continue;
        }
        let wh = if h == 0 { 0 } else { seg.word_of(h) };
        if wh != 0 && roots[wh] != h {
            return false;
        }
        if let Some(word_heads) = spec.word_heads() {
            if word_heads[wm] != wh {
                return false;
            }
        }
    }
    true
}

/// Subset of `trees` compatible with `spec`.
pub fn filter_compatible(trees: &[Vec<usize>], spec: &ForestSpec) -> Vec<Vec<usize>> {
    trees
        .iter()
        .filter(|t| is_compatible(t, spec))
        .cloned()
        .collect()
}

/// Log-sum-exp of tree scores over `trees`.
pub fn brute_log_z(trees: &[Vec<usize>], scores: &ArcScores) -> Result<f64> {
    if trees.is_empty() {
        return Err(Error::EmptyForest);
    }
    let values: Vec<f64> = trees.iter().map(|t| tree_score(t, scores)).collect();
    Ok(log_sum_exp(&values))
}

/// Highest-scoring tree in `trees` (first one on ties) with its score.
pub fn brute_argmax(trees: &[Vec<usize>], scores: &ArcScores) -> Result<(Vec<usize>, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, t) in trees.iter().enumerate() {
        let s = tree_score(t, scores);
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((i, s));
        }
    }
    best.map(|(i, s)| (trees[i].clone(), s))
        .ok_or(Error::EmptyForest)
}

/// Posterior arc frequencies under the Gibbs distribution over `trees`.
pub fn brute_marginals(trees: &[Vec<usize>], scores: &ArcScores) -> Result<ArcScores> {
    let log_z = brute_log_z(trees, scores)?;
    let mut out = ArcScores::zeros(scores.n());
    for t in trees {
        let p = (tree_score(t, scores) - log_z).exp();
        for m in 1..t.len() {
            out.set(t[m], m, out.get(t[m], m) + p);
        }
    }
    Ok(out)
}

/// A tree together with the role of each arc (slot 0 unused).
pub type TaggedTree = (Vec<usize>, Vec<ArcRole>);

/// Whether a role assignment is derivable by the coarse-to-fine rules: ROOT
/// arcs are inter-word; every arc lying within the span of an intra-word arc
/// is intra-word; with `root_as_head`, every arc below an intra-word modifier
/// is intra-word as well.
pub fn c2f_legal(heads: &[usize], roles: &[ArcRole], root_as_head: bool) -> bool {
    let n = heads.len() - 1;
    for m in 1..=n {
        if heads[m] == 0 && roles[m] == ArcRole::Intra {
            return false;
        }
    }
    for m in 1..=n {
        if roles[m] != ArcRole::Intra {
            continue;
        }
        let (lo, hi) = (heads[m].min(m), heads[m].max(m));
        for c in 1..=n {
            if c == m {
                continue;
            }
            let h = heads[c];
            if h >= lo && h <= hi && c >= lo && c <= hi && roles[c] != ArcRole::Intra {
                return false;
            }
        }
        if root_as_head {
            for c in 1..=n {
                if c != m && is_descendant(heads, c, m) && roles[c] != ArcRole::Intra {
                    return false;
                }
            }
        }
    }
    true
}

fn is_descendant(heads: &[usize], c: usize, ancestor: usize) -> bool {
    let mut x = c;
    while x != 0 {
        if x == ancestor {
            return true;
        }
        x = heads[x];
    }
    false
}

/// Every legal (tree, role assignment) pair over `n` characters.
pub fn enumerate_c2f(n: usize, root_as_head: bool) -> Result<Vec<TaggedTree>> {
    let trees = enumerate_projective(n)?;
    let mut out = Vec::new();
    for heads in trees {
        let free: Vec<usize> = (1..=n).filter(|&m| heads[m] != 0).collect();
        for mask in 0u32..(1u32 << free.len()) {
            let mut roles = vec![ArcRole::Inter; n + 1];
            for (bit, &m) in free.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    roles[m] = ArcRole::Intra;
                }
            }
            if c2f_legal(&heads, &roles, root_as_head) {
                out.push((heads.clone(), roles));
            }
        }
    }
    Ok(out)
}

/// Score of a tagged tree, each arc scored by the table of its role.
pub fn c2f_score(tagged: &TaggedTree, scores: &C2fArcScores) -> f64 {
    let (heads, roles) = tagged;
    (1..heads.len())
        .map(|m| match roles[m] {
            ArcRole::Intra => scores.intra().get(heads[m], m),
            ArcRole::Inter => scores.inter().get(heads[m], m),
        })
        .sum()
}

pub fn brute_c2f_log_z(tagged: &[TaggedTree], scores: &C2fArcScores) -> Result<f64> {
    if tagged.is_empty() {
        return Err(Error::EmptyForest);
    }
    let values: Vec<f64> = tagged.iter().map(|t| c2f_score(t, scores)).collect();
    Ok(log_sum_exp(&values))
}

pub fn brute_c2f_argmax(tagged: &[TaggedTree], scores: &C2fArcScores) -> Result<(TaggedTree, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, t) in tagged.iter().enumerate() {
        let s = c2f_score(t, scores);
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((i, s));
        }
    }
    best.map(|(i, s)| (tagged[i].clone(), s))
        .ok_or(Error::EmptyForest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{validate_heads, Segmentation};
    use std::collections::HashSet;

    /// Number of projective trees with a single ROOT child, n = 1..=9.
    const TREE_COUNTS: [usize; 9] = [1, 2, 7, 30, 143, 728, 3876, 21318, 120175];

    #[test]
    fn counts_are_frozen() {
        for n in 1..=MAX_N {
            assert_eq!(
                enumerate_projective(n).unwrap().len(),
                TREE_COUNTS[n - 1],
                "n={}",
                n
            );
        }
    }

    #[test]
    fn enumeration_is_valid_and_duplicate_free() {
        for n in 1..=7 {
            let trees = enumerate_projective(n).unwrap();
            let set: HashSet<_> = trees.iter().cloned().collect();
            assert_eq!(set.len(), trees.len());
            assert!(trees.iter().all(|t| validate_heads(t)));
        }
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(
            enumerate_projective(0),
            Err(Error::OracleRange(0))
        ));
        assert!(matches!(
            enumerate_projective(10),
            Err(Error::OracleRange(10))
        ));
    }

    #[test]
    fn singletons_leave_one_survivor() {
        let seg = Segmentation::singletons(4).unwrap();
        let spec = ForestSpec::new(seg, Some(vec![0, 2, 0, 2, 3])).unwrap();
        let trees = enumerate_projective(4).unwrap();
        let kept = filter_compatible(&trees, &spec);
        assert_eq!(kept, vec![vec![0, 2, 0, 2, 3]]);
    }

    #[test]
    fn figure_spec_keeps_both_structures() {
        let seg = Segmentation::from_lengths(&[2, 2, 2, 3]).unwrap();
        let spec = ForestSpec::new(seg, Some(vec![0, 2, 0, 2, 3])).unwrap();
        assert!(is_compatible(&[0, 2, 4, 4, 0, 4, 5, 9, 7, 5], &spec));
        // Leftward chains inside every word.
        assert!(is_compatible(&[0, 2, 4, 4, 0, 6, 4, 8, 9, 6], &spec));
        // Inter-word arc from a non-root character.
        assert!(!is_compatible(&[0, 2, 3, 4, 0, 4, 5, 9, 7, 5], &spec));
    }

    #[test]
    fn brute_on_singleton() {
        let scores = ArcScores::from_fn(1, |h, m| (h + m) as f64);
        let trees = enumerate_projective(1).unwrap();
        assert_eq!(brute_log_z(&trees, &scores).unwrap(), 1.0);
        assert_eq!(brute_argmax(&trees, &scores).unwrap().1, 1.0);
        assert!(brute_log_z(&[], &scores).is_err());
    }

    #[test]
    fn c2f_enumeration_small() {
        // n = 1: a single ROOT arc.
        assert_eq!(enumerate_c2f(1, true).unwrap().len(), 1);
        // n = 2: two trees, each with one taggable arc.
        assert_eq!(enumerate_c2f(2, true).unwrap().len(), 4);
        // The exclusion only removes derivations.
        for n in 1..=5 {
            assert!(
                enumerate_c2f(n, true).unwrap().len() <= enumerate_c2f(n, false).unwrap().len()
            );
        }
        assert!(enumerate_c2f(5, true).unwrap().len() < enumerate_c2f(5, false).unwrap().len());
    }
}
