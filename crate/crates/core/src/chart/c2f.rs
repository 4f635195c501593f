//! Coarse-to-fine deduction: intra-word (hatted) spans are built from
//! intra-word spans only, inter-word spans from anything.
//!
//! Arc slots `0..(n+1)^2` carry inter-word scores, the next `(n+1)^2` slots
//! intra-word scores.

use super::hypergraph::{Hypergraph, NONE};
use super::semiring::weight;
use crate::types::C2fArcScores;

// Intra-word (hat) tables.
const HCR: usize = 0;
const HCL: usize = 1;
const HIR: usize = 2;
const HIL: usize = 3;
// Inter-word tables.
const CR: usize = 4;
const CL: usize = 5;
const IR: usize = 6;
const IL: usize = 7;

struct Items {
    n: usize,
}

impl Items {
    #[inline]
    fn id(&self, table: usize, i: usize, j: usize) -> u32 {
        let w = self.n + 1;
        (table * w * w + i * w + j) as u32
    }

    fn count(&self) -> usize {
        8 * (self.n + 1) * (self.n + 1) + 1
    }

    fn goal(&self) -> u32 {
        (self.count() - 1) as u32
    }
}

/// Role an arc plays in a coarse-to-fine derivation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArcRole {
    Intra,
    Inter,
}

#[inline]
pub(crate) fn inter_slot(n: usize, h: usize, m: usize) -> u32 {
    (h * (n + 1) + m) as u32
}

#[inline]
pub(crate) fn intra_slot(n: usize, h: usize, m: usize) -> u32 {
    ((n + 1) * (n + 1) + h * (n + 1) + m) as u32
}

/// Decodes a slot into `(role, head, modifier)`.
pub(crate) fn decode_slot(n: usize, slot: u32) -> (ArcRole, usize, usize) {
    let sq = (n + 1) * (n + 1);
    let slot = slot as usize;
    let (role, rest) = if slot >= sq {
        (ArcRole::Intra, slot - sq)
    } else {
        (ArcRole::Inter, slot)
    };
    (role, rest / (n + 1), rest % (n + 1))
}

/// `root_as_head` drops the rule combining an intra-word incomplete span
/// with an inter-word complete span (and its mirror image).
pub(crate) fn build(n: usize, root_as_head: bool) -> Hypergraph {
    let it = Items { n };
    let mut g = Hypergraph::new(it.count(), it.goal());
    for i in 1..=n {
        g.axiom(it.id(HCR, i, i));
        g.axiom(it.id(HCL, i, i));
    }
    for w in 1..n {
        for i in 1..=(n - w) {
            let j = i + w;
            // Link rules, rightward then leftward.
            for (hat_head, head, intra, inter) in [
                (HIR, IR, intra_slot(n, i, j), inter_slot(n, i, j)),
                (HIL, IL, intra_slot(n, j, i), inter_slot(n, j, i)),
            ] {
                let hat = it.id(hat_head, i, j);
                for k in i..j {
                    g.edge(hat, it.id(HCR, i, k), it.id(HCL, k + 1, j), intra);
                }
                let full = it.id(head, i, j);
                for k in i..j {
                    g.edge(full, it.id(HCR, i, k), it.id(HCL, k + 1, j), inter);
                    g.edge(full, it.id(HCR, i, k), it.id(CL, k + 1, j), inter);
                    g.edge(full, it.id(CR, i, k), it.id(HCL, k + 1, j), inter);
                    g.edge(full, it.id(CR, i, k), it.id(CL, k + 1, j), inter);
                }
            }
            // Right complete spans.
            let hat = it.id(HCR, i, j);
            for k in (i + 1)..=j {
                g.edge(hat, it.id(HIR, i, k), it.id(HCR, k, j), NONE);
            }
            let full = it.id(CR, i, j);
            for k in (i + 1)..=j {
                if !root_as_head {
                    g.edge(full, it.id(HIR, i, k), it.id(CR, k, j), NONE);
                }
                g.edge(full, it.id(IR, i, k), it.id(HCR, k, j), NONE);
                g.edge(full, it.id(IR, i, k), it.id(CR, k, j), NONE);
            }
            // Left complete spans.
            let hat = it.id(HCL, i, j);
            for k in i..j {
                g.edge(hat, it.id(HCL, i, k), it.id(HIL, k, j), NONE);
            }
            let full = it.id(CL, i, j);
            for k in i..j {
                if !root_as_head {
                    g.edge(full, it.id(CL, i, k), it.id(HIL, k, j), NONE);
                }
                g.edge(full, it.id(HCL, i, k), it.id(IL, k, j), NONE);
                g.edge(full, it.id(CL, i, k), it.id(IL, k, j), NONE);
            }
        }
    }
    let goal = it.goal();
    for r in 1..=n {
        let arc = inter_slot(n, 0, r);
        g.edge(goal, it.id(HCL, 1, r), it.id(HCR, r, n), arc);
        g.edge(goal, it.id(HCL, 1, r), it.id(CR, r, n), arc);
        g.edge(goal, it.id(CL, 1, r), it.id(HCR, r, n), arc);
        g.edge(goal, it.id(CL, 1, r), it.id(CR, r, n), arc);
    }
    g
}

pub(crate) fn weights(scores: &C2fArcScores) -> Vec<f64> {
    let mut w: Vec<f64> = scores
        .inter()
        .as_slice()
        .iter()
        .map(|&s| weight(s))
        .collect();
    w.extend(scores.intra().as_slice().iter().map(|&s| weight(s)));
    w
}
