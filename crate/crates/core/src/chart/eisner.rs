//! First-order projective parsing over a single arc score table.
//!
//! Items are complete spans `C(i->j)`, `C(i<-j)` and incomplete spans
//! `I(i->j)`, `I(i<-j)` over characters 1..=n. ROOT attaches to exactly one
//! character `r` through the goal rule `s(0,r) + C(1<-r) + C(r->n)`.

use super::hypergraph::{Hypergraph, NONE};
use super::masks::SpanMasks;
use super::semiring::weight;
use crate::types::ArcScores;

const CR: usize = 0;
const CL: usize = 1;
const IR: usize = 2;
const IL: usize = 3;

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
        4 * (self.n + 1) * (self.n + 1) + 1
    }

    fn goal(&self) -> u32 {
        (self.count() - 1) as u32
    }
}

#[inline]
fn arc_slot(n: usize, h: usize, m: usize) -> u32 {
    (h * (n + 1) + m) as u32
}

pub(crate) fn build(n: usize, masks: &SpanMasks) -> Hypergraph {
    let items = Items { n };
    let mut g = Hypergraph::new(items.count(), items.goal());
    for i in 1..=n {
        g.axiom(items.id(CR, i, i));
        g.axiom(items.id(CL, i, i));
    }
    for w in 1..n {
        for i in 1..=(n - w) {
            let j = i + w;
            if masks.arc(i, j) {
                let head = items.id(IR, i, j);
                for k in i..j {
                    g.edge(
                        head,
                        items.id(CR, i, k),
                        items.id(CL, k + 1, j),
                        arc_slot(n, i, j),
                    );
                }
            }
            if masks.arc(j, i) {
                let head = items.id(IL, i, j);
                for k in i..j {
                    g.edge(
                        head,
                        items.id(CR, i, k),
                        items.id(CL, k + 1, j),
                        arc_slot(n, j, i),
                    );
                }
            }
            if masks.right_end(i, j) {
                let head = items.id(CR, i, j);
                for k in (i + 1)..=j {
                    if masks.right_comb(i, k, j) {
                        g.edge(head, items.id(IR, i, k), items.id(CR, k, j), NONE);
                    }
                }
            }
            if masks.left_end(i, j) {
                let head = items.id(CL, i, j);
                for k in i..j {
                    if masks.left_comb(i, k, j) {
                        g.edge(head, items.id(CL, i, k), items.id(IL, k, j), NONE);
                    }
                }
            }
        }
    }
    for r in 1..=n {
        if masks.arc(0, r) {
            g.edge(
                items.goal(),
                items.id(CL, 1, r),
                items.id(CR, r, n),
                arc_slot(n, 0, r),
            );
        }
    }
    g
}

/// Semiring weights in arc-slot layout.
pub(crate) fn weights(scores: &ArcScores) -> Vec<f64> {
    scores.as_slice().iter().map(|&s| weight(s)).collect()
}

/// Converts arc slots of a derivation into a head array.
pub(crate) fn heads_from_slots(n: usize, slots: &[u32]) -> Vec<usize> {
    let mut heads = vec![0; n + 1];
    for &slot in slots {
        let slot = slot as usize;
        heads[slot % (n + 1)] = slot / (n + 1);
    }
    heads
}
