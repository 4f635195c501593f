//! Packed derivation forests.
//!
//! Each chart algorithm compiles its deduction rules (with all structural
//! masks applied) into a hypergraph of binary hyperedges. Semiring passes
//! then run over the edge list: inside in edge order, outside in reverse.

use super::semiring::{log_add, Semiring};
use crate::error::{Error, Result};

pub(crate) const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Edge {
    pub head: u32,
    pub tails: [u32; 2],
    /// Arc weight slot, or [`NONE`].
    pub arc: u32,
}

/// Edges are stored grouped by head, heads in topological order: every
/// tail item is complete before the first edge that consumes it.
#[derive(Clone, Debug)]
pub(crate) struct Hypergraph {
    num_items: usize,
    axioms: Vec<u32>,
    edges: Vec<Edge>,
    goal: u32,
}

pub(crate) struct InsideChart {
    pub values: Vec<f64>,
    pub best: Vec<u32>,
}

impl Hypergraph {
    pub fn new(num_items: usize, goal: u32) -> Self {
        Hypergraph {
            num_items,
            axioms: Vec::new(),
            edges: Vec::new(),
            goal,
        }
    }

    pub fn axiom(&mut self, item: u32) {
        self.axioms.push(item);
    }

    pub fn edge(&mut self, head: u32, left: u32, right: u32, arc: u32) {
        self.edges.push(Edge {
            head,
            tails: [left, right],
            arc,
        });
    }

    #[inline]
    fn edge_weight(edge: &Edge, weights: &[f64]) -> f64 {
        if edge.arc == NONE {
            0.0
        } else {
            weights[edge.arc as usize]
        }
    }

    pub fn inside<S: Semiring>(&self, weights: &[f64]) -> InsideChart {
        let mut values = vec![S::zero(); self.num_items];
        let mut best = vec![NONE; self.num_items];
        for &a in &self.axioms {
            values[a as usize] = S::one();
        }
        for (idx, edge) in self.edges.iter().enumerate() {
            let w = Self::edge_weight(edge, weights);
            if w == f64::NEG_INFINITY {
                continue;
            }
            let l = values[edge.tails[0] as usize];
            let r = values[edge.tails[1] as usize];
            if l == f64::NEG_INFINITY || r == f64::NEG_INFINITY {
                continue;
            }
            let candidate = S::times(S::times(l, r), w);
            if S::plus_assign(&mut values[edge.head as usize], candidate) {
                best[edge.head as usize] = idx as u32;
            }
        }
        InsideChart { values, best }
    }

    pub fn goal_value(&self, chart: &InsideChart) -> f64 {
        chart.values[self.goal as usize]
    }

    /// Outside scores in the log semiring.
    pub fn outside(&self, weights: &[f64], inside: &[f64]) -> Vec<f64> {
        let mut outside = vec![f64::NEG_INFINITY; self.num_items];
        outside[self.goal as usize] = 0.0;
        for edge in self.edges.iter().rev() {
            let o = outside[edge.head as usize];
            if o == f64::NEG_INFINITY {
                continue;
            }
            let w = Self::edge_weight(edge, weights);
            if w == f64::NEG_INFINITY {
                continue;
            }
            let [l, r] = edge.tails;
            let (li, ri) = (inside[l as usize], inside[r as usize]);
            outside[l as usize] = log_add(outside[l as usize], o + w + ri);
            outside[r as usize] = log_add(outside[r as usize], o + w + li);
        }
        outside
    }

    /// Log-partition and posterior probability of every arc slot.
    pub fn marginals(&self, weights: &[f64]) -> Result<(f64, Vec<f64>)> {
        let chart = self.inside::<super::semiring::SumProduct>(weights);
        let log_z = self.goal_value(&chart);
        if log_z == f64::NEG_INFINITY {
            return Err(Error::EmptyForest);
        }
        let outside = self.outside(weights, &chart.values);
        let mut marginals = vec![0.0; weights.len()];
        for edge in &self.edges {
            if edge.arc == NONE {
                continue;
            }
            let w = weights[edge.arc as usize];
            let o = outside[edge.head as usize];
            let l = chart.values[edge.tails[0] as usize];
            let r = chart.values[edge.tails[1] as usize];
            let log_p = o + w + l + r - log_z;
            if log_p > f64::NEG_INFINITY {
                marginals[edge.arc as usize] += log_p.exp();
            }
        }
        Ok((log_z, marginals))
    }

    /// Arc slots used by the best derivation recorded in `chart`.
    pub fn best_arcs(&self, chart: &InsideChart) -> Result<Vec<u32>> {
        if chart.best[self.goal as usize] == NONE {
            return Err(Error::NoValidTree);
        }
        let mut arcs = Vec::new();
        let mut stack = vec![self.goal];
        while let Some(item) = stack.pop() {
            let e = chart.best[item as usize];
            if e == NONE {
                // Axiom.
                continue;
            }
            let edge = &self.edges[e as usize];
            if edge.arc != NONE {
                arcs.push(edge.arc);
            }
            stack.extend_from_slice(&edge.tails);
        }
        Ok(arcs)
    }
}
