//! The dominance DAG over an instance's variables and its transitive
//! reduction.
//!
//! Variable `u` dominates `v` when both gains of `u` are at least those of
//! `v` and one is strictly larger. Dominance is irreflexive and transitive,
//! so the full edge set `u -> v iff u dominates v` is a transitively closed
//! DAG and its transitive reduction (the covering relation) is unique.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::model::Variable;

/// A square bit matrix with rows packed into `u64` blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> BitMatrix {
        let words = n.div_ceil(64).max(1);
        BitMatrix {
            n,
            words,
            rows: vec![0; n * words],
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn set(&mut self, row: usize, col: usize) {
        self.rows[row * self.words + col / 64] |= 1u64 << (col % 64);
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.rows[row * self.words + col / 64] & (1u64 << (col % 64)) != 0
    }

    fn row(&self, row: usize) -> &[u64] {
        &self.rows[row * self.words..(row + 1) * self.words]
    }

    pub fn iter_row(&self, row: usize) -> impl Iterator<Item = usize> + '_ {
        let words = self.row(row);
        (0..self.n).filter(move |&c| words[c / 64] & (1u64 << (c % 64)) != 0)
    }

    pub fn count_ones(&self) -> usize {
        self.rows.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// In-place transitive closure (repeated row-ORs in reverse topological
    /// sweeps until a fixpoint; adequate for the sizes used here).
    pub fn close_transitively(&mut self) {
        let mut changed = true;
        while changed {
            changed = false;
            for u in 0..self.n {
                for v in 0..self.n {
                    if u != v && self.get(u, v) {
                        for w in 0..self.words {
                            let extra = self.rows[v * self.words + w]
                                & !self.rows[u * self.words + w];
                            if extra != 0 {
                                self.rows[u * self.words + w] |= extra;
                                changed = true;
                            }
                        }
                    }
                }
            }
        }
        // A closed dominance relation is still irreflexive.
        for u in 0..self.n {
            debug_assert!(!self.get(u, u), "dominance closure produced a cycle");
        }
    }
}

/// The dominance relation over a set of variables: the full (transitively
/// closed) edge set, its unique transitive reduction, and per-node indegrees
/// in the reduced graph.
#[derive(Debug, Clone)]
pub struct DominanceDag {
    variables: Vec<Variable>,
    full: BitMatrix,
    reduced: BitMatrix,
    indegree: Vec<u32>,
}

impl DominanceDag {
    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    /// `u -> v` edges of the full dominance relation.
    pub fn full_edges(&self) -> &BitMatrix {
        &self.full
    }

    /// Edges of the transitive reduction (the covering relation).
    pub fn reduced_edges(&self) -> &BitMatrix {
        &self.reduced
    }

    /// Indegree of each node in the reduced graph.
    pub fn indegree(&self) -> &[u32] {
        &self.indegree
    }

    pub fn full_edge(&self, u: usize, v: usize) -> bool {
        self.full.get(u, v)
    }

    pub fn reduced_edge(&self, u: usize, v: usize) -> bool {
        self.reduced.get(u, v)
    }

    /// Successors of `u` in the reduced graph (the variables it covers).
    pub fn reduced_successors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.reduced.iter_row(u)
    }

    /// Bitmask of all dominators of `v` (full-graph predecessors). Only
    /// valid for graphs with at most 64 nodes.
    pub fn dominators_mask(&self, v: usize) -> u64 {
        debug_assert!(self.len() <= 64);
        let mut mask = 0u64;
        for u in 0..self.len() {
            if self.full.get(u, v) {
                mask |= 1u64 << u;
            }
        }
        mask
    }

    /// The reduced graph in Graphviz DOT syntax, one node per variable.
    pub fn to_dot(&self) -> String {
        use core::fmt::Write;
        let mut out = String::from("digraph dominance {\n  rankdir=TB;\n");
        for (i, v) in self.variables.iter().enumerate() {
            let _ = writeln!(out, "  v{} [label=\"{}\"];", i, v);
        }
        for u in 0..self.len() {
            for v in self.reduced.iter_row(u) {
                let _ = writeln!(out, "  v{} -> v{};", u, v);
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Builds the dominance DAG of `vars` and its transitive reduction.
///
/// An edge `u -> v` of the full relation is redundant exactly when some `w`
/// has `u -> w -> v`; removing all redundant edges yields the unique
/// reduction. Quadratic-word work per edge, cubic overall, which is fine for
/// the at-most-64-variable workloads this models.
pub fn build_dominance_dag(vars: &[Variable]) -> DominanceDag {
    let n = vars.len();
    let mut full = BitMatrix::new(n);
    for u in 0..n {
        for v in 0..n {
            if u != v && vars[u].dominates(&vars[v]) {
                full.set(u, v);
            }
        }
    }
    let mut reduced = BitMatrix::new(n);
    for u in 0..n {
        for v in full.iter_row(u) {
            // u -> v is covering iff no w with u -> w and w -> v.
            let mut covering = true;
            for w in full.iter_row(u) {
                if w != v && full.get(w, v) {
                    covering = false;
                    break;
                }
            }
            if covering {
                reduced.set(u, v);
            }
        }
    }
    let mut indegree = vec![0u32; n];
    for u in 0..n {
        for v in reduced.iter_row(u) {
            indegree[v] += 1;
        }
    }
    DominanceDag {
        variables: vars.to_vec(),
        full,
        reduced,
        indegree,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(pairs: &[(u32, u32)]) -> Vec<Variable> {
        pairs.iter().map(|&(a, b)| Variable::new(a, b)).collect()
    }

    #[test]
    fn chain_reduces_to_covers() {
        // (3,3) dominates (2,2) dominates (1,1); the skip edge drops out.
        let dag = build_dominance_dag(&vars(&[(1, 1), (2, 2), (3, 3)]));
        assert!(dag.full_edge(2, 1) && dag.full_edge(2, 0) && dag.full_edge(1, 0));
        assert!(dag.reduced_edge(2, 1) && dag.reduced_edge(1, 0));
        assert!(!dag.reduced_edge(2, 0));
        assert_eq!(dag.indegree(), &[1, 1, 0]);
    }

    #[test]
    fn antichain_has_no_edges() {
        let dag = build_dominance_dag(&vars(&[(1, 3), (2, 2), (3, 1)]));
        assert_eq!(dag.full_edges().count_ones(), 0);
        assert_eq!(dag.reduced_edges().count_ones(), 0);
    }

    #[test]
    fn mixed_instance_edges() {
        // (9,9) and (5,10) both dominate (5,6) and are mutually incomparable.
        let dag = build_dominance_dag(&vars(&[(5, 6), (9, 9), (5, 10)]));
        assert!(dag.reduced_edge(1, 0));
        assert!(dag.reduced_edge(2, 0));
        assert!(!dag.full_edge(1, 2) && !dag.full_edge(2, 1));
        assert_eq!(dag.full_edges().count_ones(), 2);
        assert_eq!(dag.indegree(), &[2, 0, 0]);
    }

    #[test]
    fn duplicates_are_incomparable() {
        let dag = build_dominance_dag(&vars(&[(4, 7), (4, 7)]));
        assert_eq!(dag.full_edges().count_ones(), 0);
    }

    #[test]
    fn reclosing_reduction_gives_full() {
        let dag = build_dominance_dag(&vars(&[
            (1, 1),
            (2, 2),
            (3, 3),
            (1, 4),
            (2, 4),
            (5, 6),
            (5, 10),
            (9, 9),
        ]));
        let mut closed = dag.reduced_edges().clone();
        closed.close_transitively();
        assert_eq!(&closed, dag.full_edges());
    }

    #[test]
    fn dot_output_lists_nodes_and_edges() {
        let dag = build_dominance_dag(&vars(&[(1, 1), (2, 2)]));
        let dot = dag.to_dot();
        assert!(dot.contains("v1 -> v0"));
        assert!(dot.contains("label=\"(2,2)\""));
    }

    #[test]
    fn bitmatrix_wide_rows() {
        let mut m = BitMatrix::new(130);
        m.set(0, 129);
        m.set(129, 64);
        assert!(m.get(0, 129) && m.get(129, 64));
        assert!(!m.get(0, 64));
        assert_eq!(m.iter_row(129).collect::<Vec<_>>(), vec![64]);
    }
}
