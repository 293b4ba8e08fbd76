//! Exact optimal branching with per-variable multiplicity caps.
//!
//! The optimal tree may branch a dominated variable at the root, so this
//! solver searches the full multiplicity state space with no dominance
//! pruning. States are memoized on `(remaining multiplicities, gap)`; the
//! multiplicity vector packs into a bitmask when all caps are one and into a
//! mixed-radix code otherwise. The total multiplicity budget keeps the state
//! space small enough for exact work.

use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;

use crate::model::{Instance, TreeSize, Variable};

/// Cap on the sum of multiplicities accepted by the exact solver.
pub const MULTIPLICITY_BUDGET: u64 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GvbError {
    /// The multiplicity budget was exceeded; the state space would not stay
    /// exactly enumerable.
    StateSpaceTooLarge { total: u64, budget: u64 },
    Overflow,
    /// Forcing the root on a variable with zero multiplicity.
    ForcedRootUnavailable { index: usize },
    /// The known-instance verifier found a value off its expected range.
    VerificationFailed,
}

impl fmt::Display for GvbError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GvbError::StateSpaceTooLarge { total, budget } => {
                write!(f, "total multiplicity {total} exceeds solver budget {budget}")
            }
            GvbError::Overflow => f.write_str("tree size exceeds 128 bits"),
            GvbError::ForcedRootUnavailable { index } => {
                write!(f, "forced root {index} has zero multiplicity")
            }
            GvbError::VerificationFailed => f.write_str("counterexample verification failed"),
        }
    }
}

/// Packs remaining multiplicities into a single state code.
struct StateCodec {
    strides: Vec<u64>,
}

impl StateCodec {
    fn new(caps: &[u32]) -> StateCodec {
        let mut strides = Vec::with_capacity(caps.len());
        let mut stride = 1u64;
        for &m in caps {
            strides.push(stride);
            stride *= m as u64 + 1;
        }
        StateCodec { strides }
    }

    fn encode(&self, remaining: &[u32]) -> u64 {
        remaining
            .iter()
            .zip(&self.strides)
            .map(|(&rem, &stride)| rem as u64 * stride)
            .sum()
    }
}

struct Solver<'a> {
    variables: &'a [Variable],
    codec: StateCodec,
    memo: HashMap<(u64, i64), TreeSize>,
}

impl<'a> Solver<'a> {
    fn new(inst: &'a Instance) -> Result<Solver<'a>, GvbError> {
        let total = inst.multiplicities().total();
        if total > MULTIPLICITY_BUDGET {
            return Err(GvbError::StateSpaceTooLarge {
                total,
                budget: MULTIPLICITY_BUDGET,
            });
        }
        Ok(Solver {
            variables: inst.variables(),
            codec: StateCodec::new(&inst.multiplicities().0),
            memo: HashMap::new(),
        })
    }

    fn solve(&mut self, remaining: &mut [u32], gap: i64) -> Result<TreeSize, GvbError> {
        if gap <= 0 {
            return Ok(TreeSize::LEAF);
        }
        if remaining.iter().all(|&m| m == 0) {
            return Ok(TreeSize::Infeasible);
        }
        let key = (self.codec.encode(remaining), gap);
        if let Some(&hit) = self.memo.get(&key) {
            return Ok(hit);
        }
        let mut best = TreeSize::Infeasible;
        for i in 0..self.variables.len() {
            if remaining[i] == 0 {
                continue;
            }
            remaining[i] -= 1;
            let size = self.branch_on(remaining, gap, i);
            remaining[i] += 1;
            best = best.min(size?);
        }
        self.memo.insert(key, best);
        Ok(best)
    }

    /// Size of the tree whose root branches variable `i`; `remaining` must
    /// already have `i` decremented.
    fn branch_on(&mut self, remaining: &mut [u32], gap: i64, i: usize) -> Result<TreeSize, GvbError> {
        let v = self.variables[i];
        let left = self.solve(remaining, gap - v.left() as i64)?;
        let right = self.solve(remaining, gap - v.right() as i64)?;
        TreeSize::branch(left, right).ok_or(GvbError::Overflow)
    }
}

/// Exact minimum tree size over every branching strategy, `Infeasible` when
/// the multiplicities cannot close the gap on some path.
pub fn gvb_opt_size(inst: &Instance) -> Result<TreeSize, GvbError> {
    let mut solver = Solver::new(inst)?;
    let mut remaining = inst.multiplicities().0.clone();
    solver.solve(&mut remaining, inst.gap().0)
}

/// Optimal size conditional on branching `root` at the root node.
pub fn gvb_opt_size_with_forced_root(inst: &Instance, root: usize) -> Result<TreeSize, GvbError> {
    if inst.multiplicities().0.get(root).copied().unwrap_or(0) == 0 {
        return Err(GvbError::ForcedRootUnavailable { index: root });
    }
    let mut solver = Solver::new(inst)?;
    let mut remaining = inst.multiplicities().0.clone();
    remaining[root] -= 1;
    solver.branch_on(&mut remaining, inst.gap().0, root)
}

/// The three-variable instance on which branching a dominated variable at
/// the root is strictly optimal: `(5,6)` is dominated by both `(9,9)` and
/// `(5,10)`, yet starting with it closes gap 15 in 9 nodes while any tree
/// rooted at a dominator needs at least 11.
pub fn dominated_root_instance() -> Instance {
    crate::model::validate_instance(&[(5, 6, 1), (9, 9, 1), (5, 10, 1)], 15)
        .expect("static instance is valid")
}

/// Verification record for [`verify_prop3_counterexample`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominatedRootReport {
    /// Unconstrained optimum (expected 9).
    pub optimal: TreeSize,
    /// Optimum when the root is forced on each variable, in instance order
    /// `(5,6), (9,9), (5,10)`.
    pub forced: [TreeSize; 3],
}

/// Checks that the dominated variable `(5,6)` is the unique good root of
/// [`dominated_root_instance`]: the optimum is 9 and is attained through it,
/// while both dominators force at least 11 nodes.
pub fn verify_prop3_counterexample() -> Result<DominatedRootReport, GvbError> {
    let inst = dominated_root_instance();
    let optimal = gvb_opt_size(&inst)?;
    let forced = [
        gvb_opt_size_with_forced_root(&inst, 0)?,
        gvb_opt_size_with_forced_root(&inst, 1)?,
        gvb_opt_size_with_forced_root(&inst, 2)?,
    ];
    let ok = optimal == TreeSize::Finite(9)
        && forced[0] == TreeSize::Finite(9)
        && forced[1].finite().is_some_and(|n| n >= 11)
        && forced[2].finite().is_some_and(|n| n >= 11);
    if !ok {
        return Err(GvbError::VerificationFailed);
    }
    Ok(DominatedRootReport { optimal, forced })
}
