//! Rule-driven tree simulation over dominance-free frontier states.
//!
//! With every multiplicity one and a selection rule that never prefers a
//! dominated variable, the set of not-yet-used variables along any path is
//! determined by its minimal (non-dominated) elements: the frontier. The
//! simulator therefore memoizes subtree sizes on `(frontier bitmask, gap)`
//! instead of `(used set, gap)`, which shrinks the state space from
//! exponential to the sub-exponential count of dominance-free subsets.
//!
//! When a frontier variable is used, only its immediate successors in the
//! transitively reduced dominance DAG can become available; a variable joins
//! the frontier when the user was its last unused dominator, checked with
//! one bitwise AND against the precomputed dominator masks.

use alloc::vec::Vec;
use core::fmt;

use hashbrown::{HashMap, HashSet};

use crate::dag::{build_dominance_dag, DominanceDag};
use crate::model::{Gap, Instance, TreeSize, Variable};
use crate::scoring::{ScoreError, SelectionRule};

/// Visited-state budget for [`enumerate_frontiers`].
pub const DEFAULT_STATE_BUDGET: usize = 100_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    /// The frontier encoding needs at most 64 variables.
    TooManyVariables { n: usize },
    /// The simulator handles the all-multiplicities-one setting only.
    MultiplicityNotUnit,
    /// The rule selected a variable outside the current frontier.
    RuleViolation { index: usize },
    Overflow,
    /// Frontier enumeration exceeded its state budget.
    StateExplosion { budget: usize },
    Score(ScoreError),
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::TooManyVariables { n } => {
                write!(f, "simulation supports at most 64 variables, got {n}")
            }
            SimError::MultiplicityNotUnit => {
                f.write_str("simulation requires every multiplicity to be exactly 1")
            }
            SimError::RuleViolation { index } => {
                write!(f, "rule selected variable {index} outside the frontier")
            }
            SimError::Overflow => f.write_str("tree size exceeds 128 bits"),
            SimError::StateExplosion { budget } => {
                write!(f, "frontier enumeration exceeded {budget} states")
            }
            SimError::Score(e) => e.fmt(f),
        }
    }
}

impl From<ScoreError> for SimError {
    fn from(e: ScoreError) -> SimError {
        SimError::Score(e)
    }
}

/// Precomputed dominance structure shared by a simulation run.
struct FrontierSpace {
    variables: Vec<Variable>,
    /// Bitmask of every variable's dominators (full relation).
    dominators: Vec<u64>,
    /// Bitmask of everything each variable dominates (full relation).
    dominated: Vec<u64>,
    /// Immediate successors in the reduced DAG.
    covers: Vec<Vec<u8>>,
}

impl FrontierSpace {
    fn new(variables: &[Variable]) -> Result<FrontierSpace, SimError> {
        let n = variables.len();
        if n > 64 {
            return Err(SimError::TooManyVariables { n });
        }
        let dag = build_dominance_dag(variables);
        let dominators = (0..n).map(|v| dag.dominators_mask(v)).collect();
        let dominated = (0..n)
            .map(|u| {
                let mut mask = 0u64;
                for v in dag.full_edges().iter_row(u) {
                    mask |= 1 << v;
                }
                mask
            })
            .collect();
        let covers = (0..n)
            .map(|u| dag.reduced_successors(u).map(|v| v as u8).collect())
            .collect();
        Ok(FrontierSpace {
            variables: variables.to_vec(),
            dominators,
            dominated,
            covers,
        })
    }

    fn initial_frontier(&self) -> u64 {
        let mut frontier = 0u64;
        for v in 0..self.variables.len() {
            if self.dominators[v] == 0 {
                frontier |= 1 << v;
            }
        }
        frontier
    }

    /// The unused set a frontier stands for: the frontier plus everything
    /// dominated by it.
    fn unused_of(&self, frontier: u64) -> u64 {
        let mut unused = frontier;
        let mut rest = frontier;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            unused |= self.dominated[i];
        }
        unused
    }

    /// Frontier after using variable `used` from `frontier`: drop it and
    /// admit every cover target whose dominators are now all used.
    fn advance(&self, frontier: u64, used: usize) -> u64 {
        debug_assert!(frontier & (1 << used) != 0);
        let unused_after = self.unused_of(frontier) & !(1u64 << used);
        let mut next = frontier & !(1u64 << used);
        for &v in &self.covers[used] {
            let v = v as usize;
            if self.dominators[v] & unused_after == 0 {
                next |= 1 << v;
            }
        }
        next
    }

    fn candidates(&self, frontier: u64) -> Vec<(usize, Variable)> {
        let mut out = Vec::with_capacity(frontier.count_ones() as usize);
        let mut rest = frontier;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out.push((i, self.variables[i]));
        }
        out
    }
}

/// A walkable frontier state carrying the explicit bookkeeping: available
/// mask, used mask, and each variable's count of unused dominators
/// (maintained by decrements along reduced-DAG edges).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrontierState {
    frontier: u64,
    used: u64,
    indegree: Vec<u32>,
}

impl FrontierState {
    /// The initial state of `dag`: available = the variables nothing
    /// dominates.
    pub fn initial(dag: &DominanceDag) -> FrontierState {
        assert!(dag.len() <= 64, "frontier states need at most 64 variables");
        let indegree: Vec<u32> = dag.indegree().to_vec();
        let mut frontier = 0u64;
        for v in 0..dag.len() {
            if indegree[v] == 0 {
                frontier |= 1 << v;
            }
        }
        FrontierState {
            frontier,
            used: 0,
            indegree,
        }
    }

    pub fn frontier(&self) -> u64 {
        self.frontier
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn is_exhausted(&self) -> bool {
        self.frontier == 0
    }

    /// Consumes frontier variable `i`, releasing any variable whose last
    /// unused dominator it was.
    pub fn use_variable(&mut self, i: usize, dag: &DominanceDag) {
        assert!(
            self.frontier & (1 << i) != 0,
            "variable {i} is not on the frontier"
        );
        self.frontier &= !(1u64 << i);
        self.used |= 1 << i;
        for v in dag.reduced_successors(i) {
            self.indegree[v] -= 1;
            if self.indegree[v] == 0 {
                debug_assert!(self.used & (1 << v) == 0);
                self.frontier |= 1 << v;
            }
        }
    }
}

fn check_unit_instance(inst: &Instance) -> Result<(), SimError> {
    if inst.len() > 64 {
        return Err(SimError::TooManyVariables { n: inst.len() });
    }
    if inst.multiplicities().0.iter().any(|&m| m != 1) {
        return Err(SimError::MultiplicityNotUnit);
    }
    Ok(())
}

/// Exact node count of the tree grown by always branching on `rule`'s pick
/// from the current frontier. `Infeasible` when some path runs out of
/// variables before its gap closes.
pub fn simulate_tree_size(inst: &Instance, rule: &mut SelectionRule) -> Result<TreeSize, SimError> {
    check_unit_instance(inst)?;
    let space = FrontierSpace::new(inst.variables())?;
    let mut memo: HashMap<(u64, i64), TreeSize> = HashMap::new();
    simulate_rec(
        &space,
        rule,
        &mut memo,
        space.initial_frontier(),
        inst.gap().0,
    )
}

fn simulate_rec(
    space: &FrontierSpace,
    rule: &mut SelectionRule,
    memo: &mut HashMap<(u64, i64), TreeSize>,
    frontier: u64,
    gap: i64,
) -> Result<TreeSize, SimError> {
    if gap <= 0 {
        return Ok(TreeSize::LEAF);
    }
    if frontier == 0 {
        return Ok(TreeSize::Infeasible);
    }
    if let Some(&hit) = memo.get(&(frontier, gap)) {
        return Ok(hit);
    }
    let candidates = space.candidates(frontier);
    let pick = rule.select(&candidates, Gap(gap))?;
    if frontier & (1 << pick) == 0 {
        return Err(SimError::RuleViolation { index: pick });
    }
    let next = space.advance(frontier, pick);
    let v = space.variables[pick];
    let left = simulate_rec(space, rule, memo, next, gap - v.left() as i64)?;
    let right = simulate_rec(space, rule, memo, next, gap - v.right() as i64)?;
    let size = TreeSize::branch(left, right).ok_or(SimError::Overflow)?;
    memo.insert((frontier, gap), size);
    Ok(size)
}

/// Validation twin of [`simulate_tree_size`]: memoizes on the raw used set
/// and recomputes the non-dominated candidates of the unused set by pairwise
/// comparison at every state, with none of the frontier bookkeeping. Slower
/// but assumption-free; the two must agree exactly.
pub fn simulate_tree_size_by_used_set(
    inst: &Instance,
    rule: &mut SelectionRule,
) -> Result<TreeSize, SimError> {
    check_unit_instance(inst)?;
    let vars = inst.variables();
    let mut memo: HashMap<(u64, i64), TreeSize> = HashMap::new();
    used_set_rec(vars, rule, &mut memo, 0, inst.gap().0)
}

fn used_set_rec(
    vars: &[Variable],
    rule: &mut SelectionRule,
    memo: &mut HashMap<(u64, i64), TreeSize>,
    used: u64,
    gap: i64,
) -> Result<TreeSize, SimError> {
    if gap <= 0 {
        return Ok(TreeSize::LEAF);
    }
    if used.count_ones() as usize == vars.len() {
        return Ok(TreeSize::Infeasible);
    }
    if let Some(&hit) = memo.get(&(used, gap)) {
        return Ok(hit);
    }
    // Minimal elements of the unused set, straight from the definition.
    let mut candidates: Vec<(usize, Variable)> = Vec::new();
    for i in 0..vars.len() {
        if used & (1 << i) != 0 {
            continue;
        }
        let dominated = (0..vars.len())
            .any(|j| j != i && used & (1 << j) == 0 && vars[j].dominates(&vars[i]));
        if !dominated {
            candidates.push((i, vars[i]));
        }
    }
    let pick = rule.select(&candidates, Gap(gap))?;
    if used & (1 << pick) != 0 || !candidates.iter().any(|&(i, _)| i == pick) {
        return Err(SimError::RuleViolation { index: pick });
    }
    let next = used | (1 << pick);
    let v = vars[pick];
    let left = used_set_rec(vars, rule, memo, next, gap - v.left() as i64)?;
    let right = used_set_rec(vars, rule, memo, next, gap - v.right() as i64)?;
    let size = TreeSize::branch(left, right).ok_or(SimError::Overflow)?;
    memo.insert((used, gap), size);
    Ok(size)
}

/// Every frontier reachable from the initial one by repeatedly consuming a
/// frontier variable, as bitmasks (the empty frontier included).
pub fn enumerate_frontiers(vars: &[Variable]) -> Result<HashSet<u64>, SimError> {
    enumerate_frontiers_budgeted(vars, DEFAULT_STATE_BUDGET)
}

/// [`enumerate_frontiers`] with an explicit visited-state budget.
pub fn enumerate_frontiers_budgeted(
    vars: &[Variable],
    budget: usize,
) -> Result<HashSet<u64>, SimError> {
    if vars.len() > 64 {
        return Err(SimError::TooManyVariables { n: vars.len() });
    }
    if vars.is_empty() {
        let mut set = HashSet::new();
        set.insert(0u64);
        return Ok(set);
    }
    let space = FrontierSpace::new(vars)?;
    let mut seen: HashSet<u64> = HashSet::new();
    let mut stack: Vec<u64> = Vec::new();
    let root = space.initial_frontier();
    seen.insert(root);
    stack.push(root);
    while let Some(frontier) = stack.pop() {
        let mut rest = frontier;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let next = space.advance(frontier, i);
            if seen.insert(next) {
                if seen.len() > budget {
                    return Err(SimError::StateExplosion { budget });
                }
                stack.push(next);
            }
        }
    }
    Ok(seen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_instance;
    use crate::scoring::{RuleKind, ScoringParams};

    fn product_rule() -> SelectionRule {
        SelectionRule::new(RuleKind::Product, ScoringParams::default())
    }

    #[test]
    fn single_variable_small_gap() {
        let inst = validate_instance(&[(2, 5, 1)], 2).unwrap();
        let size = simulate_tree_size(&inst, &mut product_rule()).unwrap();
        assert_eq!(size, TreeSize::Finite(3));
    }

    #[test]
    fn single_variable_runs_out() {
        // One branching closes at most (2,5); the left-left path stays open.
        let inst = validate_instance(&[(2, 5, 1)], 6).unwrap();
        let size = simulate_tree_size(&inst, &mut product_rule()).unwrap();
        assert_eq!(size, TreeSize::Infeasible);
    }

    #[test]
    fn closed_gap_is_single_leaf() {
        let inst = validate_instance(&[(3, 4, 1)], 0).unwrap();
        let size = simulate_tree_size(&inst, &mut product_rule()).unwrap();
        assert_eq!(size, TreeSize::LEAF);
    }

    #[test]
    fn product_walk_of_dominated_root_instance() {
        // Product branches (9,9) first, then (5,10), then (5,6): 11 nodes,
        // two more than the true optimum of 9.
        let inst = crate::gvb::dominated_root_instance();
        let size = simulate_tree_size(&inst, &mut product_rule()).unwrap();
        assert_eq!(size, TreeSize::Finite(11));
    }

    #[test]
    fn dominated_variable_waits_for_its_dominators() {
        let inst = crate::gvb::dominated_root_instance();
        let dag = build_dominance_dag(inst.variables());
        let mut state = FrontierState::initial(&dag);
        // (5,6) is dominated by both others, so it is not available.
        assert_eq!(state.frontier(), 0b110);
        state.use_variable(1, &dag);
        assert_eq!(state.frontier(), 0b100);
        state.use_variable(2, &dag);
        assert_eq!(state.frontier(), 0b001);
        state.use_variable(0, &dag);
        assert!(state.is_exhausted());
        assert_eq!(state.used(), 0b111);
    }

    #[test]
    fn both_simulators_agree_on_small_instances() {
        for seed in 0..30u64 {
            let inst = crate::sim::generate::generate_instance(
                crate::sim::Category::Balanced,
                8,
                seed,
                Gap(2000),
            );
            for kind in RuleKind::ALL {
                let mut fast_rule = SelectionRule::new(kind, ScoringParams::default());
                let mut slow_rule = SelectionRule::new(kind, ScoringParams::default());
                let fast = simulate_tree_size(&inst, &mut fast_rule).unwrap();
                let slow = simulate_tree_size_by_used_set(&inst, &mut slow_rule).unwrap();
                assert_eq!(fast, slow, "seed {seed} rule {kind}");
            }
        }
    }

    #[test]
    fn single_variable_matches_svb_when_feasible() {
        let inst = validate_instance(&[(3, 5, 1)], 3).unwrap();
        let sim = simulate_tree_size(&inst, &mut product_rule()).unwrap();
        let svb = crate::trees::svb_size(&Variable::new(3, 5), Gap(3)).unwrap();
        assert_eq!(sim, svb);
    }

    #[test]
    fn frontier_enumeration_of_chain_and_antichain() {
        let chain: Vec<Variable> = [(1, 1), (2, 2), (3, 3)]
            .iter()
            .map(|&(a, b)| Variable::new(a, b))
            .collect();
        assert_eq!(enumerate_frontiers(&chain).unwrap().len(), 4);

        let anti: Vec<Variable> = [(1, 3), (2, 2), (3, 1)]
            .iter()
            .map(|&(a, b)| Variable::new(a, b))
            .collect();
        assert_eq!(enumerate_frontiers(&anti).unwrap().len(), 8);

        assert_eq!(enumerate_frontiers(&[]).unwrap().len(), 1);
    }

    #[test]
    fn enumeration_budget_trips() {
        let anti: Vec<Variable> = (1..=16).map(|i| Variable::new(i, 40 - i)).collect();
        assert!(matches!(
            enumerate_frontiers_budgeted(&anti, 1000),
            Err(SimError::StateExplosion { budget: 1000 })
        ));
    }

    #[test]
    fn multiplicity_must_be_one() {
        let inst = validate_instance(&[(2, 5, 2)], 6).unwrap();
        assert!(matches!(
            simulate_tree_size(&inst, &mut product_rule()),
            Err(SimError::MultiplicityNotUnit)
        ));
    }
}
