//! Seeded rule-comparison experiments and their aggregation.
//!
//! Each configured (category, gap) cell simulates the same seeded instances
//! under every rule and reports, per rule, the geometric-mean tree size
//! relative to the product rule as a signed percentage (negative means
//! smaller trees). Instances on which any rule is infeasible or overflows
//! are excluded from the means and counted separately. All rows are
//! reproducible from the master seed alone; per-instance work is
//! independent, so callers may fan records out to workers and aggregate.

use alloc::vec::Vec;

use crate::model::{Gap, TreeSize};
use crate::scoring::{RuleKind, ScoringParams, SelectionRule};
use crate::sim::frontier::{simulate_tree_size, SimError};
use crate::sim::generate::{generate_instance, Category};
use crate::sim::rng::derive_seed;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub category: Category,
    pub n_vars: usize,
    pub gaps: Vec<i64>,
    pub n_instances: usize,
    pub seed: u64,
    pub rules: Vec<RuleKind>,
    pub params: ScoringParams,
}

/// How a single (instance, rule) simulation ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimStatus {
    Ok,
    Infeasible,
    Overflow,
}

impl SimStatus {
    pub fn name(&self) -> &'static str {
        match self {
            SimStatus::Ok => "ok",
            SimStatus::Infeasible => "infeasible",
            SimStatus::Overflow => "overflow",
        }
    }
}

/// One simulated (instance, rule) outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceRecord {
    pub category: Category,
    pub gap: i64,
    pub instance_id: usize,
    pub seed: u64,
    pub rule: RuleKind,
    pub status: SimStatus,
    /// Node count when `status` is `Ok`.
    pub size: Option<u128>,
}

/// Aggregated cell of the result table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentRow {
    pub category: Category,
    pub gap: i64,
    pub rule: RuleKind,
    /// Geometric mean tree size over the included instances; `None` when
    /// every instance was excluded.
    pub geomean: Option<f64>,
    /// Percent change of the geometric mean versus the product rule
    /// (negative = smaller trees); `None` when product was not run or
    /// nothing was included.
    pub rel_pct: Option<f64>,
    pub included: usize,
    pub excluded: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub records: Vec<InstanceRecord>,
    pub rows: Vec<ExperimentRow>,
}

/// The seed of instance `instance_id` of `cat` under `master`. Gaps do not
/// enter: every gap of a category re-simulates the same instances.
pub fn instance_seed(master: u64, cat: Category, instance_id: usize) -> u64 {
    derive_seed(master, &[cat.id(), instance_id as u64])
}

/// Simulates one seeded instance at one gap under each rule, with fresh
/// rule state per rule.
pub fn simulate_instance_records(
    cat: Category,
    gap: i64,
    n_vars: usize,
    master_seed: u64,
    instance_id: usize,
    rules: &[RuleKind],
    params: &ScoringParams,
) -> Result<Vec<InstanceRecord>, SimError> {
    let seed = instance_seed(master_seed, cat, instance_id);
    let inst = generate_instance(cat, n_vars, seed, Gap(gap));
    let mut out = Vec::with_capacity(rules.len());
    for &kind in rules {
        let mut rule = SelectionRule::new(kind, *params);
        let (status, size) = match simulate_tree_size(&inst, &mut rule) {
            Ok(TreeSize::Finite(n)) => (SimStatus::Ok, Some(n)),
            Ok(TreeSize::Infeasible) => (SimStatus::Infeasible, None),
            Err(SimError::Overflow) => (SimStatus::Overflow, None),
            Err(e) => return Err(e),
        };
        out.push(InstanceRecord {
            category: cat,
            gap,
            instance_id,
            seed,
            rule: kind,
            status,
            size,
        });
    }
    Ok(out)
}

/// Groups records into table rows: per (gap, rule), the geometric mean over
/// instances where every rule finished, and its percent change versus the
/// product rule.
pub fn aggregate_records(
    cat: Category,
    gaps: &[i64],
    rules: &[RuleKind],
    records: &[InstanceRecord],
) -> Vec<ExperimentRow> {
    let mut rows = Vec::new();
    for &gap in gaps {
        let at_gap: Vec<&InstanceRecord> =
            records.iter().filter(|r| r.gap == gap).collect();
        // An instance counts only when every rule produced a finite size.
        let mut instance_ids: Vec<usize> = at_gap.iter().map(|r| r.instance_id).collect();
        instance_ids.sort_unstable();
        instance_ids.dedup();
        let included_ids: Vec<usize> = instance_ids
            .iter()
            .copied()
            .filter(|&id| {
                rules.iter().all(|&rule| {
                    at_gap
                        .iter()
                        .any(|r| r.instance_id == id && r.rule == rule && r.status == SimStatus::Ok)
                })
            })
            .collect();
        let excluded = instance_ids.len() - included_ids.len();

        let mean_ln = |rule: RuleKind| -> Option<f64> {
            if included_ids.is_empty() {
                return None;
            }
            let sum: f64 = at_gap
                .iter()
                .filter(|r| r.rule == rule && included_ids.binary_search(&r.instance_id).is_ok())
                .map(|r| libm::log(r.size.expect("included instances are finite") as f64))
                .sum();
            Some(sum / included_ids.len() as f64)
        };

        let product_ln = if rules.contains(&RuleKind::Product) {
            mean_ln(RuleKind::Product)
        } else {
            None
        };
        for &rule in rules {
            let ln = mean_ln(rule);
            rows.push(ExperimentRow {
                category: cat,
                gap,
                rule,
                geomean: ln.map(libm::exp),
                rel_pct: match (ln, product_ln) {
                    (Some(ln), Some(p)) => Some(100.0 * (libm::exp(ln - p) - 1.0)),
                    _ => None,
                },
                included: included_ids.len(),
                excluded,
            });
        }
    }
    rows
}

/// Runs the whole configuration sequentially. `progress` is called after
/// each simulated (gap, instance) pair with (done, total).
pub fn run_experiment_with_progress(
    cfg: &ExperimentConfig,
    mut progress: impl FnMut(usize, usize),
) -> Result<ExperimentResult, SimError> {
    let total = cfg.gaps.len() * cfg.n_instances;
    let mut done = 0;
    let mut records = Vec::with_capacity(total * cfg.rules.len());
    for &gap in &cfg.gaps {
        for instance_id in 0..cfg.n_instances {
            let recs = simulate_instance_records(
                cfg.category,
                gap,
                cfg.n_vars,
                cfg.seed,
                instance_id,
                &cfg.rules,
                &cfg.params,
            )?;
            records.extend(recs);
            done += 1;
            progress(done, total);
        }
    }
    let rows = aggregate_records(cfg.category, &cfg.gaps, &cfg.rules, &records);
    Ok(ExperimentResult { records, rows })
}

/// [`run_experiment_with_progress`] without the callback.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult, SimError> {
    run_experiment_with_progress(cfg, |_, _| {})
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn product_only_config_is_all_zero() {
        let cfg = ExperimentConfig {
            category: Category::Balanced,
            n_vars: 8,
            gaps: vec![1500],
            n_instances: 10,
            seed: 5,
            rules: vec![RuleKind::Product],
            params: ScoringParams::default(),
        };
        let result = run_experiment(&cfg).unwrap();
        for row in &result.rows {
            assert_eq!(row.rel_pct, Some(0.0));
        }
    }

    #[test]
    fn rows_are_reproducible_from_seed() {
        let cfg = ExperimentConfig {
            category: Category::ExtremelyUnbalanced,
            n_vars: 10,
            gaps: vec![400, 800],
            n_instances: 6,
            seed: 99,
            rules: vec![RuleKind::Product, RuleKind::Svts],
            params: ScoringParams::default(),
        };
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), 4);
    }

    #[test]
    fn same_instances_across_gaps() {
        let s1 = instance_seed(7, Category::Balanced, 3);
        let s2 = instance_seed(7, Category::Balanced, 3);
        assert_eq!(s1, s2);
        assert_ne!(s1, instance_seed(7, Category::Balanced, 4));
        assert_ne!(s1, instance_seed(7, Category::Unbalanced, 3));
    }

    #[test]
    fn infeasible_instances_are_excluded_and_counted() {
        // Tiny variable budget with a huge gap: everything infeasible.
        let cfg = ExperimentConfig {
            category: Category::ExtremelyUnbalanced,
            n_vars: 2,
            gaps: vec![100_000],
            n_instances: 4,
            seed: 1,
            rules: vec![RuleKind::Product],
            params: ScoringParams::default(),
        };
        let result = run_experiment(&cfg).unwrap();
        let row = &result.rows[0];
        assert_eq!(row.included, 0);
        assert_eq!(row.excluded, 4);
        assert_eq!(row.geomean, None);
        assert_eq!(row.rel_pct, None);
    }

    #[test]
    fn parallel_style_aggregation_matches_sequential() {
        let cfg = ExperimentConfig {
            category: Category::Unbalanced,
            n_vars: 9,
            gaps: vec![900],
            n_instances: 8,
            seed: 21,
            rules: vec![RuleKind::Product, RuleKind::Ratio],
            params: ScoringParams::default(),
        };
        let sequential = run_experiment(&cfg).unwrap();
        // Simulate instances out of order, as independent workers would.
        let mut records = Vec::new();
        for instance_id in (0..cfg.n_instances).rev() {
            records.extend(
                simulate_instance_records(
                    cfg.category,
                    900,
                    cfg.n_vars,
                    cfg.seed,
                    instance_id,
                    &cfg.rules,
                    &cfg.params,
                )
                .unwrap(),
            );
        }
        let rows = aggregate_records(cfg.category, &cfg.gaps, &cfg.rules, &records);
        assert_eq!(rows, sequential.rows);
    }
}
