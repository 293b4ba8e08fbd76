//! Rule-driven branching simulation: frontier-state dynamic program,
//! dominance-free subset counting, seeded instance generation, and the
//! experiment harness.

pub mod experiment;
pub mod frontier;
pub mod generate;
pub mod rng;
pub mod subsets;

pub use experiment::{
    aggregate_records, instance_seed, run_experiment, run_experiment_with_progress,
    simulate_instance_records, ExperimentConfig, ExperimentResult, ExperimentRow, InstanceRecord,
    SimStatus,
};
pub use frontier::{
    enumerate_frontiers, enumerate_frontiers_budgeted, simulate_tree_size,
    simulate_tree_size_by_used_set, FrontierState, SimError, DEFAULT_STATE_BUDGET,
};
pub use generate::{generate_instance, generate_unit_points, generate_variables, Category};
pub use rng::{derive_seed, splitmix64, Xoshiro256PlusPlus};
pub use subsets::{
    count_nondominated_subsets, count_nondominated_subsets_points,
    count_nondominated_subsets_unique, expected_nondominated_count,
};
