//! Seeded random instance generation, by gain-balance category.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::model::{Gap, Instance, Multiplicities, Variable};
use crate::sim::rng::Xoshiro256PlusPlus;

/// Gain-balance categories. Each draws the two gains uniformly from its
/// ranges; the balanced category draws both from the full range and swaps
/// them into `l <= r` order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Category {
    Balanced,
    Unbalanced,
    VeryUnbalanced,
    ExtremelyUnbalanced,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::Balanced,
        Category::Unbalanced,
        Category::VeryUnbalanced,
        Category::ExtremelyUnbalanced,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Category::Balanced => "balanced",
            Category::Unbalanced => "unbalanced",
            Category::VeryUnbalanced => "very-unbalanced",
            Category::ExtremelyUnbalanced => "extremely-unbalanced",
        }
    }

    /// Stable id used for seed derivation.
    pub fn id(&self) -> u64 {
        match self {
            Category::Balanced => 0,
            Category::Unbalanced => 1,
            Category::VeryUnbalanced => 2,
            Category::ExtremelyUnbalanced => 3,
        }
    }

    pub fn l_range(&self) -> (u32, u32) {
        match self {
            Category::Balanced => (1, 1000),
            Category::Unbalanced => (1, 500),
            Category::VeryUnbalanced => (1, 250),
            Category::ExtremelyUnbalanced => (1, 125),
        }
    }

    pub fn r_range(&self) -> (u32, u32) {
        match self {
            Category::Balanced => (1, 1000),
            Category::Unbalanced => (501, 1000),
            Category::VeryUnbalanced => (251, 1000),
            Category::ExtremelyUnbalanced => (126, 1000),
        }
    }

    /// The small/medium/large gap ladder of the full-scale experiment.
    pub fn full_gaps(&self) -> [i64; 3] {
        match self {
            Category::Balanced => [5000, 9000, 12000],
            Category::Unbalanced => [4000, 7000, 9000],
            Category::VeryUnbalanced => [3000, 5000, 6000],
            Category::ExtremelyUnbalanced => [2000, 3000, 3500],
        }
    }

    /// Desk-scale gap: half of the small full-scale gap.
    pub fn desk_gap(&self) -> i64 {
        self.full_gaps()[0] / 2
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for Category {
    type Err = ();

    fn from_str(s: &str) -> Result<Category, ()> {
        match s {
            "balanced" => Ok(Category::Balanced),
            "unbalanced" => Ok(Category::Unbalanced),
            "very-unbalanced" => Ok(Category::VeryUnbalanced),
            "extremely-unbalanced" => Ok(Category::ExtremelyUnbalanced),
            _ => Err(()),
        }
    }
}

/// Draws `n` variables for `cat`, deterministically from `seed`.
///
/// Per variable the `l` gain is drawn first, then `r`, then the pair is
/// swapped into `l <= r` order (a no-op outside the balanced category).
pub fn generate_variables(cat: Category, n: usize, seed: u64) -> Vec<Variable> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let (l_lo, l_hi) = cat.l_range();
    let (r_lo, r_hi) = cat.r_range();
    (0..n)
        .map(|_| {
            let l = rng.uniform_u32(l_lo, l_hi);
            let r = rng.uniform_u32(r_lo, r_hi);
            Variable::new(l, r)
        })
        .collect()
}

/// A multiplicity-one instance of `n` variables from `cat` at `gap`.
pub fn generate_instance(cat: Category, n: usize, seed: u64, gap: Gap) -> Instance {
    let variables = generate_variables(cat, n, seed);
    Instance::from_parts(variables, Multiplicities(vec![1; n]), gap)
}

/// Unique-coordinate gain pairs drawn uniformly from the unit square, for
/// the statistical subset counts.
pub fn generate_unit_points(n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    (0..n).map(|_| (rng.next_f64(), rng.next_f64())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_respected() {
        let vars = generate_variables(Category::ExtremelyUnbalanced, 200, 7);
        for v in &vars {
            assert!((1..=125).contains(&v.left()));
            assert!((126..=1000).contains(&v.right()));
        }
        let vars = generate_variables(Category::Balanced, 200, 7);
        for v in &vars {
            assert!(v.left() <= v.right());
            assert!((1..=1000).contains(&v.left()));
            assert!((1..=1000).contains(&v.right()));
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let a = generate_instance(Category::Balanced, 60, 42, Gap(5000));
        let b = generate_instance(Category::Balanced, 60, 42, Gap(5000));
        assert_eq!(a, b);
        let c = generate_instance(Category::Balanced, 60, 43, Gap(5000));
        assert_ne!(a, c);
    }

    #[test]
    fn frozen_head_of_stream() {
        // First uniform [1,1000] draws under seed 42, pinned so any change
        // to the generator chain is caught loudly.
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(42);
        let head: alloc::vec::Vec<u32> = (0..8).map(|_| rng.uniform_u32(1, 1000)).collect();
        assert_eq!(head, alloc::vec![815, 319, 984, 702, 794, 589, 126, 606]);
    }

    #[test]
    fn desk_gaps_are_half_small() {
        assert_eq!(Category::Balanced.desk_gap(), 2500);
        assert_eq!(Category::Unbalanced.desk_gap(), 2000);
        assert_eq!(Category::VeryUnbalanced.desk_gap(), 1500);
        assert_eq!(Category::ExtremelyUnbalanced.desk_gap(), 1000);
    }
}
