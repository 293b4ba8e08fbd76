//! Counting dominance-free subsets.
//!
//! A subset of variables is dominance-free when no member dominates another
//! member. For variables with unique coordinates drawn independently, the
//! expected number of dominance-free subsets is `sum_k C(n,k)/k!`, which is
//! sub-exponential in `n` — the fact that makes the frontier-state
//! simulation tractable.

use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::model::Variable;

fn pair_dominates<T: PartialOrd + Copy>(a: (T, T), b: (T, T)) -> bool {
    a.0 >= b.0 && a.1 >= b.1 && (a.0 > b.0 || a.1 > b.1)
}

fn count_brute<T: PartialOrd + Copy>(pairs: &[(T, T)]) -> u64 {
    let n = pairs.len();
    assert!(n <= 20, "brute-force subset count is capped at 20 variables");
    // dominated_by[v] = bitmask of members dominating v.
    let mut dominated_by = [0u32; 20];
    for v in 0..n {
        for u in 0..n {
            if u != v && pair_dominates(pairs[u], pairs[v]) {
                dominated_by[v] |= 1 << u;
            }
        }
    }
    let mut count = 0u64;
    for mask in 0u32..(1u32 << n) {
        let mut rest = mask;
        let mut free = true;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if dominated_by[v] & mask != 0 {
                free = false;
                break;
            }
        }
        count += free as u64;
    }
    count
}

/// Counts dominance-free subsets by enumerating all `2^n` subsets
/// (`n <= 20`). Handles duplicate gains correctly.
pub fn count_nondominated_subsets(vars: &[Variable]) -> u64 {
    let pairs: Vec<(u32, u32)> = vars.iter().map(|v| (v.left(), v.right())).collect();
    count_brute(&pairs)
}

/// Brute-force count over raw points, for the continuous-draw statistics.
pub fn count_nondominated_subsets_points(points: &[(f64, f64)]) -> u64 {
    count_brute(points)
}

/// Counts dominance-free subsets of unique-coordinate points at any `n`.
///
/// With all first and all second coordinates distinct, a subset is
/// dominance-free exactly when sorting it by the first coordinate makes the
/// second strictly decreasing, so the subsets correspond to the strictly
/// decreasing subsequences of the sorted point list and a quadratic
/// prefix-sum recursion counts them.
pub fn count_nondominated_subsets_unique(points: &[(f64, f64)]) -> u128 {
    let n = points.len();
    let mut sorted: Vec<(f64, f64)> = points.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    for w in sorted.windows(2) {
        assert!(
            w[0].0 != w[1].0,
            "unique-coordinate count requires distinct first coordinates"
        );
    }
    // ending_at[i]: decreasing subsequences (in the second coordinate)
    // ending at i, including the singleton.
    let mut ending_at: Vec<u128> = Vec::with_capacity(n);
    let mut total = 1u128; // the empty subset
    for i in 0..n {
        let mut here = 1u128;
        for j in 0..i {
            if sorted[j].1 > sorted[i].1 {
                here += ending_at[j];
            }
        }
        ending_at.push(here);
        total += here;
    }
    total
}

/// Exact expected number of dominance-free subsets of `n` independent
/// unique-coordinate variables: `sum_{k=0}^{n} C(n,k) / k!`, evaluated as an
/// exact rational and reported as a float.
pub fn expected_nondominated_count(n: u32) -> f64 {
    // Common denominator n!: sum_k C(n,k) * n!/k!, all integers.
    let mut denominator = BigUint::one();
    for i in 1..=n {
        denominator *= i;
    }
    let mut numerator = BigUint::from(0u32);
    let mut binom = BigUint::one(); // C(n, k)
    let mut falling = denominator.clone(); // n! / k!
    for k in 0..=n {
        numerator += &binom * &falling;
        if k < n {
            binom = binom * (n - k) / (k + 1);
            falling /= k + 1;
        }
    }
    big_ratio_to_f64(&numerator, &denominator)
}

fn big_ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    let whole = num / den;
    let rem = num - &whole * den;
    let scale = 1u64 << 53;
    let frac = (rem * scale / den).to_f64().unwrap_or(0.0) / scale as f64;
    whole.to_f64().unwrap_or(f64::INFINITY) + frac
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::generate::generate_unit_points;

    fn vars(pairs: &[(u32, u32)]) -> Vec<Variable> {
        pairs.iter().map(|&(a, b)| Variable::new(a, b)).collect()
    }

    #[test]
    fn chain_counts_singletons() {
        // Chain of 3: only the empty set and the three singletons.
        let v = vars(&[(1, 1), (2, 2), (3, 3)]);
        assert_eq!(count_nondominated_subsets(&v), 4);
    }

    #[test]
    fn antichain_counts_everything() {
        let v = vars(&[(1, 3), (2, 2), (3, 1)]);
        assert_eq!(count_nondominated_subsets(&v), 8);
    }

    #[test]
    fn single_variable() {
        assert_eq!(count_nondominated_subsets(&vars(&[(4, 9)])), 2);
    }

    #[test]
    fn duplicates_are_mutually_free() {
        let v = vars(&[(5, 5), (5, 5)]);
        assert_eq!(count_nondominated_subsets(&v), 4);
    }

    #[test]
    fn unique_count_matches_brute_force() {
        for seed in 0..40 {
            let points = generate_unit_points(12, seed);
            assert_eq!(
                count_nondominated_subsets_unique(&points),
                count_nondominated_subsets_points(&points) as u128,
                "seed {seed}"
            );
        }
    }

    #[test]
    fn expected_count_small_values() {
        assert_eq!(expected_nondominated_count(0), 1.0);
        assert!((expected_nondominated_count(2) - 3.5).abs() < 1e-12);
        assert!((expected_nondominated_count(3) - 17.0 / 3.0).abs() < 1e-12);
        // n = 10 value used by the statistical checks.
        let e10 = expected_nondominated_count(10);
        assert!((e10 - 64.666_612).abs() < 1e-4, "got {e10}");
    }
}
