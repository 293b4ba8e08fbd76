//! The growth ratio of a branching variable and its algebraic
//! classification.
//!
//! The minimal single-variable tree size for a variable `(l, r)` grows like
//! `phi^G` where `phi` is the unique root `x >= 1` of the trinomial
//! `x^r - x^(r-l) - 1`. Scaling the gains to `(1, r/l)` turns this into
//! `x^q - x^(q-1) - 1` with `q = r/l`, whose root is `phi^l` and always lies
//! in `(1, 2]`. The solver works on the scaled form: a bracket-guarded
//! Laguerre iteration for moderate `q`, a fixed-point iteration
//! `x <- (1 - 1/x)^(-1/q)` for large `q`, and bisection as a last resort.

use alloc::collections::BTreeMap;
use core::fmt;

use libm::{fabs, pow, sqrt};

use crate::model::Variable;

/// Default tolerance on the scaled root.
pub const DEFAULT_PHI_TOL: f64 = 1e-12;

/// Iteration budget before falling back to bisection.
const MAX_ITERATIONS: u32 = 200;

/// Laguerre is used while `q = r/l` stays at or below this; beyond it the
/// fixed-point iteration converges faster per unit cost.
const LAGUERRE_MAX_Q: f64 = 200.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiMethod {
    Laguerre,
    FixedPoint,
    ClosedForm,
}

impl fmt::Display for PhiMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhiMethod::Laguerre => "laguerre",
            PhiMethod::FixedPoint => "fixed-point",
            PhiMethod::ClosedForm => "closed-form",
        })
    }
}

/// A solved growth ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiResult {
    /// The ratio itself, root `x >= 1` of `x^r - x^(r-l) - 1`.
    pub phi: f64,
    /// Root of the scaled trinomial, equal to `phi^l`.
    pub phi_pow_l: f64,
    /// Update steps the solver performed (0 for the closed form).
    pub iterations: u32,
    pub method: PhiMethod,
}

/// Warm-start cache: last scaled root per caller-chosen key.
///
/// Library callers key by gain pair ([`compute_phi`]); the simulator keys by
/// variable index so a variable with drifting gains warm-starts from its own
/// previous root. A single cache must stick to one keying scheme.
#[derive(Debug, Clone, Default)]
pub struct PhiCache {
    entries: BTreeMap<u64, f64>,
}

impl PhiCache {
    pub fn new() -> PhiCache {
        PhiCache::default()
    }

    pub fn get(&self, key: u64) -> Option<f64> {
        self.entries.get(&key).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn insert(&mut self, key: u64, scaled_root: f64) {
        self.entries.insert(key, scaled_root);
    }

    /// The pair key used by [`compute_phi`].
    pub fn pair_key(v: &Variable) -> u64 {
        ((v.left() as u64) << 32) | v.right() as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RatioError {
    /// The iteration budget and the bisection fallback were both exhausted.
    NoConvergence { iterations: u32 },
    /// Evaluation outside the domain `x > 1`.
    DomainError { x: f64 },
    /// A non-positive or non-finite tolerance.
    InvalidTolerance { tol: f64 },
}

impl fmt::Display for RatioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RatioError::NoConvergence { iterations } => {
                write!(f, "root iteration did not converge after {iterations} steps")
            }
            RatioError::DomainError { x } => {
                write!(f, "trinomial evaluation requires x > 1, got {x}")
            }
            RatioError::InvalidTolerance { tol } => write!(f, "invalid tolerance {tol}"),
        }
    }
}

/// Value and first two derivatives of the scaled trinomial
/// `x^q - x^(q-1) - 1` at `x`, for real exponent `q >= 1`.
pub fn trinomial_residual(x: f64, q: f64) -> Result<(f64, f64, f64), RatioError> {
    if !(x > 1.0) {
        return Err(RatioError::DomainError { x });
    }
    Ok(eval_scaled(x, q))
}

fn eval_scaled(x: f64, q: f64) -> (f64, f64, f64) {
    let xq = pow(x, q);
    let xq1 = xq / x;
    let xq2 = xq1 / x;
    let xq3 = xq2 / x;
    let f = xq - xq1 - 1.0;
    let df = q * xq1 - (q - 1.0) * xq2;
    let ddf = q * (q - 1.0) * xq2 - (q - 1.0) * (q - 2.0) * xq3;
    (f, df, ddf)
}

/// One Laguerre update step of length `a` (next iterate is `x - a`), using
/// `q` as the degree parameter of the smooth extension. `None` when the
/// radicand goes negative or the denominator vanishes.
fn laguerre_step(q: f64, f: f64, df: f64, ddf: f64) -> Option<f64> {
    let g = df / f;
    let h = g * g - ddf / f;
    let radicand = (q - 1.0) * (q * h - g * g);
    if !(radicand >= 0.0) {
        return None;
    }
    let root = sqrt(radicand);
    let denom_plus = g + root;
    let denom_minus = g - root;
    let denom = if fabs(denom_plus) >= fabs(denom_minus) {
        denom_plus
    } else {
        denom_minus
    };
    if denom == 0.0 || !denom.is_finite() {
        return None;
    }
    let a = q / denom;
    a.is_finite().then_some(a)
}

/// Solves the scaled trinomial on the bracket `(1, 2]`.
///
/// `f(1) = -1` and `f(2) = 2^(q-1) - 1 > 0` for `q > 1`, so the bracket
/// always holds; any iterate that escapes it is replaced by the midpoint.
fn solve_scaled(q: f64, x0: f64, tol: f64, method: PhiMethod) -> Result<(f64, u32), RatioError> {
    let mut lo = 1.0f64;
    let mut hi = 2.0f64;
    let mut x = x0.clamp(lo + 1e-15, hi);
    let mut iterations = 0u32;

    for _ in 0..MAX_ITERATIONS {
        let x_new = match method {
            PhiMethod::Laguerre => {
                let (f, df, ddf) = eval_scaled(x, q);
                if f == 0.0 {
                    return Ok((x, iterations));
                }
                if f < 0.0 {
                    lo = x;
                } else {
                    hi = x;
                }
                let candidate = laguerre_step(q, f, df, ddf).map(|a| x - a);
                match candidate {
                    Some(c) if c > lo && c < hi => c,
                    _ => 0.5 * (lo + hi),
                }
            }
            PhiMethod::FixedPoint => {
                let c = pow(1.0 - 1.0 / x, -1.0 / q);
                if c > lo && c < hi {
                    c
                } else {
                    0.5 * (lo + hi)
                }
            }
            PhiMethod::ClosedForm => unreachable!("closed form never iterates"),
        };
        iterations += 1;
        if fabs(x_new - x) <= tol {
            return Ok((x_new, iterations));
        }
        x = x_new;
    }

    // Bisection rescue on whatever bracket remains.
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > tol && iterations < 2 * MAX_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        let (f, _, _) = eval_scaled(mid, q);
        if f == 0.0 {
            return Ok((mid, iterations));
        }
        if f < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    if hi - lo <= tol {
        return Ok((0.5 * (lo + hi), iterations));
    }
    Err(RatioError::NoConvergence { iterations })
}

/// Computes the growth ratio of `v`, warm-starting from `cache` under the
/// caller-chosen `key`.
///
/// Equal gains have the closed form `phi = 2^(1/r)`. Otherwise the scaled
/// trinomial with `q = r/l` is solved by Laguerre iteration for `q <= 200`
/// and by the fixed-point recurrence for larger `q`; the scaled root is
/// written back to the cache on success.
pub fn compute_phi_keyed(
    v: &Variable,
    key: u64,
    cache: &mut PhiCache,
    tol: f64,
) -> Result<PhiResult, RatioError> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(RatioError::InvalidTolerance { tol });
    }
    let l = v.left() as f64;
    let r = v.right() as f64;
    if v.left() == v.right() {
        let result = PhiResult {
            phi: pow(2.0, 1.0 / r),
            phi_pow_l: 2.0,
            iterations: 0,
            method: PhiMethod::ClosedForm,
        };
        cache.insert(key, result.phi_pow_l);
        return Ok(result);
    }
    let q = r / l;
    let method = if q <= LAGUERRE_MAX_Q {
        PhiMethod::Laguerre
    } else {
        PhiMethod::FixedPoint
    };
    let x0 = match cache.get(key) {
        Some(warm) => warm.clamp(1.0 + 1e-12, 2.0 - 1e-12),
        None => pow(2.0, 1.0 / q),
    };
    let (scaled_root, iterations) = solve_scaled(q, x0, tol, method)?;
    cache.insert(key, scaled_root);
    Ok(PhiResult {
        phi: pow(scaled_root, 1.0 / l),
        phi_pow_l: scaled_root,
        iterations,
        method,
    })
}

/// [`compute_phi_keyed`] with the cache keyed by the gain pair itself.
pub fn compute_phi(v: &Variable, cache: &mut PhiCache, tol: f64) -> Result<PhiResult, RatioError> {
    compute_phi_keyed(v, PhiCache::pair_key(v), cache, tol)
}

/// One-off ratio computation with a throwaway cache and default tolerance.
pub fn phi_of(v: &Variable) -> f64 {
    let mut cache = PhiCache::new();
    compute_phi(v, &mut cache, DEFAULT_PHI_TOL)
        .expect("trinomial root always converges on (1, 2]")
        .phi
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solvability {
    Solvable,
    NotSolvable,
    Unknown,
}

impl fmt::Display for Solvability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Solvability::Solvable => "solvable",
            Solvability::NotSolvable => "not solvable",
            Solvability::Unknown => "unknown",
        })
    }
}

/// Whether the characteristic trinomial of a variable is solvable by
/// radicals, with the reduced exponents behind the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolvabilityVerdict {
    pub verdict: Solvability,
    /// `gcd(r, l)`.
    pub d: u32,
    /// `r / d`.
    pub k1: u32,
    /// `l / d`.
    pub k2: u32,
    /// True when the reduced trinomial factors as `(x^2 - x + 1) * g(x)`.
    pub reducible: bool,
    pub detail: &'static str,
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Decides solvability by radicals of `x^r - x^(r-l) - 1`.
///
/// Substituting `x^d` for `gcd(r, l) = d` reduces to exponents
/// `k1 = r/d > k2 = l/d` with `gcd(k1, k2) = 1`. The reduced trinomial is
/// irreducible unless `k1` and `k2` are both odd with `k1 + k2` divisible by
/// 3, in which case it factors as `(x^2 - x + 1)` times an irreducible
/// polynomial of degree `k1 - 2`. Irreducible trinomials of degree 5 or more
/// have the full symmetric Galois group and are not solvable; the reducible
/// family is settled only up to the degree-5 cofactor of `(7, 5)`.
pub fn classify_solvability(v: &Variable) -> SolvabilityVerdict {
    let l = v.left();
    let r = v.right();
    let d = gcd(r, l);
    let k1 = r / d;
    let k2 = l / d;
    let reducible = k1 % 2 == 1 && k2 % 2 == 1 && (k1 + k2) % 3 == 0 && k1 != k2;

    let (verdict, detail) = if l == r {
        (Solvability::Solvable, "binomial x^r - 2 with radical root")
    } else if k1 <= 4 {
        (Solvability::Solvable, "reduced degree at most 4")
    } else if reducible {
        if k1 - 2 <= 4 {
            (
                Solvability::Solvable,
                "factors into a quadratic and a cofactor of degree at most 4",
            )
        } else if k1 == 7 && k2 == 5 {
            (
                Solvability::NotSolvable,
                "quintic cofactor with symmetric Galois group",
            )
        } else {
            (
                Solvability::Unknown,
                "cofactor of degree 7 or more, unresolved",
            )
        }
    } else {
        (
            Solvability::NotSolvable,
            "irreducible of degree at least 5, symmetric Galois group",
        )
    };

    SolvabilityVerdict {
        verdict,
        d,
        k1,
        k2,
        reducible,
        detail,
    }
}
