//! Exact tree sizes for single- and multi-variable branching.
//!
//! For a single variable the minimal tree size obeys
//! `t(G) = 1 + t(G-l) + t(G-r)` with `t(G) = 1` for `G <= 0`; with several
//! variables (each usable arbitrarily often) the sum is minimised over the
//! variables at every gap. Counts are exact 128-bit integers with explicit
//! overflow reporting; verification sweeps that outgrow 128 bits use the
//! arbitrary-precision routes.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::model::{Gap, TreeSize, Variable};
use crate::ratio::{self, RatioError};

#[derive(Debug, Clone, PartialEq)]
pub enum TreesError {
    /// A count exceeded 128 bits; callers wanting further gaps should switch
    /// to [`svb_log_size`] or the big-integer routes.
    Overflow { gap: i64 },
    /// `svb_log_size` needs `0 <= anchor <= gap`.
    InvalidAnchor { anchor: i64, gap: i64 },
    /// The counterexample verifier needs a sweep reaching at least gap 8.
    GapTooSmall { min: i64, got: i64 },
    /// A verified identity failed at this gap.
    VerificationFailed { gap: i64 },
    Ratio(RatioError),
}

impl fmt::Display for TreesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreesError::Overflow { gap } => write!(f, "tree size at gap {gap} exceeds 128 bits"),
            TreesError::InvalidAnchor { anchor, gap } => {
                write!(f, "anchor {anchor} not in 0..={gap}")
            }
            TreesError::GapTooSmall { min, got } => {
                write!(f, "gap sweep must reach at least {min}, got {got}")
            }
            TreesError::VerificationFailed { gap } => write!(f, "verification failed at gap {gap}"),
            TreesError::Ratio(e) => e.fmt(f),
        }
    }
}

impl From<RatioError> for TreesError {
    fn from(e: RatioError) -> TreesError {
        TreesError::Ratio(e)
    }
}

/// Single-variable tree sizes for every gap `0..=g_max`.
#[derive(Debug, Clone)]
pub struct SvbTable {
    variable: Variable,
    sizes: Vec<u128>,
}

impl SvbTable {
    pub fn build(variable: Variable, g_max: i64) -> Result<SvbTable, TreesError> {
        let top = g_max.max(0) as usize;
        let l = variable.left() as usize;
        let r = variable.right() as usize;
        let mut sizes = vec![1u128; top + 1];
        for g in 1..=top {
            let tl = if g > l { sizes[g - l] } else { 1 };
            let tr = if g > r { sizes[g - r] } else { 1 };
            sizes[g] = combine(tl, tr).ok_or(TreesError::Overflow { gap: g as i64 })?;
        }
        Ok(SvbTable { variable, sizes })
    }

    pub fn variable(&self) -> Variable {
        self.variable
    }

    pub fn g_max(&self) -> i64 {
        (self.sizes.len() - 1) as i64
    }

    /// Size at gap `g`; gaps at or below zero are leaves.
    pub fn size(&self, g: i64) -> TreeSize {
        if g <= 0 {
            TreeSize::LEAF
        } else {
            TreeSize::Finite(self.sizes[g as usize])
        }
    }
}

fn combine(a: u128, b: u128) -> Option<u128> {
    1u128.checked_add(a)?.checked_add(b)
}

/// Exact minimal single-variable tree size, in rolling `O(r)` space.
pub fn svb_size(v: &Variable, gap: Gap) -> Result<TreeSize, TreesError> {
    let g_target = gap.0;
    if g_target <= 0 {
        return Ok(TreeSize::LEAF);
    }
    let l = v.left() as i64;
    let r = v.right() as i64;
    let window = v.right() as usize;
    let mut ring = vec![1u128; window];
    let mut last = 1u128;
    for g in 1..=g_target {
        let tl = if g - l <= 0 {
            1
        } else {
            ring[((g - l) % window as i64) as usize]
        };
        let tr = if g - r <= 0 {
            1
        } else {
            ring[((g - r) % window as i64) as usize]
        };
        last = combine(tl, tr).ok_or(TreesError::Overflow { gap: g })?;
        ring[(g % window as i64) as usize] = last;
    }
    Ok(TreeSize::Finite(last))
}

/// Natural log of the approximate single-variable tree size at `gap`,
/// anchored on the exact size at `anchor`:
/// `ln t(anchor) + (gap - anchor) * ln phi`. Exact at `gap == anchor`.
pub fn svb_log_size(v: &Variable, gap: Gap, anchor: Gap) -> Result<f64, TreesError> {
    if anchor.0 < 0 || anchor.0 > gap.0 {
        return Err(TreesError::InvalidAnchor {
            anchor: anchor.0,
            gap: gap.0,
        });
    }
    let exact = svb_size(v, anchor)?
        .finite()
        .expect("single-variable trees are always feasible");
    let ln_exact = libm::log(exact as f64);
    if gap.0 == anchor.0 {
        return Ok(ln_exact);
    }
    let phi = ratio::phi_of(v);
    Ok(ln_exact + (gap.0 - anchor.0) as f64 * libm::log(phi))
}

/// Multi-variable tree sizes with, at every gap, an index attaining the
/// minimum (lowest index on ties).
#[derive(Debug, Clone)]
pub struct MvbTable {
    variables: Vec<Variable>,
    sizes: Vec<u128>,
    choice: Vec<u32>,
}

impl MvbTable {
    pub fn build(variables: &[Variable], g_max: i64) -> Result<MvbTable, TreesError> {
        assert!(!variables.is_empty(), "need at least one variable");
        let top = g_max.max(0) as usize;
        let mut sizes = vec![1u128; top + 1];
        let mut choice = vec![0u32; top + 1];
        for g in 1..=top {
            let mut best: Option<(u128, u32)> = None;
            for (i, v) in variables.iter().enumerate() {
                let tl = lookup(&sizes, g as i64 - v.left() as i64);
                let tr = lookup(&sizes, g as i64 - v.right() as i64);
                let total = combine(tl, tr).ok_or(TreesError::Overflow { gap: g as i64 })?;
                if best.map_or(true, |(b, _)| total < b) {
                    best = Some((total, i as u32));
                }
            }
            let (size, idx) = best.expect("non-empty variable set");
            sizes[g] = size;
            choice[g] = idx;
        }
        Ok(MvbTable {
            variables: variables.to_vec(),
            sizes,
            choice,
        })
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn g_max(&self) -> i64 {
        (self.sizes.len() - 1) as i64
    }

    pub fn size(&self, g: i64) -> TreeSize {
        if g <= 0 {
            TreeSize::LEAF
        } else {
            TreeSize::Finite(self.sizes[g as usize])
        }
    }

    /// Index of a minimising variable at gap `g` (gaps below 1 report 0).
    pub fn choice(&self, g: i64) -> usize {
        if g <= 0 {
            0
        } else {
            self.choice[g as usize] as usize
        }
    }
}

fn lookup(sizes: &[u128], g: i64) -> u128 {
    if g <= 0 {
        1
    } else {
        sizes[g as usize]
    }
}

/// Exact minimal multi-variable tree size and a root choice attaining it.
pub fn mvb_size(vars: &[Variable], gap: Gap) -> Result<(TreeSize, usize), TreesError> {
    let table = MvbTable::build(vars, gap.0)?;
    Ok((table.size(gap.0), table.choice(gap.0)))
}

/// Growth ratio of a multi-variable tree: the minimum of the per-variable
/// ratios.
pub fn mvb_ratio(vars: &[Variable]) -> Result<f64, RatioError> {
    assert!(!vars.is_empty(), "need at least one variable");
    let mut cache = ratio::PhiCache::new();
    let mut best = f64::INFINITY;
    for v in vars {
        let res = ratio::compute_phi(v, &mut cache, ratio::DEFAULT_PHI_TOL)?;
        if res.phi < best {
            best = res.phi;
        }
    }
    Ok(best)
}

/// Arbitrary-precision multi-variable sizes for every gap `0..=g_max`.
///
/// This is the route used for verification sweeps whose counts outgrow
/// 128 bits; with a single variable it doubles as an exact single-variable
/// table.
pub fn mvb_sizes_big(vars: &[Variable], g_max: i64) -> Vec<BigUint> {
    assert!(!vars.is_empty(), "need at least one variable");
    let top = g_max.max(0) as usize;
    let one = BigUint::one();
    let mut sizes: Vec<BigUint> = vec![one.clone(); top + 1];
    for g in 1..=top {
        let mut best: Option<BigUint> = None;
        for v in vars {
            let tl = big_lookup(&sizes, g as i64 - v.left() as i64);
            let tr = big_lookup(&sizes, g as i64 - v.right() as i64);
            let total = tl + tr + &one;
            if best.as_ref().map_or(true, |b| &total < b) {
                best = Some(total);
            }
        }
        sizes[g] = best.expect("non-empty variable set");
    }
    sizes
}

fn big_lookup(sizes: &[BigUint], g: i64) -> BigUint {
    if g <= 0 {
        BigUint::one()
    } else {
        sizes[g as usize].clone()
    }
}

/// The instance whose minimal trees have a residue-based closed form.
pub fn closed_form_instance() -> [Variable; 2] {
    [Variable::new(2, 4), Variable::new(3, 3)]
}

/// Arbitrary-precision closed form for the minimal tree size of the
/// two-variable instance `(2,4), (3,3)`, by residue of the gap mod 6.
///
/// All divisions by 3 are exact.
pub fn mvb_closed_form_big(gap: i64) -> BigUint {
    if gap <= 0 {
        return BigUint::one();
    }
    let k = (gap / 6) as u32;
    let j = gap % 6;
    let one = BigUint::one();
    let three = BigUint::from(3u32);
    let pow4 = BigUint::from(4u32).pow(k);
    match j {
        0 => &pow4 * 2u32 - &one,
        1 => (&pow4 * 2u32 + &one) * 4u32 / &three - &one,
        2 => (&pow4 * 5u32 + &one) * 2u32 / &three - &one,
        3 => &pow4 * 4u32 - &one,
        4 => (&pow4 * 8u32 + &one) * 2u32 / &three - &one,
        5 => (&pow4 * 5u32 + &one) * 4u32 / &three - &one,
        _ => unreachable!(),
    }
}

/// 128-bit closed form for the `(2,4), (3,3)` instance; overflows past
/// roughly gap 380.
pub fn mvb_closed_form(gap: Gap) -> Result<TreeSize, TreesError> {
    if gap.0 <= 0 {
        return Ok(TreeSize::LEAF);
    }
    mvb_closed_form_big(gap.0)
        .to_u128()
        .map(TreeSize::Finite)
        .ok_or(TreesError::Overflow { gap: gap.0 })
}

/// Outcome of the minimum-ratio-counterexample sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MvbCounterexampleReport {
    pub g_max: i64,
    /// Gaps where the dynamic program was compared against the closed form.
    pub gaps_checked: usize,
    /// Gaps of the form `2 + 6k >= 8` where the root strictly prefers the
    /// larger-ratio variable `(2,4)` over `(3,3)`.
    pub counterexample_gaps: usize,
}

/// Sweeps the `(2,4), (3,3)` instance up to `g_max`, checking the closed
/// form against the dynamic program at every gap, and that at every gap
/// `2 + 6k >= 8` branching `(2,4)` at the root gives a strictly smaller tree
/// than branching `(3,3)` — even though `(3,3)` has the smaller ratio.
pub fn verify_mvb_counterexample(g_max: Gap) -> Result<MvbCounterexampleReport, TreesError> {
    if g_max.0 < 8 {
        return Err(TreesError::GapTooSmall {
            min: 8,
            got: g_max.0,
        });
    }
    let vars = closed_form_instance();
    let sizes = mvb_sizes_big(&vars, g_max.0);
    let mut gaps_checked = 0;
    for g in 0..=g_max.0 {
        if sizes[g as usize] != mvb_closed_form_big(g) {
            return Err(TreesError::VerificationFailed { gap: g });
        }
        gaps_checked += 1;
    }
    let one = BigUint::one();
    let mut counterexample_gaps = 0;
    let mut g = 8;
    while g <= g_max.0 {
        let via_24 = big_lookup(&sizes, g - 2) + big_lookup(&sizes, g - 4) + &one;
        let via_33 = big_lookup(&sizes, g - 3) * 2u32 + &one;
        if via_24 >= via_33 {
            return Err(TreesError::VerificationFailed { gap: g });
        }
        counterexample_gaps += 1;
        g += 6;
    }
    Ok(MvbCounterexampleReport {
        g_max: g_max.0,
        gaps_checked,
        counterexample_gaps,
    })
}
