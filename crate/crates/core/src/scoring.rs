//! Variable selection rules: product, hybrid ratio, and single-variable
//! tree size.
//!
//! All three rules are deterministic functions of the candidate set and the
//! current gap. Ties are broken by smaller growth ratio, then by lower
//! candidate index; with that policy none of the rules ever selects a
//! strictly dominated candidate while a dominator is on offer, which is what
//! lets the simulator restrict its states to dominance-free sets.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::model::{Gap, Variable};
use crate::ratio::{self, PhiCache, RatioError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleKind {
    Product,
    Ratio,
    Svts,
}

impl RuleKind {
    pub const ALL: [RuleKind; 3] = [RuleKind::Product, RuleKind::Ratio, RuleKind::Svts];

    pub fn name(&self) -> &'static str {
        match self {
            RuleKind::Product => "product",
            RuleKind::Ratio => "ratio",
            RuleKind::Svts => "svts",
        }
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for RuleKind {
    type Err = ();

    fn from_str(s: &str) -> Result<RuleKind, ()> {
        match s {
            "product" => Ok(RuleKind::Product),
            "ratio" => Ok(RuleKind::Ratio),
            "svts" => Ok(RuleKind::Svts),
            _ => Err(()),
        }
    }
}

/// Which candidate's height estimate `floor(G / l)` gates the ratio rule's
/// switch from product scoring to ratio scoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeightBasis {
    /// Switch only when every candidate implies a deep tree (the default).
    Min,
    /// Switch as soon as any candidate implies a deep tree.
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoringParams {
    /// Product-score floor for zero gains; gains validate to >= 1, so this
    /// is a tiebreaker kept for the formula's sake.
    pub epsilon: f64,
    /// Estimated tree height above which the ratio rule scores by ratio
    /// instead of product.
    pub height_threshold: u32,
    /// Cell budget for the exact tree-size table used by the svts rule.
    pub exact_size_gap_cap: i64,
    /// Overflow guard for the exact table: the anchor gap never exceeds
    /// `anchor_height * l`, which bounds tree height and keeps counts well
    /// inside 128 bits. Past the anchor the score extrapolates with the
    /// growth ratio.
    pub anchor_height: u32,
    pub height_basis: HeightBasis,
}

impl Default for ScoringParams {
    fn default() -> ScoringParams {
        ScoringParams {
            epsilon: 1e-6,
            height_threshold: 10,
            exact_size_gap_cap: 1_000_000,
            anchor_height: 120,
            height_basis: HeightBasis::Min,
        }
    }
}

/// The product score `max(eps, l) * max(eps, r)`. Higher is better.
pub fn product_score(v: &Variable, params: &ScoringParams) -> f64 {
    let l = (v.left() as f64).max(params.epsilon);
    let r = (v.right() as f64).max(params.epsilon);
    l * r
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScoreError {
    EmptyCandidates,
    /// Selection needs a positive gap.
    InvalidGap { gap: i64 },
    Ratio(RatioError),
}

impl fmt::Display for ScoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScoreError::EmptyCandidates => f.write_str("no candidates to select from"),
            ScoreError::InvalidGap { gap } => write!(f, "selection needs gap >= 1, got {gap}"),
            ScoreError::Ratio(e) => e.fmt(f),
        }
    }
}

impl From<RatioError> for ScoreError {
    fn from(e: RatioError) -> ScoreError {
        ScoreError::Ratio(e)
    }
}

/// Per-variable state for the svts rule: log tree sizes up to the anchor
/// cap, grown lazily, plus the log of the growth ratio.
#[derive(Debug, Clone)]
struct SvtsEntry {
    sizes: Vec<u128>,
    ln_sizes: Vec<f64>,
    ln_phi: f64,
    anchor_cap: i64,
}

/// A deterministic selection rule with its warm-start caches.
///
/// One rule instance belongs to one simulation worker at a time; the ratio
/// cache is keyed by candidate index, the tree-size tables by gain pair.
#[derive(Debug, Clone)]
pub struct SelectionRule {
    kind: RuleKind,
    params: ScoringParams,
    phi_cache: PhiCache,
    svts: BTreeMap<(u32, u32), SvtsEntry>,
}

impl SelectionRule {
    pub fn new(kind: RuleKind, params: ScoringParams) -> SelectionRule {
        SelectionRule {
            kind,
            params,
            phi_cache: PhiCache::new(),
            svts: BTreeMap::new(),
        }
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn params(&self) -> &ScoringParams {
        &self.params
    }

    fn phi(&mut self, index: usize, v: &Variable) -> Result<f64, ScoreError> {
        let res =
            ratio::compute_phi_keyed(v, index as u64, &mut self.phi_cache, ratio::DEFAULT_PHI_TOL)?;
        Ok(res.phi)
    }

    /// Log tree size of `v` at `gap`, exact while the table stays within
    /// the anchor cap and ratio-extrapolated beyond it.
    fn svts_score(&mut self, v: &Variable, gap: i64) -> f64 {
        let key = (v.left(), v.right());
        if !self.svts.contains_key(&key) {
            let anchor_cap = self
                .params
                .exact_size_gap_cap
                .min(self.params.anchor_height as i64 * v.left() as i64);
            let entry = SvtsEntry {
                sizes: vec![1u128],
                ln_sizes: vec![0.0],
                ln_phi: libm::log(ratio::phi_of(v)),
                anchor_cap,
            };
            self.svts.insert(key, entry);
        }
        let entry = self.svts.get_mut(&key).expect("just inserted");
        let l = v.left() as usize;
        let r = v.right() as usize;
        while (entry.sizes.len() as i64) <= gap.min(entry.anchor_cap) {
            let g = entry.sizes.len();
            let tl = if g > l { entry.sizes[g - l] } else { 1 };
            let tr = if g > r { entry.sizes[g - r] } else { 1 };
            // The default anchor height keeps counts far inside 128 bits;
            // if custom params push past that, shorten the anchor instead.
            match 1u128.checked_add(tl).and_then(|s| s.checked_add(tr)) {
                Some(t) => {
                    entry.sizes.push(t);
                    entry.ln_sizes.push(libm::log(t as f64));
                }
                None => {
                    entry.anchor_cap = (entry.sizes.len() - 1) as i64;
                    break;
                }
            }
        }
        let anchor = gap.min(entry.anchor_cap);
        let exact = entry.ln_sizes[anchor as usize];
        if anchor == gap {
            exact
        } else {
            exact + (gap - anchor) as f64 * entry.ln_phi
        }
    }

    /// Picks the candidate the rule would branch on at gap `gap`.
    ///
    /// Candidates carry their instance index; the returned value is that
    /// index, not a position in the slice. Ties break on smaller ratio,
    /// then lower index.
    pub fn select(
        &mut self,
        candidates: &[(usize, Variable)],
        gap: Gap,
    ) -> Result<usize, ScoreError> {
        if candidates.is_empty() {
            return Err(ScoreError::EmptyCandidates);
        }
        if gap.0 < 1 {
            return Err(ScoreError::InvalidGap { gap: gap.0 });
        }
        match self.kind {
            RuleKind::Product => self.select_by_product(candidates),
            RuleKind::Ratio => {
                let deep = match self.params.height_basis {
                    HeightBasis::Min => candidates
                        .iter()
                        .map(|(_, v)| gap.0 / v.left() as i64)
                        .min(),
                    HeightBasis::Max => candidates
                        .iter()
                        .map(|(_, v)| gap.0 / v.left() as i64)
                        .max(),
                }
                .expect("non-empty candidates")
                    > self.params.height_threshold as i64;
                if deep {
                    self.select_min_phi(candidates)
                } else {
                    self.select_by_product(candidates)
                }
            }
            RuleKind::Svts => {
                let mut best: Option<(f64, f64, usize)> = None;
                for &(index, v) in candidates {
                    let score = self.svts_score(&v, gap.0);
                    let phi = self.phi(index, &v)?;
                    let key = (score, phi, index);
                    if best.map_or(true, |b| key < b) {
                        best = Some(key);
                    }
                }
                Ok(best.expect("non-empty candidates").2)
            }
        }
    }

    fn select_by_product(&mut self, candidates: &[(usize, Variable)]) -> Result<usize, ScoreError> {
        let mut best: Option<(f64, f64, usize)> = None;
        for &(index, v) in candidates {
            let score = product_score(&v, &self.params);
            let phi = self.phi(index, &v)?;
            // Maximize score, then minimize phi, then index.
            let key = (-score, phi, index);
            if best.map_or(true, |b| key < b) {
                best = Some(key);
            }
        }
        Ok(best.expect("non-empty candidates").2)
    }

    fn select_min_phi(&mut self, candidates: &[(usize, Variable)]) -> Result<usize, ScoreError> {
        let mut best: Option<(f64, usize)> = None;
        for &(index, v) in candidates {
            let phi = self.phi(index, &v)?;
            let key = (phi, index);
            if best.map_or(true, |b| key < b) {
                best = Some(key);
            }
        }
        Ok(best.expect("non-empty candidates").1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cands(pairs: &[(u32, u32)]) -> Vec<(usize, Variable)> {
        pairs
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| (i, Variable::new(a, b)))
            .collect()
    }

    #[test]
    fn product_scores() {
        let p = ScoringParams::default();
        assert_eq!(product_score(&Variable::new(9, 9), &p), 81.0);
        assert_eq!(product_score(&Variable::new(5, 10), &p), 50.0);
        assert_eq!(product_score(&Variable::new(5, 6), &p), 30.0);
        assert_eq!(product_score(&Variable::new(1, 1), &p), 1.0);
    }

    #[test]
    fn product_ranks_balanced_square_first() {
        let mut rule = SelectionRule::new(RuleKind::Product, ScoringParams::default());
        let c = cands(&[(5, 6), (9, 9), (5, 10)]);
        assert_eq!(rule.select(&c, Gap(15)).unwrap(), 1);
    }

    #[test]
    fn ratio_rule_switches_on_depth() {
        let mut rule = SelectionRule::new(RuleKind::Ratio, ScoringParams::default());
        let c = cands(&[(2, 4), (3, 3)]);
        // Deep: heights 50 and 33, both over 10, phi(3,3) < phi(2,4).
        assert_eq!(rule.select(&c, Gap(100)).unwrap(), 1);
        // Shallow: heights 5 and 3, product 9 > 8.
        assert_eq!(rule.select(&c, Gap(10)).unwrap(), 1);
        // Shallow with the product favouring the other side.
        let c = cands(&[(2, 5), (3, 3)]);
        assert_eq!(rule.select(&c, Gap(9)).unwrap(), 0);
    }

    #[test]
    fn svts_prefers_smaller_tree() {
        let mut rule = SelectionRule::new(RuleKind::Svts, ScoringParams::default());
        let c = cands(&[(2, 4), (3, 3)]);
        // t(5) is 9 for (2,4) and 7 for (3,3).
        assert_eq!(rule.select(&c, Gap(5)).unwrap(), 1);
    }

    #[test]
    fn svts_extrapolates_past_anchor() {
        let params = ScoringParams::default();
        let mut rule = SelectionRule::new(RuleKind::Svts, params);
        let c = cands(&[(1, 9), (8, 9)]);
        // Gap far past (1,9)'s anchor cap of 120; the bigger variable still
        // must win.
        assert_eq!(rule.select(&c, Gap(5000)).unwrap(), 1);
    }

    #[test]
    fn svts_score_continuous_at_anchor() {
        // Just below, at, and above the anchor cap the score moves smoothly.
        let mut rule = SelectionRule::new(RuleKind::Svts, ScoringParams::default());
        let v = Variable::new(1, 3);
        let cap = 120;
        let at = rule.svts_score(&v, cap);
        let above = rule.svts_score(&v, cap + 1);
        let below = rule.svts_score(&v, cap - 1);
        assert!(above > at && at > below);
        assert!((above - at) < 1.0 && (at - below) < 1.0);
    }

    #[test]
    fn ties_break_on_phi_then_index() {
        let mut rule = SelectionRule::new(RuleKind::Product, ScoringParams::default());
        // Same product 36, but phi(4,9) = 1.11925 < phi(6,6) = 1.12246, so
        // the skewed pair wins despite its higher index.
        let c = cands(&[(6, 6), (4, 9)]);
        assert_eq!(rule.select(&c, Gap(12)).unwrap(), 1);
        // Identical pairs: lower index wins.
        let c = cands(&[(4, 9), (4, 9)]);
        assert_eq!(rule.select(&c, Gap(12)).unwrap(), 0);
    }

    #[test]
    fn empty_and_nonpositive_gap_are_errors() {
        let mut rule = SelectionRule::new(RuleKind::Product, ScoringParams::default());
        assert!(matches!(
            rule.select(&[], Gap(3)),
            Err(ScoreError::EmptyCandidates)
        ));
        let c = cands(&[(1, 2)]);
        assert!(matches!(
            rule.select(&c, Gap(0)),
            Err(ScoreError::InvalidGap { gap: 0 })
        ));
    }

    #[test]
    fn selection_is_deterministic() {
        let c = cands(&[(3, 7), (4, 5), (2, 9), (6, 6)]);
        for kind in RuleKind::ALL {
            let mut a = SelectionRule::new(kind, ScoringParams::default());
            let mut b = SelectionRule::new(kind, ScoringParams::default());
            for g in 1..200 {
                assert_eq!(a.select(&c, Gap(g)).unwrap(), b.select(&c, Gap(g)).unwrap());
            }
        }
    }

    #[test]
    fn rule_kind_parses() {
        assert_eq!("svts".parse::<RuleKind>(), Ok(RuleKind::Svts));
        assert!("hybrid".parse::<RuleKind>().is_err());
    }
}
