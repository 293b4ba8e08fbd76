//! The pinned random number generator behind every experiment.
//!
//! Reproducibility across runs and reimplementations requires fixing the
//! generator identity, not just the seed, so this module spells out the
//! whole chain: xoshiro256++ for the stream, SplitMix64 to expand a 64-bit
//! seed into the initial state, fixed-point multiplication for bounded
//! integers, and the usual 53-bit mantissa fill for unit floats. All of it
//! matches the published reference algorithms bit for bit (see the frozen
//! vectors in the tests).

/// SplitMix64 step: advances `state` and returns the next output.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds identifying parts (category id, instance id, ...) into a master
/// seed, one SplitMix64 step per part.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    let mut state = master;
    let mut out = master;
    for &part in parts {
        state ^= part;
        out = splitmix64(&mut state);
    }
    out
}

/// xoshiro256++ by Blackman and Vigna.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Xoshiro256PlusPlus {
    s: [u64; 4],
}

impl Xoshiro256PlusPlus {
    /// Expands a 64-bit seed into the initial state with SplitMix64, as the
    /// generator's authors recommend.
    pub fn seed_from_u64(seed: u64) -> Xoshiro256PlusPlus {
        let mut sm = seed;
        let s = [
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
        ];
        Xoshiro256PlusPlus { s }
    }

    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[0]
            .wrapping_add(self.s[3])
            .rotate_left(23)
            .wrapping_add(self.s[0]);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform integer in `lo..=hi` by 64x64 fixed-point multiplication:
    /// `lo + ((next_u64() * (hi - lo + 1)) >> 64)`. The modulo bias is below
    /// `2^-44` for the ranges used here.
    pub fn uniform_u32(&mut self, lo: u32, hi: u32) -> u32 {
        debug_assert!(lo <= hi);
        let range = (hi - lo) as u64 + 1;
        let hi_mul = ((self.next_u64() as u128 * range as u128) >> 64) as u64;
        lo + hi_mul as u32
    }

    /// Uniform float in `[0, 1)` from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Frozen against an independent implementation of the published
    // reference algorithms (see tests/rng_reference.rs for the full check).
    #[test]
    fn splitmix_reference_head() {
        let mut s = 0u64;
        assert_eq!(splitmix64(&mut s), 0xE220_A839_7B1D_CDAF);
        assert_eq!(splitmix64(&mut s), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn uniform_stays_in_range_and_hits_ends() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(7);
        let mut seen_lo = false;
        let mut seen_hi = false;
        for _ in 0..10_000 {
            let x = rng.uniform_u32(1, 8);
            assert!((1..=8).contains(&x));
            seen_lo |= x == 1;
            seen_hi |= x == 8;
        }
        assert!(seen_lo && seen_hi);
    }

    #[test]
    fn floats_are_unit_interval() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(11);
        for _ in 0..10_000 {
            let f = rng.next_f64();
            assert!((0.0..1.0).contains(&f));
        }
    }

    #[test]
    fn derive_seed_separates_parts() {
        let a = derive_seed(42, &[0, 0]);
        let b = derive_seed(42, &[0, 1]);
        let c = derive_seed(42, &[1, 0]);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_ne!(b, c);
        assert_eq!(a, derive_seed(42, &[0, 0]));
    }

    #[test]
    fn same_seed_same_stream() {
        let mut a = Xoshiro256PlusPlus::seed_from_u64(123);
        let mut b = Xoshiro256PlusPlus::seed_from_u64(123);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }
}
