//! Seeded pseudo-random streams with a fixed, platform-independent contract.
//!
//! A 64-bit seed is expanded through four SplitMix64 outputs into the
//! 256-bit state of a xoshiro256** generator. Uniform reals take the top 53
//! bits of an output; Gaussian draws use Box–Muller over consecutive uniform
//! pairs, emitting the cosine branch first and the cached sine branch next.
//! Encoder and decoder regenerate identical codebooks from the same seed on
//! every platform, so none of these recurrences may change. Transcendentals
//! come from the pure-Rust `libm` port rather than the platform C library so
//! the draws are bit-identical everywhere.

use std::f64::consts::PI;

const SPLITMIX_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;
const SPLITMIX_MUL1: u64 = 0xbf58_476d_1ce4_e5b9;
const SPLITMIX_MUL2: u64 = 0x94d0_49bb_1331_11eb;

/// 2^-53
const UNIT: f64 = 1.0 / (1u64 << 53) as f64;

/// SplitMix64 sequence generator used for seed expansion.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(SPLITMIX_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(SPLITMIX_MUL1);
        z = (z ^ (z >> 27)).wrapping_mul(SPLITMIX_MUL2);
        z ^ (z >> 31)
    }
}

/// xoshiro256** stream with a cached Box–Muller companion value.
#[derive(Debug, Clone, PartialEq)]
pub struct RngStream {
    s: [u64; 4],
    spare_gaussian: Option<f64>,
}

/// Builds the stream for `seed`. An all-zero expanded state (a fixed point of
/// xoshiro) is replaced by the expansion of `seed + 1`.
pub fn rng_from_seed(seed: u64) -> RngStream {
    let mut seed = seed;
    loop {
        let mut sm = SplitMix64::new(seed);
        let s = [sm.next_u64(), sm.next_u64(), sm.next_u64(), sm.next_u64()];
        if s.iter().any(|&w| w != 0) {
            return RngStream {
                s,
                spare_gaussian: None,
            };
        }
        seed = seed.wrapping_add(1);
    }
}

impl RngStream {
    /// Stream starting from an explicit xoshiro256** state; `None` for the
    /// all-zero state.
    pub fn from_state(s: [u64; 4]) -> Option<Self> {
        s.iter().any(|&w| w != 0).then_some(Self {
            s,
            spare_gaussian: None,
        })
    }

    /// Raw generator state, mainly for tests.
    pub fn state(&self) -> [u64; 4] {
        self.s
    }

    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform on (0, 1]: `(x >> 11) * 2^-53` with zero mapped to `2^-53`.
    pub fn next_uniform(&mut self) -> f64 {
        let u = (self.next_u64() >> 11) as f64 * UNIT;
        if u == 0.0 {
            UNIT
        } else {
            u
        }
    }

    /// Standard normal draw.
    pub fn next_gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare_gaussian.take() {
            return z;
        }
        let u1 = self.next_uniform();
        let u2 = self.next_uniform();
        let radius = (-2.0 * libm::log(u1)).sqrt();
        let angle = 2.0 * PI * u2;
        self.spare_gaussian = Some(radius * libm::sin(angle));
        radius * libm::cos(angle)
    }

    /// Uniform integer in `0..bound` by rejection on the top bits; `bound > 0`.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "next_below requires a positive bound");
        let zone = u64::MAX - (u64::MAX - bound + 1) % bound;
        loop {
            let x = self.next_u64();
            if x <= zone {
                return x % bound;
            }
        }
    }

    /// Fisher–Yates shuffle driven by this stream.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_reference_vector_seed_zero() {
        let mut sm = SplitMix64::new(0);
        assert_eq!(sm.next_u64(), 0xe220_a839_7b1d_cdaf);
        assert_eq!(sm.next_u64(), 0x6e78_9e6a_a1b9_65f4);
        assert_eq!(sm.next_u64(), 0x06c4_5d18_8009_454f);
        assert_eq!(sm.next_u64(), 0xf88b_b8a8_724c_81ec);
    }

    #[test]
    fn same_seed_same_stream() {
        let mut a = rng_from_seed(42);
        let mut b = rng_from_seed(42);
        for _ in 0..1000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn adjacent_seeds_differ() {
        assert_ne!(rng_from_seed(1).next_u64(), rng_from_seed(2).next_u64());
    }

    #[test]
    fn uniform_is_in_half_open_unit_interval() {
        let mut rng = rng_from_seed(9);
        for _ in 0..10_000 {
            let u = rng.next_uniform();
            assert!(u > 0.0 && u <= 1.0);
        }
    }

    #[test]
    fn gaussian_pairs_share_one_uniform_pair() {
        let mut rng = rng_from_seed(5);
        let mut manual = rng_from_seed(5);
        let z0 = rng.next_gaussian();
        let z1 = rng.next_gaussian();
        let u1 = manual.next_uniform();
        let u2 = manual.next_uniform();
        let r = (-2.0 * libm::log(u1)).sqrt();
        assert_eq!(z0, r * libm::cos(2.0 * PI * u2));
        assert_eq!(z1, r * libm::sin(2.0 * PI * u2));
        // the third draw starts a fresh pair
        assert_eq!(rng.state(), manual.state());
    }

    #[test]
    fn gaussian_moments() {
        let mut rng = rng_from_seed(2024);
        let n = 1_000_000;
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..n {
            let z = rng.next_gaussian();
            sum += z;
            sum_sq += z * z;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        assert!(mean.abs() <= 0.004, "mean {mean}");
        assert!((0.995..=1.005).contains(&var), "variance {var}");
    }

    #[test]
    fn next_below_stays_in_range_and_shuffle_permutes() {
        let mut rng = rng_from_seed(3);
        for bound in [1u64, 2, 3, 7, 1000] {
            for _ in 0..100 {
                assert!(rng.next_below(bound) < bound);
            }
        }
        let mut v: Vec<usize> = (0..50).collect();
        rng.shuffle(&mut v);
        let mut sorted = v.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..50).collect::<Vec<_>>());
    }
}
