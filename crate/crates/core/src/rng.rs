//! Seedable PCG32 stream plus the derived draws the engine needs.
//!
//! The generator is pinned so independent implementations can reproduce runs
//! bit for bit. Algorithm: PCG XSH-RR 64/32 — 64-bit LCG state with
//! multiplier 6364136223846793469 and an odd increment `(stream << 1) | 1`;
//! each output xorshifts the *previous* state (`((old >> 18) ^ old) >> 27`)
//! and right-rotates it by the state's top five bits. Seeding follows the
//! reference `pcg32_srandom`: zero state, one step, add seed, one step.
//!
//! Derived draws are equally pinned: `next_u64` is two outputs (high word
//! first), `next_f64` takes the top 53 bits of a `next_u64` over 2^53, and
//! `poisson` counts how many unit exponentials (`-ln(1 - u)`) fit in the
//! rate before the running sum exceeds it.

use libm::log;

const MULTIPLIER: u64 = 6364136223846793469;

/// Stream constant used by every simulation; the reference implementation's
/// demo stream, kept so seeds line up with other ports of the generator.
pub const DEFAULT_STREAM: u64 = 0xda3e_39cb_94b9_5bdb;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pcg32 {
    state: u64,
    inc: u64,
}

impl Pcg32 {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, DEFAULT_STREAM)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = Pcg32 {
            state: 0,
            inc: (stream << 1) | 1,
        };
        rng.next_u32();
        rng.state = rng.state.wrapping_add(seed);
        rng.next_u32();
        rng
    }

    pub fn next_u32(&mut self) -> u32 {
        let old = self.state;
        self.state = old.wrapping_mul(MULTIPLIER).wrapping_add(self.inc);
        let xorshifted = (((old >> 18) ^ old) >> 27) as u32;
        let rot = (old >> 59) as u32;
        xorshifted.rotate_right(rot)
    }

    pub fn next_u64(&mut self) -> u64 {
        let hi = self.next_u32() as u64;
        let lo = self.next_u32() as u64;
        (hi << 32) | lo
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Poisson-distributed count for the given rate.
    ///
    /// Exponential accumulation keeps every draw in log space, so it stays
    /// exact for any rate a tick can plausibly carry (no `exp` underflow).
    pub fn poisson(&mut self, lambda: f64) -> u64 {
        debug_assert!(lambda.is_finite() && lambda >= 0.0);
        if lambda <= 0.0 {
            return 0;
        }
        let mut acc = 0.0;
        let mut count = 0;
        loop {
            acc += -log(1.0 - self.next_f64());
            if acc > lambda {
                return count;
            }
            count += 1;
        }
    }

    /// Raw generator words, folded into run digests.
    pub fn state_words(&self) -> (u64, u64) {
        (self.state, self.inc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Frozen from an independent implementation of the published algorithm.
    // The first word for seed 42 / stream 54 (0xa15c02b7) matches the pcg32
    // demo output, anchoring the whole chain.
    #[test]
    fn matches_reference_stream() {
        let mut rng = Pcg32::with_stream(42, 54);
        let got: [u32; 6] = core::array::from_fn(|_| rng.next_u32());
        assert_eq!(
            got,
            [0xa15c_02b7, 0x914d_8087, 0x2fe3_4a57, 0x7174_b7ec, 0x4149_6410, 0xc0d4_0dac]
        );
    }

    #[test]
    fn default_stream_golden_words() {
        let mut rng = Pcg32::new(42);
        assert_eq!(rng.next_u32(), 0x7d58_0cb4);
        assert_eq!(rng.next_u32(), 0x30e5_1cda);
        let mut rng0 = Pcg32::new(0);
        assert_eq!(rng0.next_u32(), 0xd6ec_b501);
        assert_eq!(rng0.next_u32(), 0xd5e7_5cd7);
    }

    #[test]
    fn u64_and_f64_golden_values() {
        let mut rng = Pcg32::new(42);
        assert_eq!(rng.next_u64(), 0x7d58_0cb4_30e5_1cda);
        assert_eq!(rng.next_u64(), 0x3d7f_bd54_c125_30c7);
        let mut rng = Pcg32::new(42);
        assert_eq!(rng.next_f64(), 0.4896247806472228);
        assert_eq!(rng.next_f64(), 0.2402304012222387);
    }

    #[test]
    fn same_seed_same_sequence() {
        let mut a = Pcg32::new(7);
        let mut b = Pcg32::new(7);
        for _ in 0..1000 {
            assert_eq!(a.next_u32(), b.next_u32());
        }
        assert_ne!(Pcg32::new(7).next_u32(), Pcg32::new(8).next_u32());
    }

    #[test]
    fn f64_stays_in_unit_interval() {
        let mut rng = Pcg32::new(123);
        for _ in 0..10_000 {
            let u = rng.next_f64();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn poisson_golden_and_zero_rate() {
        let mut rng = Pcg32::new(42);
        let counts: [u64; 8] = core::array::from_fn(|_| rng.poisson(6.0));
        assert_eq!(counts, [7, 4, 5, 8, 6, 6, 10, 6]);
        assert_eq!(Pcg32::new(1).poisson(0.0), 0);
    }

    #[test]
    fn poisson_sample_mean_tracks_rate() {
        let mut rng = Pcg32::new(99);
        let n = 20_000;
        let total: u64 = (0..n).map(|_| rng.poisson(3.5)).sum();
        let mean = total as f64 / n as f64;
        // 4 sigma of the sample mean for lambda 3.5
        assert!((mean - 3.5).abs() < 4.0 * (3.5f64 / n as f64).sqrt());
    }
}
