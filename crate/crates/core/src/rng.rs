//! SplitMix64, the seedable generator behind every randomized construction.
//!
//! State transition: `state += 0x9E3779B97F4A7C15`, then the output is the state
//! passed through the SplitMix64 finalizer
//!
//! ```text
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! z =  z ^ (z >> 31)
//! ```
//!
//! with wrapping arithmetic. Because the state after `i` steps is just
//! `seed + i * gamma`, draw `i` can be computed directly ([`SplitMix64::at`]),
//! which is how dataset rows are generated.

use num_bigint::BigInt;

use crate::prob::Prob;

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// The `index`-th output (0-based) of a generator seeded with `seed`.
    pub fn at(seed: u64, index: u64) -> u64 {
        finalize(seed.wrapping_add(GAMMA.wrapping_mul(index.wrapping_add(1))))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        finalize(self.state)
    }

    /// Uniform integer in `0..bound`, by rejection. Panics when `bound == 0`.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % bound;
            }
        }
    }

    /// Uniform index in `0..len`.
    pub fn index(&mut self, len: usize) -> usize {
        self.below(len as u64) as usize
    }

    pub fn coin(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }

    /// `a/q` with `q` uniform in `1..=max_den` and `a` uniform in `0..=q`.
    pub fn prob(&mut self, max_den: u64) -> Prob {
        let q = 1 + self.below(max_den);
        let a = self.below(q + 1);
        Prob::new(num_rational::BigRational::new(BigInt::from(a), BigInt::from(q)))
            .expect("a <= q")
    }

    /// A probability vector of length `len` with common denominator at most `max_den`.
    /// With `positive`, every entry is strictly positive (needs `max_den >= len`).
    pub fn prob_vector(&mut self, len: usize, max_den: u64, positive: bool) -> Vec<Prob> {
        assert!(len > 0, "empty vector");
        let floor = if positive { len as u64 } else { 1 };
        assert!(max_den >= floor, "denominator bound too small");
        let q = floor + self.below(max_den - floor + 1);
        let free = if positive { q - len as u64 } else { q };
        let mut cuts: Vec<u64> = (0..len - 1).map(|_| self.below(free + 1)).collect();
        cuts.sort_unstable();
        let mut parts = Vec::with_capacity(len);
        let mut prev = 0;
        for c in cuts.into_iter().chain(std::iter::once(free)) {
            parts.push(c - prev + u64::from(positive));
            prev = c;
        }
        parts
            .into_iter()
            .map(|a| {
                Prob::new(num_rational::BigRational::new(BigInt::from(a), BigInt::from(q)))
                    .expect("part of a whole")
            })
            .collect()
    }

    /// Random subset of `0..n`.
    pub fn subset(&mut self, n: usize) -> Vec<usize> {
        (0..n).filter(|_| self.coin()).collect()
    }
}
