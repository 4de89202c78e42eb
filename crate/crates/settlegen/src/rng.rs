//! Seeded pseudo-randomness for generators and terrain synthesis.
//!
//! Everything random in this crate flows through [`SplitMix64`] so that a
//! `(seed, inputs)` pair always produces the same output, regardless of
//! platform or thread count. Generators that fan out per-unit work (one
//! stream per yard, per building, ...) derive child seeds with
//! [`derive_seed`] instead of sharing one stream.

/// Finalizer of the splitmix64 generator, usable as a standalone mixer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive an independent child seed from a global seed and a stream index.
///
/// Child streams are decorrelated even for adjacent indices, so per-yard or
/// per-building work can be seeded as `derive_seed(seed, i)` and remain
/// reproducible when units are generated in any order.
#[inline]
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    mix64(seed ^ mix64(stream))
}

/// splitmix64 PRNG (Steele, Lea, Flood 2014). Small state, solid mixing,
/// and trivially reproducible across implementations.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform integer in `[0, n)`. `n` must be non-zero.
    ///
    /// Plain modulo: the bias is negligible for the small ranges used here
    /// and the draw always consumes exactly one `next_u64`, which keeps
    /// stream positions easy to reason about.
    pub fn next_below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        self.next_u64() % n
    }

    /// Uniform integer in the inclusive range `[lo, hi]`.
    pub fn next_range_i32(&mut self, lo: i32, hi: i32) -> i32 {
        debug_assert!(lo <= hi);
        let span = (hi as i64 - lo as i64 + 1) as u64;
        lo + self.next_below(span) as i32
    }

    /// Uniform float in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Bernoulli draw with probability `p`.
    pub fn chance(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }
}
