//! Portable random stream used by every generator and by threshold
//! calibration.
//!
//! * Generator: xoshiro256++ seeded by expanding the `u64` seed with
//!   SplitMix64 (increment `0x9e3779b97f4a7c15`, mixing constants
//!   `0xbf58476d1ce4e5b9` and `0x94d049bb133111eb`).
//! * Uniform `[0, 1)`: the top 53 bits of the next output times `2^-53`.
//! * Integer in `[0, n)`: the high 64 bits of `next * n` (128-bit product).
//! * Standard normal: Box–Muller on `u1 = 1 − uniform()` and `u2 = uniform()`,
//!   returning `sqrt(−2 ln u1) cos(2π u2)` first and caching the sine branch
//!   for the following call.
//!
//! These steps are enough to reproduce any generated stream bit for bit in
//! another language.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

#[derive(Debug, Clone)]
pub struct StreamRng {
    inner: Xoshiro256PlusPlus,
    spare: Option<f64>,
}

impl StreamRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: Xoshiro256PlusPlus::seed_from_u64(seed),
            spare: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        ((u128::from(self.next_u64()) * u128::from(n)) >> 64) as u64
    }

    pub fn gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}
