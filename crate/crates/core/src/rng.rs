//! Small deterministic generator shared by start vectors and seeded forcing.
//!
//! 64-bit linear congruential generator with Knuth's MMIX constants
//! (`a = 6364136223846793005`, `c = 1442695040888963407`). The top 53 bits of
//! each state give a double in `[0, 1)`. Identical on every platform.

use num_complex::Complex64;

#[derive(Clone, Debug)]
pub struct Lcg {
    state: u64,
}

const MULTIPLIER: u64 = 6_364_136_223_846_793_005;
const INCREMENT: u64 = 1_442_695_040_888_963_407;

impl Lcg {
    pub fn new(seed: u64) -> Self {
        let mut rng = Lcg { state: seed ^ 0x9E37_79B9_7F4A_7C15 };
        rng.next_u64();
        rng
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_mul(MULTIPLIER).wrapping_add(INCREMENT);
        self.state
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[-1, 1)`.
    pub fn next_signed(&mut self) -> f64 {
        2.0 * self.next_f64() - 1.0
    }

    pub fn next_complex(&mut self) -> Complex64 {
        let re = self.next_signed();
        let im = self.next_signed();
        Complex64::new(re, im)
    }

    pub fn complex_vec(&mut self, n: usize) -> Vec<Complex64> {
        (0..n).map(|_| self.next_complex()).collect()
    }
}
