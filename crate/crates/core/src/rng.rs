//! Deterministic random number generation.
//!
//! Every stochastic component in this crate (noise synthesis, dataset
//! generation, weight initialization, batch shuffling) draws from the
//! SplitMix64 generator below so that a run is a pure function of its seed
//! on every platform. The algorithm is fixed here rather than taken from an
//! external crate so the bit stream can never change under a dependency
//! upgrade.

/// SplitMix64 (Steele, Lea & Flood 2014; as published in Vigna's
/// `splitmix64.c` reference implementation).
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
    /// Second Box-Muller variate held back for the next call.
    cached_normal: Option<f64>,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 {
            state: seed,
            cached_normal: None,
        }
    }

    /// Generator for trial `index` of a run seeded with `seed`. Monte-Carlo
    /// grid points use this so they can execute in any order (or in
    /// parallel) and still reproduce byte-identically.
    pub fn for_trial(seed: u64, index: u64) -> Self {
        SplitMix64::new(seed.wrapping_add(index))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Fair coin.
    pub fn next_bool(&mut self) -> bool {
        self.next_u64() & 1 == 1
    }

    /// Standard normal variate via the Box-Muller transform. Variates are
    /// produced in pairs; the second of each pair is cached.
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.cached_normal.take() {
            return z;
        }
        // u1 in (0, 1] keeps the log finite.
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        self.cached_normal = Some(radius * angle.sin());
        radius * angle.cos()
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = (self.next_u64() % (i as u64 + 1)) as usize;
            items.swap(i, j);
        }
    }
}
