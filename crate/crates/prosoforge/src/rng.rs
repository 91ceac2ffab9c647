//! Deterministic random streams. Everything stochastic in the toolkit
//! (weight init, perturbation directions, noise fixtures) draws from
//! splitmix64 so runs are reproducible from a single u64 seed.

/// splitmix64: passes practical randomness tests, two adds and three xors
/// per draw, and trivially seedable.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [-a, a].
    pub fn next_symmetric(&mut self, a: f64) -> f64 {
        a * (2.0 * self.next_f64() - 1.0)
    }

    /// Rademacher draw: -1.0 or +1.0 with equal probability.
    pub fn next_sign(&mut self) -> f64 {
        if self.next_u64() & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}
