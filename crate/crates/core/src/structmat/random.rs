use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Pattern, WeightedMatrix};
use crate::error::{Error, Result};

/// Magnitude range `[lo, hi]` (with `lo > 0`) for random weights; signs are random.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightRange {
    pub lo: f64,
    pub hi: f64,
}

impl Default for WeightRange {
    fn default() -> Self {
        Self { lo: 0.5, hi: 1.5 }
    }
}

impl WeightRange {
    pub fn validate(&self) -> Result<()> {
        if !(self.lo > 0.0 && self.lo <= self.hi && self.hi.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "weight range [{}, {}] must satisfy 0 < lo <= hi",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let magnitude = if self.lo == self.hi {
            self.lo
        } else {
            rng.random_range(self.lo..=self.hi)
        };
        if rng.random_bool(0.5) {
            magnitude
        } else {
            -magnitude
        }
    }
}

/// Each of the `n * n` entries is present independently with probability `density`.
pub fn random_pattern(n: usize, density: f64, seed: u64) -> Result<Pattern> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidConfig(format!(
            "density {density} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::new();
    for r in 0..n {
        for c in 0..n {
            if rng.random_bool(density) {
                entries.push((r, c));
            }
        }
    }
    Pattern::new(n, entries)
}

/// Random weights on exactly the support of `pattern`.
pub fn random_weights(pattern: &Pattern, seed: u64, range: WeightRange) -> Result<WeightedMatrix> {
    range.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = (0..pattern.nnz()).map(|_| range.sample(&mut rng)).collect();
    WeightedMatrix::from_pattern(pattern, &values)
}
