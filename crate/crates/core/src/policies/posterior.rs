use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normal-Gamma hyperparameters of one arm.
///
/// After `s` observations `x_1..x_s` from the prior `(0, 0, 1/2, 1/2)`:
/// `count = s`, `shape = (1 + s) / 2`, `mu_hat` is the sample mean and
/// `rate - 1/2` is half the sum of squared deviations from it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PosteriorState {
    pub mu_hat: f64,
    pub count: u64,
    pub shape: f64,
    pub rate: f64,
}

impl Default for PosteriorState {
    fn default() -> Self {
        Self::prior()
    }
}

impl PosteriorState {
    pub const fn prior() -> Self {
        Self { mu_hat: 0.0, count: 0, shape: 0.5, rate: 0.5 }
    }

    /// Conjugate update with one observed loss.
    pub fn update(&self, x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::Input(format!("observed loss {x} is not finite")));
        }
        let t = self.count as f64;
        let w = t / (t + 1.0);
        let dev = x - self.mu_hat;
        Ok(Self {
            mu_hat: w * self.mu_hat + x / (t + 1.0),
            count: self.count + 1,
            shape: self.shape + 0.5,
            rate: self.rate + w * dev * dev / 2.0,
        })
    }
}
