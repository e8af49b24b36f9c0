//! Reconstructed RC-LCB baseline.
//!
//! Only the confidence constants of this algorithm are available here, so the
//! rule below is a reconstruction: a lower confidence bound on each arm's CVaR
//! index decides plausibility, and among plausible arms the one with the
//! smallest mean lower bound is played. With no plausible arm it plays the
//! arm whose CVaR lower bound is smallest.

use serde::{Deserialize, Serialize};

use super::{argmin_by, simulate, Diagnostics, Policy, PolicyDecision};
use crate::cvar::{c_star, RiskParams};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::regret::RunRecord;
use crate::stats::RngStream;

/// Which σ enters the sub-Gaussian constant `d = 1/(8σ²)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaMode {
    /// The instance-wide bound `sigma_max` for every arm.
    #[default]
    SigmaMax,
    /// Each arm's own σ.
    PerArm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RcLcbConfig {
    /// Concentration prefactor `D` in `ln(2 D t²)`.
    pub d_big: f64,
    pub sigma_mode: SigmaMode,
}

impl Default for RcLcbConfig {
    fn default() -> Self {
        Self { d_big: 3.0, sigma_mode: SigmaMode::SigmaMax }
    }
}

impl RcLcbConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.d_big.is_finite() && self.d_big > 0.0) {
            return Err(Error::config("d_big", format!("must be positive and finite, got {}", self.d_big)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Unbiased sample standard deviation; zero with fewer than two samples.
    fn sample_std(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0).sqrt()
        }
    }
}

pub struct RcLcb {
    moments: Vec<Moments>,
    /// `d = 1/(8σ²)` per arm.
    d_small: Vec<f64>,
    sigma_max: f64,
    params: RiskParams,
    c_star: f64,
    d_big: f64,
    last_set: Option<Vec<usize>>,
}

/// Per-arm quantities behind one RC-LCB decision.
#[derive(Clone, Debug, PartialEq)]
pub struct RcLcbIndices {
    pub cvar_hat: Vec<f64>,
    pub cvar_width: Vec<f64>,
    pub mean_width: Vec<f64>,
    pub feasible: Vec<usize>,
}

impl RcLcb {
    pub fn new(instance: &Instance, config: RcLcbConfig) -> Self {
        let d_small = instance
            .arms()
            .iter()
            .map(|a| {
                let s = match config.sigma_mode {
                    SigmaMode::SigmaMax => instance.sigma_max(),
                    SigmaMode::PerArm => a.sigma,
                };
                1.0 / (8.0 * s * s)
            })
            .collect();
        Self {
            moments: vec![Moments::default(); instance.num_arms()],
            d_small,
            sigma_max: instance.sigma_max(),
            params: instance.risk_params(),
            c_star: c_star(instance.alpha()).expect("instance alpha is validated"),
            d_big: config.d_big,
            last_set: None,
        }
    }

    /// Indices at round `t` from the current statistics.
    pub fn indices(&self, t: usize) -> Result<RcLcbIndices> {
        if let Some(i) = self.moments.iter().position(|m| m.count == 0) {
            return Err(Error::Usage(format!("arm {i} has not been played; warm-up is incomplete")));
        }
        let t = t as f64;
        let beta = 1.0 - self.params.alpha;
        let weight = self.params.alpha / beta;
        let log_conc = (2.0 * self.d_big * t * t).ln();
        let log_t = t.ln().max(0.0);
        let mut out = RcLcbIndices {
            cvar_hat: Vec::with_capacity(self.moments.len()),
            cvar_width: Vec::with_capacity(self.moments.len()),
            mean_width: Vec::with_capacity(self.moments.len()),
            feasible: Vec::new(),
        };
        for (i, (m, &d)) in self.moments.iter().zip(&self.d_small).enumerate() {
            let n = m.count as f64;
            let c_hat = m.mean * weight + m.sample_std() * self.c_star;
            let w = (log_conc / (n * d)).sqrt() / beta;
            out.cvar_hat.push(c_hat);
            out.cvar_width.push(w);
            out.mean_width.push(self.sigma_max * (4.0 * log_t / n).sqrt());
            if c_hat - w <= self.params.tau {
                out.feasible.push(i);
            }
        }
        Ok(out)
    }
}

impl Policy for RcLcb {
    fn name(&self) -> &str {
        "RC-LCB"
    }

    fn select(&mut self, round: usize, _rng: &mut RngStream) -> Result<PolicyDecision> {
        let ix = self.indices(round)?;
        let (arm, index) = if ix.feasible.is_empty() {
            let lcb: Vec<f64> = ix.cvar_hat.iter().zip(&ix.cvar_width).map(|(c, w)| c - w).collect();
            (argmin_by(lcb.iter().copied().enumerate()), lcb)
        } else {
            let lcb: Vec<f64> = self.moments.iter().zip(&ix.mean_width).map(|(m, w)| m.mean - w).collect();
            (argmin_by(ix.feasible.iter().map(|&i| (i, lcb[i]))), lcb)
        };
        self.last_set = Some(ix.feasible.clone());
        Ok(PolicyDecision {
            arm: arm.expect("at least one arm"),
            sampled_feasible_set: ix.feasible,
            diagnostics: Diagnostics::Index(index),
        })
    }

    fn observe(&mut self, arm: usize, loss: f64) -> Result<()> {
        if !loss.is_finite() {
            return Err(Error::Input(format!("observed loss {loss} is not finite")));
        }
        self.moments
            .get_mut(arm)
            .ok_or_else(|| Error::Usage(format!("arm {arm} out of range")))?
            .push(loss);
        Ok(())
    }

    fn feasibility_flag(&mut self, horizon: usize, _rng: &mut RngStream) -> Result<bool> {
        match &self.last_set {
            Some(set) => Ok(!set.is_empty()),
            None => Ok(!self.indices(horizon)?.feasible.is_empty()),
        }
    }
}

pub fn run_rc_lcb(
    instance: &Instance,
    horizon: usize,
    rng: &mut RngStream,
    d_big: f64,
    sigma_mode: SigmaMode,
) -> Result<RunRecord> {
    let config = RcLcbConfig { d_big, sigma_mode };
    config.validate()?;
    simulate(&mut RcLcb::new(instance, config), instance, horizon, rng)
}
