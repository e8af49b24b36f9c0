//! Reconstructed MaRaB baseline: optimism on the empirical CVaR of losses.
//!
//! Each round plays `argmin_i ĉ_i − c √(ln t / T_i)` where `ĉ_i` is the mean
//! of the largest `⌈(1−α) T_i⌉` losses seen on arm `i`. The rule has no flag
//! of its own; the one reported here is the greedy test `min_i ĉ_i <= τ`.

use serde::{Deserialize, Serialize};

use super::{argmin_by, simulate, Diagnostics, Policy, PolicyDecision};
use crate::cvar::{tail_count, top_mean};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::regret::RunRecord;
use crate::stats::RngStream;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MarabConfig {
    pub c_explore: f64,
}

impl Default for MarabConfig {
    fn default() -> Self {
        Self { c_explore: 1.0 }
    }
}

impl MarabConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c_explore.is_finite() && self.c_explore >= 0.0) {
            return Err(Error::config(
                "c_explore",
                format!("must be nonnegative and finite, got {}", self.c_explore),
            ));
        }
        Ok(())
    }
}

pub struct Marab {
    /// Observed losses per arm, largest first.
    losses: Vec<Vec<f64>>,
    alpha: f64,
    tau: f64,
    c_explore: f64,
}

impl Marab {
    pub fn new(instance: &Instance, config: MarabConfig) -> Self {
        Self {
            losses: vec![Vec::new(); instance.num_arms()],
            alpha: instance.alpha(),
            tau: instance.tau(),
            c_explore: config.c_explore,
        }
    }

    pub fn empirical_cvars(&self) -> Result<Vec<f64>> {
        self.losses
            .iter()
            .enumerate()
            .map(|(i, xs)| {
                if xs.is_empty() {
                    Err(Error::Usage(format!("arm {i} has not been played; warm-up is incomplete")))
                } else {
                    Ok(top_mean(xs, tail_count(xs.len(), self.alpha)))
                }
            })
            .collect()
    }
}

impl Policy for Marab {
    fn name(&self) -> &str {
        "MaRaB"
    }

    fn select(&mut self, round: usize, _rng: &mut RngStream) -> Result<PolicyDecision> {
        let log_t = (round as f64).ln();
        let index: Vec<f64> = self
            .empirical_cvars()?
            .into_iter()
            .zip(&self.losses)
            .map(|(c, xs)| c - self.c_explore * (log_t / xs.len() as f64).sqrt())
            .collect();
        let arm = argmin_by(index.iter().copied().enumerate()).expect("at least one arm");
        Ok(PolicyDecision { arm, sampled_feasible_set: Vec::new(), diagnostics: Diagnostics::Index(index) })
    }

    fn observe(&mut self, arm: usize, loss: f64) -> Result<()> {
        if !loss.is_finite() {
            return Err(Error::Input(format!("observed loss {loss} is not finite")));
        }
        let xs = self
            .losses
            .get_mut(arm)
            .ok_or_else(|| Error::Usage(format!("arm {arm} out of range")))?;
        let at = xs.partition_point(|&y| y >= loss);
        xs.insert(at, loss);
        Ok(())
    }

    fn feasibility_flag(&mut self, _horizon: usize, _rng: &mut RngStream) -> Result<bool> {
        Ok(self.empirical_cvars()?.into_iter().any(|c| c <= self.tau))
    }
}

pub fn run_marab(instance: &Instance, horizon: usize, rng: &mut RngStream, c_explore: f64) -> Result<RunRecord> {
    let config = MarabConfig { c_explore };
    config.validate()?;
    simulate(&mut Marab::new(instance, config), instance, horizon, rng)
}
