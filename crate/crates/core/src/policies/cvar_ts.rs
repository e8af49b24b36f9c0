//! CVaR Thompson sampling for Gaussian arms with unknown mean and variance.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{argmin_by, simulate, Diagnostics, Policy, PolicyDecision, PosteriorState, ThompsonSample};
use crate::cvar::{c_star, RiskParams};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::regret::RunRecord;
use crate::stats::{sample_gamma, sample_gaussian, RngStream};

/// Variance of the Thompson draw of the mean.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaVariance {
    /// `1 / (κ T)`: the joint Normal-Gamma posterior draw, with `κ` the
    /// precision sampled in the same round.
    #[default]
    NormalGamma,
    /// `1 / T`, independent of the sampled precision.
    PullCount,
}

/// How the end-of-horizon feasibility flag is formed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum FlagMode {
    /// Whether the sampled feasible set of the final decision round is nonempty.
    #[default]
    FinalRound,
    /// Strict majority over the last `window` decision rounds.
    TailMajority { window: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CvarTsConfig {
    pub theta_variance: ThetaVariance,
    pub flag_mode: FlagMode,
}

impl CvarTsConfig {
    pub fn validate(&self) -> Result<()> {
        if let FlagMode::TailMajority { window: 0 } = self.flag_mode {
            return Err(Error::config("flag_mode.window", "window must be at least 1"));
        }
        Ok(())
    }
}

/// One decision round: draw `(κ, θ)` per arm, form `ĉ = θ α/(1−α) + c*/√κ`,
/// play the smallest `θ` among arms with `ĉ <= τ`, or the smallest `ĉ`
/// overall when no arm qualifies.
pub fn cvar_ts_step(
    states: &[PosteriorState],
    rng: &mut RngStream,
    params: RiskParams,
    theta_variance: ThetaVariance,
) -> Result<PolicyDecision> {
    if states.is_empty() {
        return Err(Error::Usage("no arms to choose from".into()));
    }
    if let Some(i) = states.iter().position(|s| s.count == 0) {
        return Err(Error::Usage(format!("arm {i} has not been played; warm-up is incomplete")));
    }
    let cs = c_star(params.alpha)?;
    let weight = params.alpha / (1.0 - params.alpha);

    let mut samples = Vec::with_capacity(states.len());
    for s in states {
        let kappa = sample_gamma(rng, s.shape, s.rate)?;
        let t = s.count as f64;
        let var = match theta_variance {
            ThetaVariance::NormalGamma => 1.0 / (kappa * t),
            ThetaVariance::PullCount => 1.0 / t,
        };
        let theta = sample_gaussian(rng, s.mu_hat, var.sqrt())?;
        samples.push(ThompsonSample { theta, kappa, cvar_hat: theta * weight + cs / kappa.sqrt() });
    }

    let feasible: Vec<usize> = (0..samples.len()).filter(|&i| samples[i].cvar_hat <= params.tau).collect();
    let arm = if feasible.is_empty() {
        argmin_by(samples.iter().map(|s| s.cvar_hat).enumerate())
    } else {
        argmin_by(feasible.iter().map(|&i| (i, samples[i].theta)))
    }
    .expect("at least one arm");

    Ok(PolicyDecision { arm, sampled_feasible_set: feasible, diagnostics: Diagnostics::Thompson(samples) })
}

pub struct CvarTs {
    states: Vec<PosteriorState>,
    params: RiskParams,
    config: CvarTsConfig,
    recent: VecDeque<bool>,
}

impl CvarTs {
    pub fn new(instance: &Instance, config: CvarTsConfig) -> Self {
        Self {
            states: vec![PosteriorState::prior(); instance.num_arms()],
            params: instance.risk_params(),
            config,
            recent: VecDeque::new(),
        }
    }

    pub fn states(&self) -> &[PosteriorState] {
        &self.states
    }

    fn flag_window(&self) -> usize {
        match self.config.flag_mode {
            FlagMode::FinalRound => 1,
            FlagMode::TailMajority { window } => window.max(1),
        }
    }
}

impl Policy for CvarTs {
    fn name(&self) -> &str {
        "CVaR-TS"
    }

    fn select(&mut self, _round: usize, rng: &mut RngStream) -> Result<PolicyDecision> {
        let decision = cvar_ts_step(&self.states, rng, self.params, self.config.theta_variance)?;
        let window = self.flag_window();
        if self.recent.len() == window {
            self.recent.pop_front();
        }
        self.recent.push_back(!decision.sampled_feasible_set.is_empty());
        Ok(decision)
    }

    fn observe(&mut self, arm: usize, loss: f64) -> Result<()> {
        let state = self
            .states
            .get_mut(arm)
            .ok_or_else(|| Error::Usage(format!("arm {arm} out of range")))?;
        *state = state.update(loss)?;
        Ok(())
    }

    fn feasibility_flag(&mut self, _horizon: usize, rng: &mut RngStream) -> Result<bool> {
        if self.recent.is_empty() {
            // Horizon ended with the warm-up: take one sampling pass.
            let d = cvar_ts_step(&self.states, rng, self.params, self.config.theta_variance)?;
            return Ok(!d.sampled_feasible_set.is_empty());
        }
        let yes = self.recent.iter().filter(|&&b| b).count();
        Ok(2 * yes > self.recent.len())
    }
}

/// CVaR-TS with default settings.
pub fn run_cvar_ts(instance: &Instance, horizon: usize, rng: &mut RngStream) -> Result<RunRecord> {
    let mut policy = CvarTs::new(instance, CvarTsConfig::default());
    simulate(&mut policy, instance, horizon, rng)
}
