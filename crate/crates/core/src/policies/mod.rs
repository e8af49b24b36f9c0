//! Bandit policies and the shared simulation loop.
//!
//! Every policy plays each arm once (rounds `1..=K`) and then asks
//! [`Policy::select`] for rounds `K+1..=n`. After the last round the policy
//! reports its feasibility flag.

mod cvar_ts;
mod marab;
mod posterior;
mod rc_lcb;
mod uniform;

use serde::{Deserialize, Serialize};

pub use cvar_ts::{cvar_ts_step, run_cvar_ts, CvarTs, CvarTsConfig, FlagMode, ThetaVariance};
pub use marab::{run_marab, Marab, MarabConfig};
pub use posterior::PosteriorState;
pub use rc_lcb::{run_rc_lcb, RcLcb, RcLcbConfig, SigmaMode};
pub use uniform::UniformRandom;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::regret::RunRecord;
use crate::stats::{sample_gaussian, RngStream};

/// Per-arm Thompson draw and the CVaR index built from it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThompsonSample {
    pub theta: f64,
    pub kappa: f64,
    pub cvar_hat: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Diagnostics {
    Thompson(Vec<ThompsonSample>),
    /// Selection index per arm (lower is better).
    Index(Vec<f64>),
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolicyDecision {
    pub arm: usize,
    /// Arms the policy currently believes feasible; may be empty.
    pub sampled_feasible_set: Vec<usize>,
    pub diagnostics: Diagnostics,
}

pub trait Policy {
    fn name(&self) -> &str;

    /// Chooses the arm for `round` (1-based, always greater than `K`).
    fn select(&mut self, round: usize, rng: &mut RngStream) -> Result<PolicyDecision>;

    fn observe(&mut self, arm: usize, loss: f64) -> Result<()>;

    /// End-of-horizon verdict on whether any arm is feasible.
    fn feasibility_flag(&mut self, horizon: usize, rng: &mut RngStream) -> Result<bool>;
}

/// Policy choice plus hyperparameters, as read from an experiment config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolicySpec {
    CvarTs(CvarTsConfig),
    RcLcb(RcLcbConfig),
    Marab(MarabConfig),
    Uniform,
}

impl PolicySpec {
    pub fn label(&self) -> &'static str {
        match self {
            PolicySpec::CvarTs(_) => "CVaR-TS",
            PolicySpec::RcLcb(_) => "RC-LCB",
            PolicySpec::Marab(_) => "MaRaB",
            PolicySpec::Uniform => "Uniform",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PolicySpec::CvarTs(c) => c.validate(),
            PolicySpec::RcLcb(c) => c.validate(),
            PolicySpec::Marab(c) => c.validate(),
            PolicySpec::Uniform => Ok(()),
        }
    }

    pub fn build(&self, instance: &Instance) -> Box<dyn Policy> {
        match self {
            PolicySpec::CvarTs(c) => Box::new(CvarTs::new(instance, c.clone())),
            PolicySpec::RcLcb(c) => Box::new(RcLcb::new(instance, c.clone())),
            PolicySpec::Marab(c) => Box::new(Marab::new(instance, c.clone())),
            PolicySpec::Uniform => Box::new(UniformRandom::new(instance)),
        }
    }

    /// The three policies compared in the benchmark, with default settings.
    pub fn benchmark_set() -> Vec<PolicySpec> {
        vec![
            PolicySpec::CvarTs(CvarTsConfig::default()),
            PolicySpec::RcLcb(RcLcbConfig::default()),
            PolicySpec::Marab(MarabConfig::default()),
        ]
    }
}

/// Runs `policy` for `horizon` rounds against `instance`.
pub fn simulate(
    policy: &mut dyn Policy,
    instance: &Instance,
    horizon: usize,
    rng: &mut RngStream,
) -> Result<RunRecord> {
    simulate_with(policy, instance, horizon, rng, |_, _| {})
}

/// As [`simulate`], handing every post-warm-up decision to `inspect`.
pub fn simulate_with(
    policy: &mut dyn Policy,
    instance: &Instance,
    horizon: usize,
    rng: &mut RngStream,
    mut inspect: impl FnMut(usize, &PolicyDecision),
) -> Result<RunRecord> {
    let k = instance.num_arms();
    if horizon < k {
        return Err(Error::config(
            "horizon",
            format!("horizon {horizon} is shorter than the warm-up of {k} rounds"),
        ));
    }
    let seed = rng.seed();
    let arms = instance.arms();
    let mut pull_counts = vec![0u64; k];
    let mut pulls_by_round = Vec::with_capacity(horizon);

    for round in 1..=horizon {
        let arm = if round <= k {
            round - 1
        } else {
            let decision = policy.select(round, rng)?;
            if decision.arm >= k {
                return Err(Error::Usage(format!(
                    "{} selected arm {} of {k}",
                    policy.name(),
                    decision.arm
                )));
            }
            inspect(round, &decision);
            decision.arm
        };
        let loss = sample_gaussian(rng, arms[arm].mu, arms[arm].sigma)?;
        policy.observe(arm, loss)?;
        pull_counts[arm] += 1;
        pulls_by_round.push(arm);
    }
    let flag = policy.feasibility_flag(horizon, rng)?;
    Ok(RunRecord { pull_counts, pulls_by_round, flag, seed })
}

/// Index of the smallest value; ties go to the lowest index.
pub(crate) fn argmin_by<I: IntoIterator<Item = (usize, f64)>>(items: I) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in items {
        match best {
            Some((_, bv)) if !(v < bv) => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmin_ties_to_lowest() {
        assert_eq!(argmin_by([(0, 1.0), (1, 0.5), (2, 0.5)]), Some(1));
        assert_eq!(argmin_by(std::iter::empty()), None);
        assert_eq!(argmin_by([(3, 2.0)]), Some(3));
    }

    #[test]
    fn spec_json_shape() {
        let json = r#"[{"kind":"cvar_ts"},{"kind":"rc_lcb","d_big":3.0},{"kind":"marab","c_explore":0.5},{"kind":"uniform"}]"#;
        let specs: Vec<PolicySpec> = serde_json::from_str(json).unwrap();
        assert_eq!(specs[0], PolicySpec::CvarTs(CvarTsConfig::default()));
        assert!(matches!(&specs[2], PolicySpec::Marab(c) if c.c_explore == 0.5));
        assert_eq!(specs[3].label(), "Uniform");
    }
}
