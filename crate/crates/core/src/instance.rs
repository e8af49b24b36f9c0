//! Ground-truth bandit instances: feasibility, arm classes and gaps.

use serde::{Deserialize, Serialize};

use crate::cvar::{gaussian_cvar, RiskParams};
use crate::error::{Error, Result};

/// True loss law `N(mu, sigma²)` of one arm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianArm {
    pub mu: f64,
    pub sigma: f64,
}

impl GaussianArm {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::domain("GaussianArm", format!("mu = {mu} is not finite")));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::domain("GaussianArm", format!("sigma = {sigma} must be positive")));
        }
        Ok(Self { mu, sigma })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    arms: Vec<GaussianArm>,
    alpha: f64,
    tau: f64,
    sigma_max: f64,
}

impl Instance {
    pub fn new(arms: Vec<GaussianArm>, alpha: f64, tau: f64, sigma_max: f64) -> Result<Self> {
        if arms.len() < 2 {
            return Err(Error::domain("Instance", format!("need at least 2 arms, got {}", arms.len())));
        }
        if !(alpha > 0.5 && alpha < 1.0) {
            return Err(Error::domain("Instance", format!("alpha = {alpha} is outside (1/2, 1)")));
        }
        if !tau.is_finite() {
            return Err(Error::domain("Instance", format!("tau = {tau} is not finite")));
        }
        if !(sigma_max > 0.0) || !sigma_max.is_finite() {
            return Err(Error::domain("Instance", format!("sigma_max = {sigma_max} must be positive")));
        }
        for (i, arm) in arms.iter().enumerate() {
            GaussianArm::new(arm.mu, arm.sigma)?;
            if arm.sigma > sigma_max {
                return Err(Error::domain(
                    "Instance",
                    format!("arm {i}: sigma = {} exceeds sigma_max = {sigma_max}", arm.sigma),
                ));
            }
        }
        Ok(Self { arms, alpha, tau, sigma_max })
    }

    /// Builds an instance from mean and variance vectors.
    pub fn from_moments(mus: &[f64], sigma2s: &[f64], alpha: f64, tau: f64, sigma_max: f64) -> Result<Self> {
        if mus.len() != sigma2s.len() {
            return Err(Error::Input(format!(
                "{} means but {} variances",
                mus.len(),
                sigma2s.len()
            )));
        }
        let arms = mus
            .iter()
            .zip(sigma2s)
            .map(|(&mu, &s2)| {
                if !(s2 > 0.0) {
                    return Err(Error::domain("Instance", format!("variance {s2} must be positive")));
                }
                GaussianArm::new(mu, s2.sqrt())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(arms, alpha, tau, sigma_max)
    }

    pub fn arms(&self) -> &[GaussianArm] {
        &self.arms
    }

    pub fn num_arms(&self) -> usize {
        self.arms.len()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn sigma_max(&self) -> f64 {
        self.sigma_max
    }

    pub fn risk_params(&self) -> RiskParams {
        RiskParams { alpha: self.alpha, tau: self.tau }
    }

    /// Same arms under a different confidence level.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.arms.clone(), alpha, self.tau, self.sigma_max)
    }

    /// Same arms under a different threshold.
    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        Self::new(self.arms.clone(), self.alpha, tau, self.sigma_max)
    }

    /// Per-arm CVaR on the crate's Gaussian scale.
    pub fn cvars(&self) -> Vec<f64> {
        self.arms
            .iter()
            .map(|a| gaussian_cvar(a.mu, a.sigma, self.alpha).expect("validated at construction"))
            .collect()
    }

    pub fn classify(&self) -> Classification {
        let cvars = self.cvars();
        let feasible_set: Vec<usize> = (0..self.arms.len()).filter(|&i| cvars[i] <= self.tau).collect();
        let feasible = !feasible_set.is_empty();

        let mut classes = Vec::with_capacity(self.arms.len());
        let optimal_set: Vec<usize>;
        if feasible {
            let best_mu = feasible_set
                .iter()
                .map(|&i| self.arms[i].mu)
                .fold(f64::INFINITY, f64::min);
            optimal_set = feasible_set
                .iter()
                .copied()
                .filter(|&i| self.arms[i].mu == best_mu)
                .collect();
            for (i, arm) in self.arms.iter().enumerate() {
                let class = if cvars[i] <= self.tau {
                    if arm.mu == best_mu {
                        ArmClass::Optimal
                    } else {
                        ArmClass::Suboptimal
                    }
                } else if arm.mu <= best_mu {
                    ArmClass::Deceiver
                } else {
                    ArmClass::Infeasible
                };
                classes.push(class);
            }
        } else {
            let best_cvar = cvars.iter().copied().fold(f64::INFINITY, f64::min);
            optimal_set = (0..self.arms.len()).filter(|&i| cvars[i] == best_cvar).collect();
            for &c in &cvars {
                classes.push(if c == best_cvar { ArmClass::Optimal } else { ArmClass::NonOptimal });
            }
        }
        Classification {
            feasible,
            representative: optimal_set[0],
            optimal_set,
            feasible_set,
            classes,
            cvars,
        }
    }

    pub fn gaps(&self) -> Vec<GapTriple> {
        self.classify().gaps(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ArmClass {
    Optimal,
    /// Feasible with a larger mean than the optimal arm.
    Suboptimal,
    /// CVaR above the threshold, mean above the optimal arm's.
    Infeasible,
    /// CVaR above the threshold but mean no larger than the optimal arm's.
    Deceiver,
    /// Any arm other than the lowest-CVaR arm of an infeasible instance.
    NonOptimal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub feasible: bool,
    pub classes: Vec<ArmClass>,
    /// Arms with CVaR at most `tau`.
    pub feasible_set: Vec<usize>,
    pub optimal_set: Vec<usize>,
    /// Lowest-index member of the optimal set; gaps are measured against it.
    pub representative: usize,
    pub cvars: Vec<f64>,
}

impl Classification {
    pub fn is_feasible_arm(&self, i: usize) -> bool {
        self.feasible_set.binary_search(&i).is_ok()
    }

    pub fn gaps(&self, instance: &Instance) -> Vec<GapTriple> {
        let rep = self.representative;
        let arms = instance.arms();
        (0..arms.len())
            .map(|i| {
                let mut g = GapTriple::default();
                match self.classes[i] {
                    ArmClass::Optimal => {}
                    ArmClass::Suboptimal => g.sub = Some(arms[i].mu - arms[rep].mu),
                    ArmClass::Infeasible | ArmClass::Deceiver => {
                        g.inf = Some(self.cvars[i] - instance.tau())
                    }
                    ArmClass::NonOptimal => g.risk = Some(self.cvars[i] - self.cvars[rep]),
                }
                g
            })
            .collect()
    }
}

/// Suboptimality, infeasibility and risk gaps of one arm; absent where undefined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GapTriple {
    pub sub: Option<f64>,
    pub inf: Option<f64>,
    pub risk: Option<f64>,
}

impl GapTriple {
    pub fn suboptimality(&self) -> Result<f64> {
        self.sub
            .ok_or_else(|| Error::Usage("suboptimality gap is defined only for suboptimal arms".into()))
    }

    pub fn infeasibility(&self) -> Result<f64> {
        self.inf.ok_or_else(|| {
            Error::Usage("infeasibility gap is defined only for infeasible arms of feasible instances".into())
        })
    }

    pub fn risk(&self) -> Result<f64> {
        self.risk.ok_or_else(|| {
            Error::Usage("risk gap is defined only for non-optimal arms of infeasible instances".into())
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::{PAPER_MEANS, PAPER_SIGMA2_HIGH};

    fn paper(tau: f64) -> Instance {
        Instance::from_moments(&PAPER_MEANS, &PAPER_SIGMA2_HIGH, 0.95, tau, 1.0).unwrap()
    }

    #[test]
    fn paper_feasible_classification() {
        let c = paper(4.6).classify();
        assert!(c.feasible);
        assert_eq!(c.feasible_set, vec![0, 1]);
        assert_eq!(c.optimal_set, vec![0]);
        assert_eq!(c.classes[0], ArmClass::Optimal);
        assert_eq!(c.classes[1], ArmClass::Suboptimal);
        assert!(c.classes[2..].iter().all(|&k| k == ArmClass::Infeasible));
    }

    #[test]
    fn paper_infeasible_classification() {
        let c = paper(2.0).classify();
        assert!(!c.feasible);
        assert_eq!(c.optimal_set, vec![0]);
        assert!((c.cvars[0] - 2.3376).abs() < 1e-4);
        assert!(c.classes[1..].iter().all(|&k| k == ArmClass::NonOptimal));
    }

    #[test]
    fn deceiver_arm() {
        let arms = vec![GaussianArm::new(0.0, 1.0).unwrap(), GaussianArm::new(-0.1, 10.0).unwrap()];
        let c1 = gaussian_cvar(0.0, 1.0, 0.9).unwrap();
        let inst = Instance::new(arms, 0.9, c1 + 0.01, 10.0).unwrap();
        let c = inst.classify();
        assert_eq!(c.classes, vec![ArmClass::Optimal, ArmClass::Deceiver]);
        assert!(inst.gaps()[1].inf.unwrap() > 0.0);
    }

    #[test]
    fn gap_values() {
        let g = paper(4.6).gaps();
        assert!((g[1].suboptimality().unwrap() - 0.1).abs() < 1e-12);
        assert!((g[2].infeasibility().unwrap() - 0.797).abs() < 1e-3);
        assert!(g[0].suboptimality().is_err());
        assert!(g[1].risk().is_err());
        let g = paper(2.0).gaps();
        assert!((g[1].risk().unwrap() - 2.2451).abs() < 1e-4);
        assert!(g[0].risk().is_err());
    }

    #[test]
    fn all_defined_gaps_positive() {
        for tau in [2.0, 4.6, 8.0] {
            for g in paper(tau).gaps() {
                for v in [g.sub, g.inf, g.risk].into_iter().flatten() {
                    assert!(v > 0.0);
                }
            }
        }
    }

    #[test]
    fn ties_give_optimal_set_with_lowest_representative() {
        let arms = vec![
            GaussianArm::new(0.5, 0.3).unwrap(),
            GaussianArm::new(0.1, 0.2).unwrap(),
            GaussianArm::new(0.1, 0.2).unwrap(),
        ];
        let inst = Instance::new(arms, 0.95, 20.0, 1.0).unwrap();
        let c = inst.classify();
        assert_eq!(c.optimal_set, vec![1, 2]);
        assert_eq!(c.representative, 1);
        assert_eq!(c.classes[0], ArmClass::Suboptimal);
    }

    #[test]
    fn boundary_arm_is_feasible() {
        let arm = GaussianArm::new(0.1, 0.2).unwrap();
        let tau = gaussian_cvar(0.1, 0.2, 0.9).unwrap();
        let inst = Instance::new(vec![arm, GaussianArm::new(1.0, 0.2).unwrap()], 0.9, tau, 1.0).unwrap();
        assert_eq!(inst.classify().feasible_set, vec![0]);
    }

    #[test]
    fn validation() {
        let a = GaussianArm::new(0.0, 1.0).unwrap();
        assert!(Instance::new(vec![a], 0.9, 1.0, 1.0).is_err());
        assert!(Instance::new(vec![a, a], 0.5, 1.0, 1.0).is_err());
        assert!(Instance::new(vec![a, a], 0.9, 1.0, 0.5).is_err());
        assert!(GaussianArm::new(0.0, 0.0).is_err());
        assert!(Instance::from_moments(&[0.0, 1.0], &[1.0], 0.9, 1.0, 2.0).is_err());
    }

    #[test]
    fn shifting_means_and_tau_preserves_feasible_set() {
        let base = paper(4.6);
        let alpha = base.alpha();
        for shift in [-1.0, -0.3, 0.25, 2.0] {
            let dmu = shift * (1.0 - alpha) / alpha;
            let arms: Vec<GaussianArm> = base
                .arms()
                .iter()
                .map(|a| GaussianArm::new(a.mu + dmu, a.sigma).unwrap())
                .collect();
            let shifted = Instance::new(arms, alpha, base.tau() + shift, base.sigma_max()).unwrap();
            assert_eq!(shifted.classify().feasible_set, base.classify().feasible_set);
        }
    }
}
