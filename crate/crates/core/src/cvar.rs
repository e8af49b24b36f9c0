//! Gaussian VaR/CVaR and empirical expected shortfall.
//!
//! The Gaussian CVaR used throughout the crate is
//!
//! ```text
//! c_α(μ, σ) = μ · α / (1 − α) + σ · c*_α,    c*_α = φ(Φ⁻¹(α)) / (1 − α)
//! ```
//!
//! Note the mean term: the textbook expected shortfall of `N(μ, σ²)` is
//! `μ + σ c*_α`. Every gap, bound and Thompson index in this crate is
//! expressed on the `μ α / (1 − α)` scale, so that is what
//! [`gaussian_cvar`] returns. The Monte-Carlo oracle [`mc_cvar_oracle`]
//! estimates the textbook quantity and is the only place where it appears.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{sample_gaussian, std_normal_quantile, RngStream};

/// Confidence level and risk threshold of a risk-constrained problem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiskParams {
    pub alpha: f64,
    pub tau: f64,
}

impl RiskParams {
    pub fn new(alpha: f64, tau: f64) -> Result<Self> {
        if !(0.5..1.0).contains(&alpha) {
            return Err(Error::domain("RiskParams", format!("alpha = {alpha} is outside [0.5, 1)")));
        }
        if !tau.is_finite() {
            return Err(Error::domain("RiskParams", format!("tau = {tau} is not finite")));
        }
        Ok(Self { alpha, tau })
    }

    /// `α / (1 − α)`, the weight of the mean in the Gaussian CVaR.
    pub fn mean_weight(&self) -> f64 {
        self.alpha / (1.0 - self.alpha)
    }
}

fn check_alpha(func: &'static str, alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(func, format!("alpha = {alpha} is outside (0, 1)")))
    }
}

fn check_sigma(func: &'static str, sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(func, format!("sigma = {sigma} must be positive and finite")))
    }
}

/// CVaR of the standard normal at level `alpha`.
pub fn c_star(alpha: f64) -> Result<f64> {
    check_alpha("c_star", alpha)?;
    let q = std_normal_quantile(alpha)?;
    Ok((-0.5 * q * q).exp() / ((1.0 - alpha) * (2.0 * PI).sqrt()))
}

/// `mu + sigma Φ⁻¹(alpha)`.
pub fn gaussian_var(mu: f64, sigma: f64, alpha: f64) -> Result<f64> {
    check_alpha("gaussian_var", alpha)?;
    check_sigma("gaussian_var", sigma)?;
    Ok(mu + sigma * std_normal_quantile(alpha)?)
}

/// `mu α/(1−α) + sigma c*_α` (see the module docs for the convention).
pub fn gaussian_cvar(mu: f64, sigma: f64, alpha: f64) -> Result<f64> {
    check_alpha("gaussian_cvar", alpha)?;
    check_sigma("gaussian_cvar", sigma)?;
    Ok(mu * alpha / (1.0 - alpha) + sigma * c_star(alpha)?)
}

/// Mean of the `⌈(1 − α) n⌉` largest losses.
pub fn empirical_cvar(samples: &[f64], alpha: f64) -> Result<f64> {
    check_alpha("empirical_cvar", alpha)?;
    if samples.is_empty() {
        return Err(Error::domain("empirical_cvar", "sample is empty"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    Ok(top_mean(&sorted, tail_count(sorted.len(), alpha)))
}

/// Number of order statistics averaged by [`empirical_cvar`].
pub(crate) fn tail_count(n: usize, alpha: f64) -> usize {
    // Guard against (1 - α) n landing a hair above an integer.
    let raw = (1.0 - alpha) * n as f64;
    let k = (raw - 1e-9 * raw.max(1.0)).ceil() as usize;
    k.clamp(1, n)
}

pub(crate) fn top_mean(sorted_desc: &[f64], k: usize) -> f64 {
    sorted_desc[..k].iter().sum::<f64>() / k as f64
}

/// Monte-Carlo estimate of the textbook CVaR `mu + sigma c*_α` from `n` draws.
pub fn mc_cvar_oracle(rng: &mut RngStream, mu: f64, sigma: f64, alpha: f64, n: usize) -> Result<f64> {
    check_alpha("mc_cvar_oracle", alpha)?;
    check_sigma("mc_cvar_oracle", sigma)?;
    if n < 1000 {
        return Err(Error::domain("mc_cvar_oracle", format!("n = {n} is below 1000")));
    }
    let draws = (0..n)
        .map(|_| sample_gaussian(rng, mu, sigma))
        .collect::<Result<Vec<_>>>()?;
    empirical_cvar(&draws, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::special::phi;

    /// `E[Z 1{Z >= q}] / (1 - α)` by composite Simpson, with `q` found by bisection.
    fn c_star_quadrature(alpha: f64) -> f64 {
        let (mut lo, mut hi) = (-10.0, 10.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if phi(mid) < alpha {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let q = 0.5 * (lo + hi);
        let upper = q + 14.0;
        let m = 20_000;
        let step = (upper - q) / m as f64;
        let f = |z: f64| z * (-0.5 * z * z).exp() / (2.0 * PI).sqrt();
        let mut acc = f(q) + f(upper);
        for i in 1..m {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(q + i as f64 * step);
        }
        acc * step / 3.0 / (1.0 - alpha)
    }

    #[test]
    fn c_star_against_quadrature() {
        assert!((c_star(0.5).unwrap() - 1.0 / (0.5 * (2.0 * PI).sqrt())).abs() < 1e-12);
        for &a in &[0.5, 0.8, 0.9, 0.95, 0.99] {
            assert!((c_star(a).unwrap() - c_star_quadrature(a)).abs() < 1e-8, "alpha {a}");
        }
        assert!((c_star(0.95).unwrap() - 2.0627).abs() < 1e-4);
        assert!((c_star(0.9).unwrap() - 1.7550).abs() < 1e-4);
        assert!(c_star(1.0).is_err());
        assert!(c_star(0.0).is_err());
    }

    #[test]
    fn c_star_increasing() {
        let grid: Vec<f64> = (0..5).map(|i| 0.5 + 0.1 * i as f64).chain([0.95, 0.99, 0.999]).collect();
        let vals: Vec<f64> = grid.iter().map(|&a| c_star(a).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn var_examples() {
        assert_eq!(gaussian_var(0.0, 1.0, 0.5).unwrap(), 0.0);
        let v = gaussian_var(2.0, 3.0, 0.95).unwrap();
        assert!((v - (2.0 + 3.0 * 1.644_853_626_951_472_2)).abs() < 1e-8);
        assert!((v - 6.9346).abs() < 1e-4);
        assert!(gaussian_var(0.0, 0.0, 0.9).is_err());
    }

    #[test]
    fn var_matches_empirical_quantile() {
        let mut rng = RngStream::new(5);
        let n = 1_000_000;
        let mut xs: Vec<f64> = (0..n).map(|_| sample_gaussian(&mut rng, 0.5, 2.0).unwrap()).collect();
        xs.sort_by(f64::total_cmp);
        let emp = xs[(0.9 * n as f64) as usize];
        assert!((emp - gaussian_var(0.5, 2.0, 0.9).unwrap()).abs() < 0.01);
    }

    #[test]
    fn cvar_examples() {
        let cs = c_star(0.95).unwrap();
        assert!((gaussian_cvar(0.0, 0.7, 0.95).unwrap() - 0.7 * cs).abs() < 1e-12);
        assert!((gaussian_cvar(0.1, 0.045f64.sqrt(), 0.95).unwrap() - 2.3376).abs() < 1e-4);
        let arm2 = gaussian_cvar(0.2, 0.144f64.sqrt(), 0.95).unwrap();
        assert!((arm2 - 4.5827).abs() < 1e-4);
        assert!(arm2 <= 4.6);
    }

    #[test]
    fn cvar_positive_homogeneity_in_sigma() {
        for &(mu, sigma, k, a) in &[(0.3, 0.5, 2.0, 0.95), (-1.0, 2.0, 0.25, 0.9), (0.0, 1.0, 7.0, 0.99)] {
            let lhs = gaussian_cvar(mu, k * sigma, a).unwrap() - gaussian_cvar(mu, sigma, a).unwrap();
            let rhs = (k - 1.0) * sigma * c_star(a).unwrap();
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn empirical_examples() {
        let xs: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(empirical_cvar(&xs, 0.8).unwrap(), 9.5);
        assert_eq!(empirical_cvar(&xs, 0.95).unwrap(), 10.0);
        assert!(empirical_cvar(&[], 0.9).is_err());
    }

    #[test]
    fn empirical_on_normal_draws() {
        let mut rng = RngStream::new(17);
        let xs: Vec<f64> = (0..1_000_000).map(|_| sample_gaussian(&mut rng, 0.0, 1.0).unwrap()).collect();
        assert!((empirical_cvar(&xs, 0.95).unwrap() - 2.0627).abs() < 0.01);
    }

    #[test]
    fn mc_oracle_examples() {
        let mut rng = RngStream::new(1);
        let n = 1_000_000;
        assert!((mc_cvar_oracle(&mut rng, 0.0, 1.0, 0.95, n).unwrap() - 2.0627).abs() < 0.01);
        assert!((mc_cvar_oracle(&mut rng, 1.0, 1.0, 0.95, n).unwrap() - 3.0627).abs() < 0.01);
        assert!((mc_cvar_oracle(&mut rng, 0.0, 2.0, 0.95, n).unwrap() - 4.1254).abs() < 0.02);
        assert!(mc_cvar_oracle(&mut rng, 0.0, 1.0, 0.95, 999).is_err());
    }

    #[test]
    fn mc_oracle_within_four_standard_errors() {
        // Asymptotic variance of the expected-shortfall estimator:
        // [Var(Z | Z >= q) + α (c* − q)²] / ((1 − α) n)
        let n = 1_000_000;
        for &a in &[0.9, 0.95] {
            let mut rng = RngStream::new(1234);
            let est = mc_cvar_oracle(&mut rng, 0.0, 1.0, a, n).unwrap();
            let q = std_normal_quantile(a).unwrap();
            let cs = c_star(a).unwrap();
            let tail_var = 1.0 + q * cs - cs * cs;
            let se = ((tail_var + a * (cs - q).powi(2)) / ((1.0 - a) * n as f64)).sqrt();
            assert!((est - cs).abs() <= 4.0 * se, "alpha {a}: {est} vs {cs} (se {se})");
        }
    }

    #[test]
    fn risk_params_validation() {
        assert!(RiskParams::new(0.95, 4.6).is_ok());
        assert!(RiskParams::new(0.4, 1.0).is_err());
        assert!(RiskParams::new(1.0, 1.0).is_err());
        assert!(RiskParams::new(0.9, f64::NAN).is_err());
    }
}
