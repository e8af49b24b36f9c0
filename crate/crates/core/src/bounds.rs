//! Closed-form regret-bound constants.
//!
//! For an arm with standard deviation `σ`, gap `Δ` and `c* = c*_α`:
//!
//! * `A(ξ) = 2α² / (ξ² (1−α)² Δ²)`
//! * `B(ξ) = 1 / h(σ² c*² / (σ c* − (1−ξ) Δ)²)`
//! * `C(ξ) = max(A, B)`
//!
//! The risk constants use the risk gap of an infeasible instance. The
//! infeasibility constants `D, E, F` are the same expressions with the
//! threshold gap of a feasible instance. At `ξ = 1` the argument of `h` is
//! exactly 1 and `B = +∞`. When `σ c* <= (1−ξ) Δ` the deviation event that
//! `B` controls is empty and `B = 0` is reported.
//!
//! Non-finite values are written to JSON as the strings `"inf"`, `"-inf"`
//! and `"nan"`.

use serde::{Serialize, Serializer};

use crate::cvar::c_star;
use crate::error::{Error, Result};
use crate::instance::{ArmClass, Instance};
use crate::stats::{h, h_plus_inverse};

/// The three constants of one upper bound: `(A, B, C)` or `(D, E, F)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundConstants {
    pub first: f64,
    pub second: f64,
    pub max: f64,
}

fn check_xi(func: &'static str, xi: f64) -> Result<()> {
    if !(xi > 0.0 && xi <= 1.0) {
        return Err(Error::domain(func, format!("xi = {xi} is outside (0, 1]")));
    }
    Ok(())
}

fn constants(alpha: f64, sigma: f64, gap: f64, xi: f64) -> Result<BoundConstants> {
    let beta = 1.0 - alpha;
    let first = 2.0 * alpha * alpha / (xi * xi * beta * beta * gap * gap);
    let sc = sigma * c_star(alpha)?;
    let denom = sc - (1.0 - xi) * gap;
    let second = if xi == 1.0 {
        f64::INFINITY
    } else if denom <= 0.0 {
        0.0
    } else {
        let hv = h(sc * sc / (denom * denom))?;
        if hv == 0.0 {
            f64::INFINITY
        } else {
            1.0 / hv
        }
    };
    Ok(BoundConstants { first, second, max: first.max(second) })
}

fn xi_alpha(alpha: f64, sigma: f64, gap: f64) -> Result<f64> {
    let a1 = constants(alpha, sigma, gap, 1.0)?.first;
    let y = h_plus_inverse(1.0 / a1)?;
    Ok(1.0 - sigma * c_star(alpha)? / gap * (1.0 - 1.0 / y.sqrt()))
}

fn risk_gap(instance: &Instance, arm: usize) -> Result<(f64, f64)> {
    let g = instance
        .gaps()
        .get(arm)
        .copied()
        .ok_or_else(|| Error::Usage(format!("arm {arm} out of range")))?;
    Ok((instance.arms()[arm].sigma, g.risk()?))
}

fn inf_gap(instance: &Instance, arm: usize) -> Result<(f64, f64)> {
    let g = instance
        .gaps()
        .get(arm)
        .copied()
        .ok_or_else(|| Error::Usage(format!("arm {arm} out of range")))?;
    Ok((instance.arms()[arm].sigma, g.infeasibility()?))
}

/// `(A, B, C)` for a non-optimal arm of an infeasible instance.
pub fn risk_bound_constants(instance: &Instance, xi: f64, arm: usize) -> Result<BoundConstants> {
    check_xi("risk_bound_constants", xi)?;
    let (sigma, gap) = risk_gap(instance, arm)?;
    constants(instance.alpha(), sigma, gap, xi)
}

/// `ξ_α = 1 − (σ c*/Δ)(1 − 1/√(h₊⁻¹(1/A(1))))`, which makes `B(ξ_α) = A(1)`.
pub fn xi_alpha_risk(instance: &Instance, arm: usize) -> Result<f64> {
    let (sigma, gap) = risk_gap(instance, arm)?;
    xi_alpha(instance.alpha(), sigma, gap)
}

/// `(D, E, F)` for an arm over the threshold in a feasible instance.
pub fn infeasibility_bound_constants(instance: &Instance, xi: f64, arm: usize) -> Result<BoundConstants> {
    check_xi("infeasibility_bound_constants", xi)?;
    let (sigma, gap) = inf_gap(instance, arm)?;
    constants(instance.alpha(), sigma, gap, xi)
}

pub fn xi_alpha_inf(instance: &Instance, arm: usize) -> Result<f64> {
    let (sigma, gap) = inf_gap(instance, arm)?;
    xi_alpha(instance.alpha(), sigma, gap)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SuboptimalityBound {
    /// Coefficient of `ln n` in the expected pull count: `2/Δ²`.
    pub pull_coefficient: f64,
    /// Coefficient of `ln n` in the regret: `2/Δ`.
    pub regret_coefficient: f64,
}

pub fn suboptimality_bound(instance: &Instance, arm: usize) -> Result<SuboptimalityBound> {
    let g = instance
        .gaps()
        .get(arm)
        .copied()
        .ok_or_else(|| Error::Usage(format!("arm {arm} out of range")))?;
    let d = g.suboptimality()?;
    Ok(SuboptimalityBound { pull_coefficient: 2.0 / (d * d), regret_coefficient: 2.0 / d })
}

pub fn kl_gaussian(mu1: f64, sigma1: f64, mu2: f64, sigma2: f64) -> Result<f64> {
    if !(sigma1 > 0.0 && sigma2 > 0.0 && sigma1.is_finite() && sigma2.is_finite()) {
        return Err(Error::domain("kl_gaussian", format!("sigmas must be positive, got {sigma1}, {sigma2}")));
    }
    let d = mu1 - mu2;
    let v = (sigma2 / sigma1).ln() + (sigma1 * sigma1 + d * d) / (2.0 * sigma2 * sigma2) - 0.5;
    Ok(v.max(0.0))
}

/// Lower-bound coefficients of one arm; absent where the arm's class has none.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct LowerBound {
    /// `ξ² σ² A`, multiplying `Δ_r ln n` in the risk regret.
    #[serde(serialize_with = "ser_opt")]
    pub risk: Option<f64>,
    /// `ξ² σ² D`, multiplying `Δ_τ ln n` in the infeasibility regret.
    #[serde(serialize_with = "ser_opt")]
    pub infeasibility: Option<f64>,
    /// `2/Δ`, multiplying `ln n` in the suboptimality regret.
    #[serde(serialize_with = "ser_opt")]
    pub suboptimality: Option<f64>,
}

pub fn lower_bounds(instance: &Instance, xi: f64) -> Result<Vec<LowerBound>> {
    check_xi("lower_bounds", xi)?;
    let gaps = instance.gaps();
    gaps.iter()
        .zip(instance.arms())
        .map(|(g, a)| {
            let s2 = a.sigma * a.sigma;
            let mut lb = LowerBound::default();
            if let Some(d) = g.risk {
                lb.risk = Some(xi * xi * s2 * constants(instance.alpha(), a.sigma, d, xi)?.first);
            }
            if let Some(d) = g.inf {
                lb.infeasibility = Some(xi * xi * s2 * constants(instance.alpha(), a.sigma, d, xi)?.first);
            }
            if let Some(d) = g.sub {
                lb.suboptimality = Some(2.0 / d);
            }
            Ok(lb)
        })
        .collect()
}

/// Parameters of the competing algorithms' published pull bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Table1Params {
    pub gamma: f64,
    pub u: f64,
    pub d_big: f64,
    /// `d`; when absent, `1/(8σ²)` with the arm's own σ.
    pub d_small: Option<f64>,
    /// The constant inside CVaR-LCB's `ln(C n)`.
    pub c_lcb: f64,
    pub n: u64,
}

impl Default for Table1Params {
    fn default() -> Self {
        Self { gamma: 3.0, u: 1.0, d_big: 3.0, d_small: None, c_lcb: 1.0, n: 1000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Table1Conditions {
    pub cvar_lcb: bool,
    pub cvar_ucb_1: bool,
    pub cvar_ucb_2: bool,
    pub rc_lcb: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Table1Row {
    pub gap: f64,
    pub cvar_lcb: f64,
    pub cvar_ucb_1: f64,
    pub cvar_ucb_2: f64,
    pub rc_lcb: f64,
    /// Whether CVaR-TS's leading constant is no larger than each competitor's.
    pub conditions: Table1Conditions,
}

/// Pull bounds of CVaR-LCB, CVaR-UCB-1, CVaR-UCB-2 and RC-LCB for one arm.
///
/// The gap is the arm's risk gap, else its threshold gap, else its mean gap.
pub fn table1_baselines(instance: &Instance, arm: usize, p: &Table1Params) -> Result<Table1Row> {
    let g = instance
        .gaps()
        .get(arm)
        .copied()
        .ok_or_else(|| Error::Usage(format!("arm {arm} out of range")))?;
    let gap = g
        .risk
        .or(g.inf)
        .or(g.sub)
        .ok_or_else(|| Error::Usage(format!("arm {arm} is optimal and has no gap")))?;
    if p.n < 2 {
        return Err(Error::domain("table1_baselines", format!("n = {} must be at least 2", p.n)));
    }
    let alpha = instance.alpha();
    let beta = 1.0 - alpha;
    if !(p.gamma > 2.0) || (p.gamma - 20.0 * beta) == 0.0 {
        return Err(Error::domain(
            "table1_baselines",
            format!("gamma = {} must exceed 2 and differ from 20(1 - alpha)", p.gamma),
        ));
    }
    let sigma = instance.arms()[arm].sigma;
    let d = p.d_small.unwrap_or(1.0 / (8.0 * sigma * sigma));
    for (name, v) in [("u", p.u), ("d_big", p.d_big), ("d_small", d), ("c_lcb", p.c_lcb)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::domain("table1_baselines", format!("{name} = {v} must be positive")));
        }
    }
    let n = p.n as f64;
    let k = instance.num_arms() as f64;
    let bd2 = beta * beta * gap * gap;
    let pi2 = std::f64::consts::PI.powi(2);
    let a2 = alpha * alpha;
    Ok(Table1Row {
        gap,
        cvar_lcb: 16.0 * (p.c_lcb * n).ln() / bd2 + k * (1.0 + pi2 / 3.0),
        cvar_ucb_1: 2.0 * p.gamma * n.ln() / bd2
            + p.gamma / 2.0 * (1.0 / (p.gamma - 2.0) + 3.0 / (p.gamma - 20.0 * beta)),
        cvar_ucb_2: 4.0 * p.u * p.u * (std::f64::consts::SQRT_2 * n).ln() / bd2 + 3.0,
        rc_lcb: 4.0 * (2.0 * p.d_big * n * n).ln() / (bd2 * d) + k + 2.0,
        conditions: Table1Conditions {
            cvar_lcb: a2 <= 8.0,
            cvar_ucb_1: a2 <= p.gamma,
            cvar_ucb_2: a2 <= 2.0 * p.u * p.u,
            rc_lcb: a2 <= 4.0 / d,
        },
    })
}

/// Smallest `n` with `(1/(1−α)) √(ln(2 D n²) / (n d)) <= gap`: the horizon
/// after which a fully sampled arm's RC-LCB width drops below `gap`.
pub fn rc_lcb_flag_horizon(alpha: f64, d_big: f64, d_small: f64, gap: f64) -> Result<u64> {
    if !(gap > 0.0 && d_big > 0.0 && d_small > 0.0) {
        return Err(Error::domain("rc_lcb_flag_horizon", "gap, D and d must be positive"));
    }
    let beta = 1.0 - alpha;
    let ok = |n: u64| {
        let n = n as f64;
        ((2.0 * d_big * n * n).ln() / (n * d_small)).sqrt() / beta <= gap
    };
    // ln(2 D n²)/n decreases once n > e / √(2D); start the search past that.
    let mut lo = 1u64;
    let mut hi = 2u64;
    while !ok(hi) {
        lo = hi;
        hi = hi
            .checked_mul(2)
            .ok_or_else(|| Error::domain("rc_lcb_flag_horizon", "no horizon below 2^64"))?;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// How `ξ` is chosen for a report.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum XiChoice {
    Fixed(f64),
    /// Each arm uses its own `ξ_α`.
    Auto,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArmBounds {
    pub arm: usize,
    pub class: ArmClass,
    #[serde(serialize_with = "ser_opt")]
    pub xi: Option<f64>,
    #[serde(serialize_with = "ser_opt")]
    pub xi_alpha: Option<f64>,
    /// False when `ξ_α` falls outside `(0, 1]`; the constants are then omitted.
    pub xi_alpha_in_range: bool,
    #[serde(rename = "A", serialize_with = "ser_opt")]
    pub a: Option<f64>,
    #[serde(rename = "B", serialize_with = "ser_opt")]
    pub b: Option<f64>,
    #[serde(rename = "C", serialize_with = "ser_opt")]
    pub c: Option<f64>,
    #[serde(rename = "D", serialize_with = "ser_opt")]
    pub d: Option<f64>,
    #[serde(rename = "E", serialize_with = "ser_opt")]
    pub e: Option<f64>,
    #[serde(rename = "F", serialize_with = "ser_opt")]
    pub f: Option<f64>,
    pub suboptimality: Option<SuboptimalityBound>,
    pub lower: LowerBound,
    /// Lower over upper leading constant for this arm's regret.
    #[serde(serialize_with = "ser_opt")]
    pub lower_upper_ratio: Option<f64>,
    pub table1: Option<Table1Row>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub alpha: f64,
    pub tau: f64,
    pub feasible: bool,
    pub c_star: f64,
    pub xi_mode: &'static str,
    pub table1_params: Table1Params,
    pub arms: Vec<ArmBounds>,
    /// Horizon after which RC-LCB's width on the least risky arm drops below
    /// that arm's distance to the threshold; only for infeasible instances.
    pub rc_lcb_flag_horizon: Option<u64>,
}

pub fn bound_report(instance: &Instance, xi: XiChoice, table1: &Table1Params) -> Result<BoundReport> {
    if let XiChoice::Fixed(v) = xi {
        check_xi("bound_report", v)?;
    }
    let cls = instance.classify();
    let gaps = cls.gaps(instance);
    let alpha = instance.alpha();
    let mut arms = Vec::new();
    for (i, g) in gaps.iter().enumerate() {
        if cls.classes[i] == ArmClass::Optimal {
            continue;
        }
        let sigma = instance.arms()[i].sigma;
        let mut row = ArmBounds {
            arm: i,
            class: cls.classes[i],
            xi: None,
            xi_alpha: None,
            xi_alpha_in_range: true,
            a: None,
            b: None,
            c: None,
            d: None,
            e: None,
            f: None,
            suboptimality: None,
            lower: LowerBound::default(),
            lower_upper_ratio: None,
            table1: Some(table1_baselines(instance, i, table1)?),
        };
        if let Some(sub) = g.sub {
            let s = suboptimality_bound(instance, i)?;
            row.suboptimality = Some(s);
            row.lower.suboptimality = Some(2.0 / sub);
            row.lower_upper_ratio = Some((2.0 / sub) / s.regret_coefficient);
        }
        if let Some(gap) = g.risk.or(g.inf) {
            let xa = xi_alpha(alpha, sigma, gap)?;
            row.xi_alpha = Some(xa);
            row.xi_alpha_in_range = xa > 0.0 && xa <= 1.0;
            let used = match xi {
                XiChoice::Fixed(v) => Some(v),
                XiChoice::Auto if row.xi_alpha_in_range => Some(xa),
                XiChoice::Auto => None,
            };
            row.xi = used;
            if let Some(x) = used {
                let k = constants(alpha, sigma, gap, x)?;
                let lower = x * x * sigma * sigma * k.first;
                if g.risk.is_some() {
                    (row.a, row.b, row.c) = (Some(k.first), Some(k.second), Some(k.max));
                    row.lower.risk = Some(lower);
                } else {
                    (row.d, row.e, row.f) = (Some(k.first), Some(k.second), Some(k.max));
                    row.lower.infeasibility = Some(lower);
                }
                row.lower_upper_ratio = Some(lower / k.max);
            }
        }
        arms.push(row);
    }
    let rc_lcb_flag_horizon = if cls.feasible {
        None
    } else {
        let best = cls.representative;
        let s = instance.arms()[best].sigma;
        let d = table1.d_small.unwrap_or(1.0 / (8.0 * s * s));
        Some(rc_lcb_flag_horizon(alpha, table1.d_big, d, cls.cvars[best] - instance.tau())?)
    };
    Ok(BoundReport {
        alpha,
        tau: instance.tau(),
        feasible: cls.feasible,
        c_star: c_star(alpha)?,
        xi_mode: match xi {
            XiChoice::Fixed(_) => "fixed",
            XiChoice::Auto => "auto",
        },
        table1_params: *table1,
        arms,
        rc_lcb_flag_horizon,
    })
}

fn ser_opt<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        None => s.serialize_none(),
        Some(x) if x.is_finite() => s.serialize_f64(*x),
        Some(x) if x.is_nan() => s.serialize_str("nan"),
        Some(x) if *x > 0.0 => s.serialize_str("inf"),
        Some(_) => s.serialize_str("-inf"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::Preset;
    use proptest::prelude::*;

    fn infeasible() -> Instance {
        Preset::InfeasibleHighVar.instance()
    }

    fn feasible() -> Instance {
        Preset::FeasibleHighVar.instance()
    }

    #[test]
    fn risk_a_at_xi_one() {
        let k = risk_bound_constants(&infeasible(), 1.0, 1).unwrap();
        let gap = infeasible().gaps()[1].risk.unwrap();
        assert!((gap - 2.2451).abs() < 1e-3);
        // Hand arithmetic with the printed gap: 2·0.9025/(0.0025·2.2451²).
        assert!((k.first - 143.24).abs() < 0.1, "{}", k.first);
        assert_eq!(k.second, f64::INFINITY);
        assert_eq!(k.max, f64::INFINITY);
    }

    #[test]
    fn infeasibility_d_of_arm_three() {
        let k = infeasibility_bound_constants(&feasible(), 1.0, 2).unwrap();
        let gap = feasible().gaps()[2].inf.unwrap();
        assert!((gap - 0.797).abs() < 1e-3);
        assert!((k.first - 1136.6).abs() < 2.0, "{}", k.first);
        assert_eq!(k.second, f64::INFINITY);
    }

    #[test]
    fn xi_outside_range_rejected() {
        assert!(risk_bound_constants(&infeasible(), 0.0, 1).is_err());
        assert!(risk_bound_constants(&infeasible(), 1.5, 1).is_err());
        assert!(lower_bounds(&infeasible(), -0.1).is_err());
    }

    #[test]
    fn wrong_arm_class_is_usage_error() {
        assert!(matches!(risk_bound_constants(&feasible(), 0.5, 1), Err(Error::Usage(_))));
        assert!(matches!(infeasibility_bound_constants(&feasible(), 0.5, 0), Err(Error::Usage(_))));
        assert!(matches!(suboptimality_bound(&feasible(), 2), Err(Error::Usage(_))));
    }

    #[test]
    fn xi_alpha_identity_risk() {
        let inst = infeasible();
        for arm in 1..15 {
            let xa = xi_alpha_risk(&inst, arm).unwrap();
            let at = risk_bound_constants(&inst, xa, arm).unwrap();
            let a1 = risk_bound_constants(&inst, 1.0, arm).unwrap().first;
            assert!((at.second - a1).abs() <= 1e-9 * a1, "arm {arm}: {} vs {a1}", at.second);
            assert!(at.second <= at.first);
        }
    }

    #[test]
    fn xi_alpha_identity_infeasibility() {
        let inst = feasible();
        let cls = inst.classify();
        for arm in (0..15).filter(|&i| !cls.is_feasible_arm(i)) {
            let xa = xi_alpha_inf(&inst, arm).unwrap();
            let at = infeasibility_bound_constants(&inst, xa, arm).unwrap();
            let d1 = infeasibility_bound_constants(&inst, 1.0, arm).unwrap().first;
            assert!((at.second - d1).abs() <= 1e-9 * d1);
            assert!(at.second <= at.first);
        }
    }

    #[test]
    fn xi_alpha_approaches_one() {
        // At τ = 0.5 the instance stays infeasible across the whole α grid.
        let inst = infeasible().with_tau(0.5).unwrap();
        let xs: Vec<f64> = [0.9, 0.99, 0.999]
            .iter()
            .map(|&a| xi_alpha_risk(&inst.with_alpha(a).unwrap(), 1).unwrap())
            .collect();
        assert!(xs[0] < xs[1] && xs[1] < xs[2] && xs[2] < 1.0, "{xs:?}");

        let at = |a: f64| xi_alpha_risk(&infeasible().with_alpha(a).unwrap(), 1).unwrap();
        assert!(at(0.999) >= 0.99 * at(0.99));

        // A huge gap drives the subtracted term to zero.
        let far = Instance::from_moments(&[0.0, 1e6], &[1.0, 1.0], 0.95, -10.0, 1.0).unwrap();
        assert!((xi_alpha_risk(&far, 1).unwrap() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn empty_deviation_event_gives_zero() {
        // σc* = 2.0627 and (1 − ξ)Δ = 0.9·100, so the denominator is negative.
        let inst = Instance::from_moments(&[0.0, 100.0], &[1.0, 1.0], 0.95, -10.0, 1.0).unwrap();
        let k = risk_bound_constants(&inst, 0.1, 1).unwrap();
        assert_eq!(k.second, 0.0);
        assert_eq!(k.max, k.first);
    }

    #[test]
    fn suboptimality_coefficients() {
        let s = suboptimality_bound(&feasible(), 1).unwrap();
        assert!((s.pull_coefficient - 200.0).abs() < 1e-9);
        assert!((s.regret_coefficient - 20.0).abs() < 1e-10);
        let lb = lower_bounds(&feasible(), 0.5).unwrap();
        assert_eq!(lb[1].suboptimality, Some(s.regret_coefficient));
        let doubled = Instance::from_moments(&[0.1, 0.3], &[0.045, 0.144], 0.95, 10.0, 1.0).unwrap();
        let s2 = suboptimality_bound(&doubled, 1).unwrap();
        assert!((s2.regret_coefficient - s.regret_coefficient / 2.0).abs() < 1e-9);
    }

    #[test]
    fn xi_cancels_in_risk_lower_bound() {
        let inst = infeasible();
        let alpha = 0.95f64;
        for xi in [0.2, 0.5, 0.9, 1.0] {
            let lb = lower_bounds(&inst, xi).unwrap();
            for (i, l) in lb.iter().enumerate().skip(1) {
                let s2 = inst.arms()[i].sigma.powi(2);
                let d = inst.gaps()[i].risk.unwrap();
                let closed = 2.0 * alpha * alpha * s2 / ((1.0 - alpha).powi(2) * d * d);
                assert!((l.risk.unwrap() - closed).abs() <= 1e-9 * closed);
            }
        }
    }

    #[test]
    fn kl_examples() {
        assert_eq!(kl_gaussian(0.3, 1.2, 0.3, 1.2).unwrap(), 0.0);
        assert!((kl_gaussian(0.0, 1.0, 1.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
        let expect = 2f64.ln() + 0.125 - 0.5;
        assert!((kl_gaussian(0.0, 1.0, 0.0, 2.0).unwrap() - expect).abs() < 1e-15);
        assert!((expect - 0.31815).abs() < 1e-5);
        assert!(kl_gaussian(0.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn kl_of_shifted_alternative() {
        let inst = infeasible();
        for xi in [0.3, 0.7, 1.0] {
            for arm in 1..15 {
                let sigma = inst.arms()[arm].sigma;
                let mu = inst.arms()[arm].mu;
                let a = risk_bound_constants(&inst, xi, arm).unwrap().first;
                let shifted = mu - (2.0 / a).sqrt() / xi;
                let kl = kl_gaussian(mu, sigma, shifted, sigma).unwrap();
                let target = 1.0 / (xi * xi * sigma * sigma * a);
                assert!((kl - target).abs() <= 1e-12 * target.max(1e-300));
            }
        }
    }

    #[test]
    fn table1_rc_lcb_row() {
        let inst = infeasible();
        let p = Table1Params { d_small: Some(1.0 / (8.0 * 0.045)), ..Default::default() };
        let row = table1_baselines(&inst, 1, &p).unwrap();
        // Independent evaluation of the same expression with the terms spelled out.
        let gap = inst.gaps()[1].risk.unwrap();
        let numer = 4.0 * (6.0e6f64).ln();
        let denom = 0.05f64 * 0.05 * (gap * gap) * (1.0 / 0.36);
        let expect = numer / denom + 15.0 + 2.0;
        assert!((row.rc_lcb - expect).abs() <= 1e-12 * expect, "{} vs {expect}", row.rc_lcb);
        // With the printed gap the expression is about 1800.4.
        assert!((row.rc_lcb - 1800.398).abs() < 1e-2, "{}", row.rc_lcb);
    }

    #[test]
    fn table1_conditions() {
        let inst = infeasible();
        let row = table1_baselines(&inst, 3, &Table1Params::default()).unwrap();
        assert!(row.conditions.cvar_lcb);
        for s2 in [0.01, 0.02, 0.03, 0.05] {
            let p = Table1Params { d_small: Some(1.0 / (8.0 * s2)), ..Default::default() };
            let r = table1_baselines(&inst, 3, &p).unwrap();
            assert_eq!(r.conditions.rc_lcb, s2 >= 0.95f64 * 0.95 / 32.0);
        }
        let bad = Table1Params { gamma: 2.0, ..Default::default() };
        assert!(table1_baselines(&inst, 3, &bad).is_err());
        assert!(table1_baselines(&inst, 0, &Table1Params::default()).is_err());
    }

    #[test]
    fn flag_horizon_is_minimal() {
        let (alpha, big, small, gap) = (0.95, 3.0, 1.0 / (8.0 * 0.045), 0.3376);
        let n = rc_lcb_flag_horizon(alpha, big, small, gap).unwrap();
        let w = |n: u64| ((2.0 * big * (n * n) as f64).ln() / (n as f64 * small)).sqrt() / 0.05;
        assert!(w(n) <= gap && w(n - 1) > gap);
    }

    #[test]
    fn report_shapes() {
        let r = bound_report(&infeasible(), XiChoice::Auto, &Table1Params::default()).unwrap();
        assert_eq!(r.arms.len(), 14);
        assert!(r.arms.iter().all(|a| a.a.is_some() && a.d.is_none()));
        assert!(r.rc_lcb_flag_horizon.is_some());
        let json = serde_json::to_value(&r).unwrap();
        assert!(json["arms"][0].get("A").is_some());

        let r = bound_report(&feasible(), XiChoice::Fixed(1.0), &Table1Params::default()).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        let infeasible_arm = r.arms.iter().position(|a| a.d.is_some()).unwrap();
        assert_eq!(json["arms"][infeasible_arm]["E"], "inf");
        assert!(bound_report(&feasible(), XiChoice::Fixed(0.0), &Table1Params::default()).is_err());
    }

    #[test]
    fn c_and_f_are_maxima_on_grid() {
        for base in [infeasible(), feasible()] {
            for alpha in [0.8, 0.9, 0.95, 0.99] {
                let inst = base.with_alpha(alpha).unwrap();
                let gaps = inst.gaps();
                for (arm, g) in gaps.iter().enumerate() {
                    for xi in [0.1, 0.5, 0.9, 1.0] {
                        let k = if g.risk.is_some() {
                            risk_bound_constants(&inst, xi, arm).unwrap()
                        } else if g.inf.is_some() {
                            infeasibility_bound_constants(&inst, xi, arm).unwrap()
                        } else {
                            continue;
                        };
                        assert_eq!(k.max, k.first.max(k.second));
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn kl_nonnegative(m1 in -10.0f64..10.0, s1 in 0.01f64..10.0, m2 in -10.0f64..10.0, s2 in 0.01f64..10.0) {
            prop_assert!(kl_gaussian(m1, s1, m2, s2).unwrap() >= 0.0);
        }
    }
}
