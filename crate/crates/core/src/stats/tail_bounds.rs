//! Closed-form tail bounds for the Gaussian, Gamma and chi-square laws.

use super::special::{h_unchecked, ln_gamma, sqrt_2_over_pi};
use crate::error::{Error, Result};

/// Abramowitz–Stegun lower bound on `P(X >= mu + x)` for `X ~ N(mu, 1/s)`.
pub fn gaussian_tail_lower_bound(s: u64, x: f64) -> Result<f64> {
    if s == 0 {
        return Err(Error::domain("gaussian_tail_lower_bound", "s must be at least 1"));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain(
            "gaussian_tail_lower_bound",
            format!("x = {x} must be finite and non-negative"),
        ));
    }
    let s = s as f64;
    let num = sqrt_2_over_pi() * (-0.5 * s * x * x).exp();
    Ok(num / (s.sqrt() * x + (s * x * x + 4.0).sqrt()))
}

/// Harremoës upper bound on `P(X >= x)` for `X ~ Gamma(shape, rate)`,
/// valid for `shape >= 2` and `x > shape / rate`.
pub fn gamma_tail_upper_bound(shape: f64, rate: f64, x: f64) -> Result<f64> {
    if !(shape >= 2.0) || !shape.is_finite() {
        return Err(Error::domain("gamma_tail_upper_bound", format!("shape = {shape} must be >= 2")));
    }
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::domain("gamma_tail_upper_bound", format!("rate = {rate} must be positive")));
    }
    if !(x > shape / rate) {
        return Err(Error::domain(
            "gamma_tail_upper_bound",
            format!("x = {x} must exceed the mean {}", shape / rate),
        ));
    }
    Ok((-2.0 * shape * h_unchecked(rate * x / shape)).exp())
}

/// Lower bound on the Gamma complementary CDF,
/// `exp(-rate x) (1 + rate x)^(shape - 1) / Γ(shape)`.
///
/// Accepted for `shape == 1` (where it is exact) and `shape >= 2`. For shapes
/// strictly between 1 and 2 it fails everywhere: at `x = 0` it equals
/// `1 / Γ(shape) > 1`.
pub fn gamma_ccdf_lower_bound(shape: f64, rate: f64, x: f64) -> Result<f64> {
    if !(shape == 1.0 || shape >= 2.0) || !shape.is_finite() {
        return Err(Error::domain(
            "gamma_ccdf_lower_bound",
            format!("shape = {shape} must be 1 or at least 2"),
        ));
    }
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::domain("gamma_ccdf_lower_bound", format!("rate = {rate} must be positive")));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain("gamma_ccdf_lower_bound", format!("x = {x} must be non-negative")));
    }
    let bx = rate * x;
    // log-space keeps large shapes from overflowing Γ.
    Ok((-bx + (shape - 1.0) * bx.ln_1p() - ln_gamma(shape)).exp())
}

/// Laurent–Massart bound `P(X <= x) <= exp(-(k - x)^2 / (4k))` for `X ~ χ²_k`,
/// `0 <= x <= k`.
pub fn chisq_lower_tail_bound(dof: u64, x: f64) -> Result<f64> {
    if dof == 0 {
        return Err(Error::domain("chisq_lower_tail_bound", "dof must be at least 1"));
    }
    let k = dof as f64;
    if !(0.0..=k).contains(&x) {
        return Err(Error::domain(
            "chisq_lower_tail_bound",
            format!("x = {x} is outside [0, {k}]"),
        ));
    }
    Ok((-(k - x).powi(2) / (4.0 * k)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::special::std_normal_cdf;

    #[test]
    fn gaussian_examples() {
        let v = gaussian_tail_lower_bound(1, 0.0).unwrap();
        assert!((v - sqrt_2_over_pi() / 2.0).abs() < 1e-15);
        let v = gaussian_tail_lower_bound(1, 1.0).unwrap();
        // sqrt(2/pi) e^{-1/2} / (1 + sqrt 5)
        assert!((v - 0.149_546_132).abs() < 1e-9, "{v}");
        assert!(v <= 1.0 - std_normal_cdf(1.0).unwrap());
        assert!(gaussian_tail_lower_bound(4, 0.5).unwrap() <= 1.0 - std_normal_cdf(1.0).unwrap());
        assert!(gaussian_tail_lower_bound(0, 1.0).is_err());
        assert!(gaussian_tail_lower_bound(1, -0.1).is_err());
    }

    #[test]
    fn gaussian_bound_below_exact_tail_on_grid() {
        for s in 1..=40u64 {
            for j in 0..25 {
                let x = j as f64 * 0.12;
                let bound = gaussian_tail_lower_bound(s, x).unwrap();
                let exact = 1.0 - std_normal_cdf(x * (s as f64).sqrt()).unwrap();
                assert!(bound <= exact + 1e-16, "s={s} x={x}: {bound} > {exact}");
            }
        }
    }

    #[test]
    fn gamma_upper_examples() {
        let v = gamma_tail_upper_bound(2.0, 1.0, 2.0 + 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
        let v = gamma_tail_upper_bound(2.0, 1.0, 6.0).unwrap();
        assert!((v - 9.0 * (-4.0f64).exp()).abs() < 1e-12, "{v}");
        let v = gamma_tail_upper_bound(4.0, 2.0, 4.0).unwrap();
        assert!((v - (-4.0 * (1.0 - 2f64.ln())).exp()).abs() < 1e-12);
        assert!((v - 0.2932).abs() < 1e-3);
        assert!(gamma_tail_upper_bound(2.0, 1.0, 2.0).is_err());
        assert!(gamma_tail_upper_bound(1.5, 1.0, 5.0).is_err());
    }

    #[test]
    fn gamma_ccdf_examples() {
        assert!((gamma_ccdf_lower_bound(1.0, 1.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((gamma_ccdf_lower_bound(1.0, 1.0, 2.0).unwrap() - (-2.0f64).exp()).abs() < 1e-15);
        let v = gamma_ccdf_lower_bound(3.0, 1.0, 2.0).unwrap();
        assert!((v - 4.5 * (-2.0f64).exp()).abs() < 1e-14);
        // exact: e^{-2}(1 + 2 + 2)
        assert!(v <= 5.0 * (-2.0f64).exp());
        assert!(gamma_ccdf_lower_bound(0.5, 1.0, 1.0).is_err());
        // Γ(1.5) < 1 would put the bound above 1 at x = 0.
        assert!(gamma_ccdf_lower_bound(1.5, 1.0, 0.0).is_err());
        assert!(gamma_ccdf_lower_bound(1.999, 1.0, 1.0).is_err());
    }

    #[test]
    fn gamma_ccdf_below_exact_tail() {
        use statrs::function::gamma::gamma_ur;
        for shape in [1.0f64, 2.0, 2.5, 3.0, 4.5, 10.0, 40.0] {
            for j in 0..200 {
                let x = j as f64 * 0.1 * shape.sqrt();
                let bound = gamma_ccdf_lower_bound(shape, 1.0, x).unwrap();
                let exact = if x == 0.0 { 1.0 } else { gamma_ur(shape, x) };
                assert!(bound <= exact * (1.0 + 1e-9) + 1e-300, "shape {shape} x {x}: {bound} > {exact}");
            }
        }
    }

    #[test]
    fn chisq_examples() {
        assert_eq!(chisq_lower_tail_bound(7, 7.0).unwrap(), 1.0);
        assert!((chisq_lower_tail_bound(4, 0.0).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert!((chisq_lower_tail_bound(9, 3.0).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert!(chisq_lower_tail_bound(4, 4.5).is_err());
        assert!(chisq_lower_tail_bound(4, -0.5).is_err());
        assert!(chisq_lower_tail_bound(0, 0.0).is_err());
    }
}
