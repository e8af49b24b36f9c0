//! Normal CDF and quantile, and the rate function `h` with its upper inverse.

use std::f64::consts::{PI, SQRT_2};


use crate::error::{Error, Result};

const SQRT_2PI: f64 = 2.506_628_274_631_000_2;

/// Standard normal CDF, `0.5 * erfc(-x / sqrt(2))`.
pub fn std_normal_cdf(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain("std_normal_cdf", format!("x = {x} is not finite")));
    }
    Ok(phi(x))
}

#[inline]
pub(crate) fn phi(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

#[inline]
pub(crate) fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

// Acklam's rational approximation to the inverse normal CDF (relative error ~1.2e-9).
const A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const B: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const C: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_732_539_343_734,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const D: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996,
    3.754_408_661_907_416,
];
const P_LOW: f64 = 0.02425;

fn acklam_lower_half(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p <= 0.5);
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// Inverse of the standard normal CDF.
///
/// Rational approximation followed by one Newton step against [`std_normal_cdf`].
/// The upper half is evaluated through `-quantile(1 - p)` so that the Newton
/// residual is always formed in the accurate lower tail.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(
            "std_normal_quantile",
            format!("p = {p} is outside (0, 1)"),
        ));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    let (lower, sign) = if p < 0.5 { (p, 1.0) } else { (1.0 - p, -1.0) };
    let mut x = acklam_lower_half(lower);
    let density = std_normal_pdf(x);
    if density > 0.0 {
        x -= (phi(x) - lower) / density;
    }
    Ok(sign * x)
}

/// `h(x) = (x - 1 - ln x) / 2`, the Gamma/chi-square rate function.
pub fn h(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain("h", format!("x = {x} must be positive")));
    }
    Ok(h_unchecked(x))
}

#[inline]
pub(crate) fn h_unchecked(x: f64) -> f64 {
    if x.is_infinite() {
        return f64::INFINITY;
    }
    // ln_1p keeps the cancellation near x = 1 under control.
    let e = x - 1.0;
    0.5 * (e - e.ln_1p())
}

const H_INV_MAX_ITERS: usize = 200;

/// Largest root of `h(x) = y`, i.e. the inverse of `h` on `[1, inf)`.
pub fn h_plus_inverse(y: f64) -> Result<f64> {
    if !(y >= 0.0) || !y.is_finite() {
        return Err(Error::domain(
            "h_plus_inverse",
            format!("y = {y} must be finite and non-negative"),
        ));
    }
    if y == 0.0 {
        return Ok(1.0);
    }
    let mut lo = 1.0_f64;
    let mut hi = 2.0_f64;
    while h_unchecked(hi) < y {
        lo = hi;
        hi *= 2.0;
    }
    // Runs until the bracket collapses to adjacent floats.
    for _ in 0..H_INV_MAX_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let hm = h_unchecked(mid);
        if hm < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Pick whichever bracket end is closer in h.
    if (h_unchecked(lo) - y).abs() <= (h_unchecked(hi) - y).abs() {
        Ok(lo)
    } else {
        Ok(hi)
    }
}

/// Function object bundling `h` and its increasing-branch inverse.
#[derive(Clone, Copy, Debug, Default)]
pub struct HFunction;

impl HFunction {
    pub fn eval(&self, x: f64) -> Result<f64> {
        h(x)
    }

    pub fn upper_inverse(&self, y: f64) -> Result<f64> {
        h_plus_inverse(y)
    }
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `sqrt(2 / pi)`, used by the Gaussian tail bound.
pub(crate) fn sqrt_2_over_pi() -> f64 {
    (2.0 / PI).sqrt()
}
