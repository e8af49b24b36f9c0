//! Gaussian and Gamma variates.
//!
//! Transcendental calls go through `libm` so that the draw sequence for a
//! given stream does not depend on the platform's math library.

use super::rng::RngStream;
use crate::error::{Error, Result};

/// Standard normal variate by the Marsaglia polar method (the second variate
/// of each accepted pair is discarded so that draws depend only on stream
/// position).
#[inline]
pub fn standard_normal(rng: &mut RngStream) -> f64 {
    loop {
        let u = 2.0 * rng.next_f64() - 1.0;
        let v = 2.0 * rng.next_f64() - 1.0;
        let s = u * u + v * v;
        if s > 0.0 && s < 1.0 {
            return u * libm::sqrt(-2.0 * libm::log(s) / s);
        }
    }
}

pub fn sample_gaussian(rng: &mut RngStream, mu: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::domain(
            "sample_gaussian",
            format!("sigma = {sigma} must be positive and finite"),
        ));
    }
    if !mu.is_finite() {
        return Err(Error::domain("sample_gaussian", format!("mu = {mu} is not finite")));
    }
    Ok(mu + sigma * standard_normal(rng))
}

/// Gamma(shape, rate) variate; mean `shape / rate`.
///
/// Marsaglia & Tsang (2000) squeeze/rejection for `shape >= 1`; for
/// `shape < 1` a Gamma(shape + 1) draw is boosted by `U^(1/shape)`.
pub fn sample_gamma(rng: &mut RngStream, shape: f64, rate: f64) -> Result<f64> {
    if !(shape > 0.0) || !shape.is_finite() {
        return Err(Error::domain("sample_gamma", format!("shape = {shape} must be positive")));
    }
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::domain("sample_gamma", format!("rate = {rate} must be positive")));
    }
    Ok(standard_gamma(rng, shape) / rate)
}

fn standard_gamma(rng: &mut RngStream, shape: f64) -> f64 {
    if shape < 1.0 {
        let g = marsaglia_tsang(rng, shape + 1.0);
        return g * libm::pow(rng.next_open01(), 1.0 / shape);
    }
    marsaglia_tsang(rng, shape)
}

fn marsaglia_tsang(rng: &mut RngStream, shape: f64) -> f64 {
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / libm::sqrt(9.0 * d);
    loop {
        let x = standard_normal(rng);
        let t = 1.0 + c * x;
        if t <= 0.0 {
            continue;
        }
        let v = t * t * t;
        let u = rng.next_open01();
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 {
            return d * v;
        }
        if libm::log(u) < 0.5 * x2 + d * (1.0 - v + libm::log(v)) {
            return d * v;
        }
    }
}
