//! Special functions, seeded sampling and concentration bounds.

pub mod rng;
pub mod sampling;
pub mod special;
pub mod tail_bounds;

pub use rng::{mix_seed, splitmix64, RngStream};
pub use sampling::{sample_gamma, sample_gaussian};
pub use special::{h, h_plus_inverse, HFunction, std_normal_cdf, std_normal_quantile};
pub use tail_bounds::{
    chisq_lower_tail_bound, gamma_ccdf_lower_bound, gamma_tail_upper_bound,
    gaussian_tail_lower_bound,
};
