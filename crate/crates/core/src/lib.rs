//! Risk-constrained Gaussian bandits under CVaR.
//!
//! A policy minimizes expected loss among arms whose CVaR stays below a
//! threshold `τ`, and falls back to the least risky arm when no arm
//! qualifies. The crate provides CVaR Thompson sampling, two reconstructed
//! confidence-bound baselines, regret accounting, closed-form bound constants
//! and a seeded parallel experiment runner.

pub mod bounds;
pub mod cvar;
pub mod error;
pub mod experiment;
pub mod instance;
pub mod policies;
pub mod presets;
pub mod regret;
pub mod stats;

pub use error::{Error, Result};
