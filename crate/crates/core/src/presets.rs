//! The 15-arm Gaussian benchmark and its four named instances.

use crate::error::{Error, Result};
use crate::instance::Instance;

pub const PAPER_MEANS: [f64; 15] = [
    0.1, 0.2, 0.23, 0.27, 0.32, 0.32, 0.34, 0.41, 0.43, 0.54, 0.55, 0.56, 0.67, 0.71, 0.79,
];

/// Variances well above 1/32.
pub const PAPER_SIGMA2_HIGH: [f64; 15] = [
    0.045, 0.144, 0.248, 0.339, 0.243, 0.172, 0.039, 0.144, 0.244, 0.353, 0.244, 0.146, 0.056, 0.149,
    0.285,
];

/// Variances close to 1/32.
pub const PAPER_SIGMA2_LOW: [f64; 15] = [
    0.0321, 0.0332, 0.0355, 0.0464, 0.0375, 0.0486, 0.0397, 0.0398, 0.0387, 0.0378, 0.0567, 0.0456,
    0.0345, 0.0334, 0.0323,
];

pub const PAPER_ALPHA: f64 = 0.95;
pub const PAPER_TAU_FEASIBLE: f64 = 4.6;
pub const PAPER_TAU_INFEASIBLE: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    FeasibleHighVar,
    FeasibleLowVar,
    InfeasibleHighVar,
    InfeasibleLowVar,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::FeasibleHighVar,
        Preset::FeasibleLowVar,
        Preset::InfeasibleHighVar,
        Preset::InfeasibleLowVar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::FeasibleHighVar => "paper-feasible-highvar",
            Preset::FeasibleLowVar => "paper-feasible-lowvar",
            Preset::InfeasibleHighVar => "paper-infeasible-highvar",
            Preset::InfeasibleLowVar => "paper-infeasible-lowvar",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == name)
            .ok_or_else(|| {
                let known: Vec<_> = Self::ALL.iter().map(|p| p.name()).collect();
                Error::config("preset", format!("unknown preset `{name}` (known: {})", known.join(", ")))
            })
    }

    pub fn sigma2s(self) -> &'static [f64; 15] {
        match self {
            Preset::FeasibleHighVar | Preset::InfeasibleHighVar => &PAPER_SIGMA2_HIGH,
            Preset::FeasibleLowVar | Preset::InfeasibleLowVar => &PAPER_SIGMA2_LOW,
        }
    }

    pub fn tau(self) -> f64 {
        match self {
            Preset::FeasibleHighVar | Preset::FeasibleLowVar => PAPER_TAU_FEASIBLE,
            Preset::InfeasibleHighVar | Preset::InfeasibleLowVar => PAPER_TAU_INFEASIBLE,
        }
    }

    /// `sigma_max` is the largest arm standard deviation.
    pub fn sigma_max(self) -> f64 {
        self.sigma2s().iter().copied().fold(0.0, f64::max).sqrt()
    }

    pub fn instance(self) -> Instance {
        Instance::from_moments(&PAPER_MEANS, self.sigma2s(), PAPER_ALPHA, self.tau(), self.sigma_max())
            .expect("preset instances are valid")
    }
}
