//! Cumulative regret from pull sequences, measured with the true gaps.
//!
//! A feasible instance carries two regrets: suboptimality (feasible arms with
//! a larger mean than the optimum) and infeasibility (arms over the
//! threshold, charged by how far over). An infeasible instance carries a
//! single risk regret charged by CVaR excess over the least risky arm.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{GapTriple, Instance};

/// Outcome of one simulated run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub pull_counts: Vec<u64>,
    pub pulls_by_round: Vec<usize>,
    pub flag: bool,
    pub seed: u64,
}

impl RunRecord {
    pub fn horizon(&self) -> usize {
        self.pulls_by_round.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegretKind {
    Suboptimality,
    Infeasibility,
    Risk,
}

impl RegretKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RegretKind::Suboptimality => "suboptimality",
            RegretKind::Infeasibility => "infeasibility",
            RegretKind::Risk => "risk",
        }
    }

    /// Regrets that apply to an instance of the given feasibility.
    pub fn applicable(feasible: bool) -> &'static [RegretKind] {
        if feasible {
            &[RegretKind::Suboptimality, RegretKind::Infeasibility]
        } else {
            &[RegretKind::Risk]
        }
    }

    /// Gap charged to an arm under this regret, zero outside its class.
    pub fn gap(self, g: &GapTriple) -> f64 {
        match self {
            RegretKind::Suboptimality => g.sub,
            RegretKind::Infeasibility => g.inf,
            RegretKind::Risk => g.risk,
        }
        .unwrap_or(0.0)
    }
}

impl std::fmt::Display for RegretKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegretTrajectory {
    pub kind: RegretKind,
    /// Cumulative regret after rounds `1..=n`.
    pub values: Vec<f64>,
}

impl RegretTrajectory {
    pub fn final_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

fn check_record(record: &RunRecord, instance: &Instance) -> Result<()> {
    let k = instance.num_arms();
    if record.pull_counts.len() != k {
        return Err(Error::Input(format!(
            "record has {} pull counts but the instance has {k} arms",
            record.pull_counts.len()
        )));
    }
    if let Some(&bad) = record.pulls_by_round.iter().find(|&&a| a >= k) {
        return Err(Error::Input(format!("record pulls arm {bad} of a {k}-arm instance")));
    }
    Ok(())
}

pub fn regret_trajectories(record: &RunRecord, instance: &Instance) -> Result<Vec<RegretTrajectory>> {
    check_record(record, instance)?;
    let classification = instance.classify();
    let gaps = classification.gaps(instance);
    Ok(RegretKind::applicable(classification.feasible)
        .iter()
        .map(|&kind| {
            let per_arm: Vec<f64> = gaps.iter().map(|g| kind.gap(g)).collect();
            let mut acc = 0.0;
            let values = record
                .pulls_by_round
                .iter()
                .map(|&a| {
                    acc += per_arm[a];
                    acc
                })
                .collect();
            RegretTrajectory { kind, values }
        })
        .collect())
}

/// `Σ_i T_i · gap_i` from the pull counts alone.
pub fn final_regret(record: &RunRecord, instance: &Instance, kind: RegretKind) -> Result<f64> {
    check_record(record, instance)?;
    let gaps = instance.gaps();
    Ok(record.pull_counts.iter().zip(&gaps).map(|(&t, g)| t as f64 * kind.gap(g)).sum())
}

/// Whether the run's flag disagrees with the instance's true feasibility.
pub fn flag_error(record: &RunRecord, instance: &Instance) -> bool {
    record.flag != instance.classify().feasible
}
