//! Multi-run experiments: config ingestion, parallel execution, aggregation
//! and the CSV/JSON artifacts.
//!
//! Run `r` of policy `p` is seeded with `mix_seed(mix_seed(master_seed, p), r)`.
//! Runs execute on a dedicated thread pool and are collected in index order,
//! so output does not depend on the degree of parallelism.
//!
//! Error bars use the population standard deviation over runs.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{bound_report, BoundReport, Table1Params, XiChoice};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::policies::{simulate, PolicySpec};
use crate::presets::Preset;
use crate::regret::{flag_error, regret_trajectories, RegretKind, RunRecord};
use crate::stats::{mix_seed, RngStream};

/// Horizons up to this length are recorded at every round by default.
pub const FULL_RECORD_LIMIT: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub mus: Vec<f64>,
    pub sigma2s: Vec<f64>,
    pub alpha: f64,
    pub tau: f64,
    /// Defaults to the largest arm standard deviation.
    #[serde(default)]
    pub sigma_max: Option<f64>,
}

impl InstanceSpec {
    pub fn build(&self) -> Result<Instance> {
        if self.mus.len() != self.sigma2s.len() {
            return Err(Error::config(
                "instance.sigma2s",
                format!("{} variances for {} means", self.sigma2s.len(), self.mus.len()),
            ));
        }
        if let Some(v) = self.sigma2s.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::config("instance.sigma2s", format!("variance {v} is not positive")));
        }
        let sigma_max = self
            .sigma_max
            .unwrap_or_else(|| self.sigma2s.iter().copied().fold(0.0, f64::max).sqrt());
        Instance::from_moments(&self.mus, &self.sigma2s, self.alpha, self.tau, sigma_max).map_err(|e| match e {
            Error::Config { .. } => e,
            other => Error::config("instance", other.to_string()),
        })
    }
}

/// Config file layout. Exactly one of `instance` and `preset` is required.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    instance: Option<InstanceSpec>,
    preset: Option<String>,
    horizon: Option<usize>,
    num_runs: Option<usize>,
    master_seed: Option<u64>,
    policies: Option<Vec<PolicySpec>>,
    parallelism: Option<usize>,
    thinning_stride: Option<usize>,
    output_dir: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub instance: Instance,
    /// Name of the preset the instance came from, if any.
    pub preset: Option<String>,
    pub horizon: usize,
    pub num_runs: usize,
    pub master_seed: u64,
    pub policies: Vec<PolicySpec>,
    /// Worker threads; `None` uses one per available core.
    pub parallelism: Option<usize>,
    /// Record regret every `thinning_stride` rounds (the last round is always kept).
    pub thinning_stride: usize,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    /// A preset with the benchmark policies.
    pub fn from_preset(preset: Preset, horizon: usize, num_runs: usize, master_seed: u64) -> Result<Self> {
        let cfg = Self {
            instance: preset.instance(),
            preset: Some(preset.name().to_string()),
            horizon,
            num_runs,
            master_seed,
            policies: PolicySpec::benchmark_set(),
            parallelism: None,
            thinning_stride: default_stride(horizon),
            output_dir: PathBuf::from("out"),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: RawConfig =
            serde_json::from_str(text).map_err(|e| Error::config(field_of(&e.to_string()), e.to_string()))?;
        let (instance, preset) = match (raw.instance, raw.preset) {
            (Some(_), Some(_)) => {
                return Err(Error::config("preset", "give either `instance` or `preset`, not both"))
            }
            (Some(spec), None) => (spec.build()?, None),
            (None, Some(name)) => (Preset::from_name(&name)?.instance(), Some(name)),
            (None, None) => return Err(Error::config("instance", "missing field: give `instance` or `preset`")),
        };
        let horizon = raw.horizon.ok_or_else(|| Error::config("horizon", "missing field"))?;
        let cfg = Self {
            instance,
            preset,
            horizon,
            num_runs: raw.num_runs.ok_or_else(|| Error::config("num_runs", "missing field"))?,
            master_seed: raw.master_seed.unwrap_or(0),
            policies: raw.policies.unwrap_or_else(PolicySpec::benchmark_set),
            parallelism: raw.parallelism,
            thinning_stride: raw.thinning_stride.unwrap_or_else(|| default_stride(horizon)),
            output_dir: raw.output_dir.unwrap_or_else(|| PathBuf::from("out")),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.instance.num_arms();
        if self.horizon < k {
            return Err(Error::config(
                "horizon",
                format!("horizon {} is shorter than the {k}-round warm-up", self.horizon),
            ));
        }
        if self.num_runs == 0 {
            return Err(Error::config("num_runs", "at least one run is required"));
        }
        if self.policies.is_empty() {
            return Err(Error::config("policies", "no policies given"));
        }
        for (i, p) in self.policies.iter().enumerate() {
            p.validate().map_err(|e| match e {
                Error::Config { field, reason } => Error::config(format!("policies[{i}].{field}"), reason),
                other => other,
            })?;
        }
        if self.parallelism == Some(0) {
            return Err(Error::config("parallelism", "must be at least 1"));
        }
        if self.thinning_stride == 0 {
            return Err(Error::config("thinning_stride", "must be at least 1"));
        }
        Ok(())
    }

    /// Distinct display labels, suffixed with the position when a policy repeats.
    pub fn policy_labels(&self) -> Vec<String> {
        self.policies
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let repeated = self.policies.iter().filter(|q| q.label() == p.label()).count() > 1;
                if repeated {
                    format!("{}#{i}", p.label())
                } else {
                    p.label().to_string()
                }
            })
            .collect()
    }

    /// Rounds (1-based) at which trajectories are recorded.
    pub fn recorded_rounds(&self) -> Vec<usize> {
        let mut rounds: Vec<usize> = (self.thinning_stride..=self.horizon).step_by(self.thinning_stride).collect();
        if self.thinning_stride > 1 {
            rounds.insert(0, 1);
        }
        if rounds.last() != Some(&self.horizon) {
            rounds.push(self.horizon);
        }
        rounds
    }

    pub fn run_seed(&self, policy_index: usize, run_index: usize) -> u64 {
        mix_seed(mix_seed(self.master_seed, policy_index as u64), run_index as u64)
    }
}

fn default_stride(horizon: usize) -> usize {
    horizon.div_ceil(FULL_RECORD_LIMIT).max(1)
}

/// Best guess at the field a serde message complains about.
fn field_of(msg: &str) -> String {
    msg.split('`').nth(1).unwrap_or("config").to_string()
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    ExperimentConfig::from_json_str(&text)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregateTrajectory {
    pub kind: RegretKind,
    pub rounds: Vec<usize>,
    pub mean: Vec<f64>,
    /// Population standard deviation over runs.
    pub std: Vec<f64>,
}

impl AggregateTrajectory {
    pub fn final_mean(&self) -> f64 {
        *self.mean.last().expect("nonempty trajectory")
    }

    pub fn final_std(&self) -> f64 {
        *self.std.last().expect("nonempty trajectory")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolicyAggregate {
    pub label: String,
    pub spec: PolicySpec,
    pub regrets: Vec<AggregateTrajectory>,
    pub wrong_flags: usize,
    pub num_runs: usize,
    pub wrong_flag_proportion: f64,
    pub mean_pull_counts: Vec<f64>,
}

impl PolicyAggregate {
    pub fn regret(&self, kind: RegretKind) -> Option<&AggregateTrajectory> {
        self.regrets.iter().find(|t| t.kind == kind)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregateResult {
    pub instance_kind: &'static str,
    pub horizon: usize,
    pub num_runs: usize,
    pub master_seed: u64,
    pub policies: Vec<PolicyAggregate>,
}

impl AggregateResult {
    pub fn policy(&self, label: &str) -> Option<&PolicyAggregate> {
        self.policies.iter().find(|p| p.label == label)
    }
}

struct RunOutcome {
    record: RunRecord,
    /// One row per applicable regret kind, sampled at the recorded rounds.
    regrets: Vec<Vec<f64>>,
    wrong_flag: bool,
}

fn run_one(cfg: &ExperimentConfig, policy_index: usize, run_index: usize, rounds: &[usize]) -> Result<RunOutcome> {
    let mut rng = RngStream::new(cfg.run_seed(policy_index, run_index));
    let mut policy = cfg.policies[policy_index].build(&cfg.instance);
    let record = simulate(policy.as_mut(), &cfg.instance, cfg.horizon, &mut rng)?;
    let regrets = regret_trajectories(&record, &cfg.instance)?
        .into_iter()
        .map(|t| rounds.iter().map(|&r| t.values[r - 1]).collect())
        .collect();
    let wrong_flag = flag_error(&record, &cfg.instance);
    Ok(RunOutcome { record, regrets, wrong_flag })
}

/// Pointwise mean and population standard deviation of equal-length rows.
pub fn mean_and_std(rows: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = rows.len() as f64;
    let Some(first) = rows.first() else {
        return (Vec::new(), Vec::new());
    };
    // Deviations are taken from the first run's value, so columns where every
    // run agrees come out with exactly that mean and a zero std.
    let mut shift = vec![0.0; first.len()];
    for row in rows {
        for ((s, v), k) in shift.iter_mut().zip(row).zip(first) {
            *s += v - k;
        }
    }
    shift.iter_mut().for_each(|s| *s /= n);
    let mut var = vec![0.0; first.len()];
    for row in rows {
        for (((s, v), k), d) in var.iter_mut().zip(row).zip(first).zip(&shift) {
            let e = v - k - d;
            *s += e * e;
        }
    }
    let mean = first.iter().zip(&shift).map(|(k, d)| k + d).collect();
    let std = var.into_iter().map(|s| (s / n).sqrt()).collect();
    (mean, std)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<AggregateResult> {
    cfg.validate()?;
    let rounds = cfg.recorded_rounds();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.parallelism {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::config("parallelism", format!("cannot start thread pool: {e}")))?;

    let jobs: Vec<(usize, usize)> = (0..cfg.policies.len())
        .flat_map(|p| (0..cfg.num_runs).map(move |r| (p, r)))
        .collect();
    let outcomes: Vec<RunOutcome> =
        pool.install(|| jobs.par_iter().map(|&(p, r)| run_one(cfg, p, r, &rounds)).collect::<Result<_>>())?;

    let feasible = cfg.instance.classify().feasible;
    let kinds = RegretKind::applicable(feasible);
    let k = cfg.instance.num_arms();
    let labels = cfg.policy_labels();
    let policies = outcomes
        .chunks(cfg.num_runs)
        .zip(cfg.policies.iter().zip(labels))
        .map(|(runs, (spec, label))| {
            let regrets = kinds
                .iter()
                .enumerate()
                .map(|(j, &kind)| {
                    let rows: Vec<Vec<f64>> = runs.iter().map(|o| o.regrets[j].clone()).collect();
                    let (mean, std) = mean_and_std(&rows);
                    AggregateTrajectory { kind, rounds: rounds.clone(), mean, std }
                })
                .collect();
            let wrong_flags = runs.iter().filter(|o| o.wrong_flag).count();
            let mut mean_pull_counts = vec![0.0; k];
            for o in runs {
                for (m, &c) in mean_pull_counts.iter_mut().zip(&o.record.pull_counts) {
                    *m += c as f64 / runs.len() as f64;
                }
            }
            PolicyAggregate {
                label,
                spec: spec.clone(),
                regrets,
                wrong_flags,
                num_runs: runs.len(),
                wrong_flag_proportion: wrong_flags as f64 / runs.len() as f64,
                mean_pull_counts,
            }
        })
        .collect();

    Ok(AggregateResult {
        instance_kind: if feasible { "feasible" } else { "infeasible" },
        horizon: cfg.horizon,
        num_runs: cfg.num_runs,
        master_seed: cfg.master_seed,
        policies,
    })
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::Serialize { path: path.to_path_buf(), reason: e.to_string() }
}

/// Writes `policy,regret_kind,round,mean,std` rows.
pub fn regret_csv_to<W: Write>(result: &AggregateResult, out: W) -> csv::Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["policy", "regret_kind", "round", "mean", "std"])?;
    for p in &result.policies {
        for t in &p.regrets {
            for ((r, m), s) in t.rounds.iter().zip(&t.mean).zip(&t.std) {
                w.write_record([p.label.clone(), t.kind.to_string(), r.to_string(), m.to_string(), s.to_string()])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes `policy,instance_kind,wrong_flag_proportion,num_runs` rows.
pub fn flags_csv_to<W: Write>(result: &AggregateResult, out: W) -> csv::Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["policy", "instance_kind", "wrong_flag_proportion", "num_runs"])?;
    for p in &result.policies {
        w.write_record([
            p.label.clone(),
            result.instance_kind.to_string(),
            p.wrong_flag_proportion.to_string(),
            p.num_runs.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_regret_csv(result: &AggregateResult, path: &Path) -> Result<()> {
    regret_csv_to(result, create(path)?).map_err(csv_err(path))
}

pub fn write_flags_csv(result: &AggregateResult, path: &Path) -> Result<()> {
    flags_csv_to(result, create(path)?).map_err(csv_err(path))
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Serialize { path: path.to_path_buf(), reason: e.to_string() })?;
    text.push('\n');
    fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

#[derive(Serialize)]
struct Summary<'a> {
    preset: Option<&'a str>,
    alpha: f64,
    tau: f64,
    instance_kind: &'a str,
    horizon: usize,
    num_runs: usize,
    master_seed: u64,
    policies: Vec<PolicySummary<'a>>,
}

#[derive(Serialize)]
struct PolicySummary<'a> {
    label: &'a str,
    spec: &'a PolicySpec,
    wrong_flag_proportion: f64,
    final_regret: Vec<FinalRegret>,
    mean_pull_counts: &'a [f64],
}

#[derive(Serialize)]
struct FinalRegret {
    kind: RegretKind,
    mean: f64,
    std: f64,
}

/// Paths of the files written by [`write_artifacts`].
#[derive(Clone, Debug)]
pub struct Artifacts {
    pub regret_csv: PathBuf,
    pub flags_csv: PathBuf,
    pub summary_json: PathBuf,
    pub bounds_json: PathBuf,
}

pub fn write_artifacts(cfg: &ExperimentConfig, result: &AggregateResult, dir: &Path) -> Result<Artifacts> {
    fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    let out = Artifacts {
        regret_csv: dir.join("regret.csv"),
        flags_csv: dir.join("flags.csv"),
        summary_json: dir.join("summary.json"),
        bounds_json: dir.join("bounds.json"),
    };
    write_regret_csv(result, &out.regret_csv)?;
    write_flags_csv(result, &out.flags_csv)?;
    let summary = Summary {
        preset: cfg.preset.as_deref(),
        alpha: cfg.instance.alpha(),
        tau: cfg.instance.tau(),
        instance_kind: result.instance_kind,
        horizon: result.horizon,
        num_runs: result.num_runs,
        master_seed: result.master_seed,
        policies: result
            .policies
            .iter()
            .map(|p| PolicySummary {
                label: &p.label,
                spec: &p.spec,
                wrong_flag_proportion: p.wrong_flag_proportion,
                final_regret: p
                    .regrets
                    .iter()
                    .map(|t| FinalRegret { kind: t.kind, mean: t.final_mean(), std: t.final_std() })
                    .collect(),
                mean_pull_counts: &p.mean_pull_counts,
            })
            .collect(),
    };
    write_json(&summary, &out.summary_json)?;
    write_json(&experiment_bounds(cfg)?, &out.bounds_json)?;
    Ok(out)
}

/// Bound report for the experiment's instance with per-arm `ξ_α`.
pub fn experiment_bounds(cfg: &ExperimentConfig) -> Result<BoundReport> {
    let table1 = Table1Params { n: cfg.horizon.max(2) as u64, ..Default::default() };
    bound_report(&cfg.instance, XiChoice::Auto, &table1)
}

/// Runs the experiment and writes its artifacts to `cfg.output_dir`.
pub fn run_and_write(cfg: &ExperimentConfig) -> Result<(AggregateResult, Artifacts)> {
    let result = run_experiment(cfg)?;
    let artifacts = write_artifacts(cfg, &result, &cfg.output_dir)?;
    Ok((result, artifacts))
}
