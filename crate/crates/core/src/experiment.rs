//! Experiment grids: every (availability, policy, instance) combination is
//! one independent run with derived seeds. Each run writes a CSV trace; the
//! summary is folded from those CSV files, so it can be rebuilt from them.
//!
//! Specs are flat `key = value` files; `#` starts a comment. Besides the
//! environment keys of [`EnvConfig::KEYS`] the following are accepted:
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `policies` | comma-separated policy tags | all seven |
//! | `f` | exploration factor of the control function | 0.003 |
//! | `alpha` | Hölder exponent used by the learner | 1 |
//! | `lambda_linucb` | LinUCB confidence width | 1.5 |
//! | `lambda_auer` | AUER confidence width | 0.5 |
//! | `epsilon` | ε-greedy exploration probability | 0.01 |
//! | `instances` | runs per (ρ, policy) | 1 |
//! | `seed` | master seed | 0 |
//! | `rhos` | comma-separated availability sweep, overrides `rho` | |
//! | `output_dir` | where files are written | |

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::{filter_bbox, load_checkins, CheckinRecord, DataSource, EnvConfig};
use crate::error::{Error, Result};
use crate::policies::PolicyKind;
use crate::seed::{environment_seed, policy_seed};
use crate::sim::{format_g9, run_instance, trace_csv, Detail, PolicyParams, RunSeeds, CSV_HEADER};

pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub env: EnvConfig,
    pub policies: Vec<PolicyKind>,
    pub params: PolicyParams,
    pub instances: usize,
    pub seed: u64,
    /// Availability sweep; empty means `env.rho` only.
    pub rhos: Vec<f64>,
    pub output_dir: Option<PathBuf>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            env: EnvConfig::default(),
            policies: PolicyKind::ALL.to_vec(),
            params: PolicyParams::default(),
            instances: 1,
            seed: 0,
            rhos: Vec::new(),
            output_dir: None,
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &'static str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::param(key, format!("cannot parse `{}`", value.trim())))
}

impl ExperimentSpec {
    pub const KEYS: &'static [&'static str] = &[
        "policies",
        "f",
        "alpha",
        "lambda_linucb",
        "lambda_auer",
        "epsilon",
        "instances",
        "seed",
        "rhos",
        "output_dir",
    ];

    /// Parses a spec file body on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut spec = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let config_error = |reason: String| Error::Config {
                line: i + 1,
                reason,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| config_error(format!("expected `key = value`, got `{line}`")))?;
            spec.set(key.trim(), value.trim())
                .map_err(|e| config_error(e.to_string()))?;
        }
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Applies one setting; unknown keys are an error.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if self.env.set(key, value)? {
            return Ok(());
        }
        match key {
            "policies" => {
                self.policies = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(str::parse)
                    .collect::<Result<_>>()?
            }
            "f" => self.params.exploration_factor = parse_value("f", value)?,
            "alpha" => self.params.alpha = parse_value("alpha", value)?,
            "lambda_linucb" => self.params.linucb_width = parse_value("lambda_linucb", value)?,
            "lambda_auer" => self.params.auer_width = parse_value("lambda_auer", value)?,
            "epsilon" => self.params.epsilon = parse_value("epsilon", value)?,
            "instances" => self.instances = parse_value("instances", value)?,
            "seed" => self.seed = parse_value("seed", value)?,
            "rhos" => {
                self.rhos = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| parse_value("rhos", s))
                    .collect::<Result<_>>()?
            }
            "output_dir" => {
                let v = value.trim();
                self.output_dir = (!v.is_empty()).then(|| PathBuf::from(v));
            }
            other => return Err(Error::param("key", format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Availability values to run, in order.
    pub fn rho_values(&self) -> Vec<f64> {
        if self.rhos.is_empty() {
            vec![self.env.rho]
        } else {
            self.rhos.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.policies.is_empty() {
            return Err(Error::param("policies", "at least one policy is required"));
        }
        if self.instances == 0 {
            return Err(Error::param("instances", "must be at least 1"));
        }
        for rho in self.rho_values() {
            EnvConfig {
                rho,
                ..self.env.clone()
            }
            .validate()?;
        }
        self.params.control(self.env.horizon).validate()?;
        if !(self.params.linucb_width >= 0.0 && self.params.auer_width >= 0.0) {
            return Err(Error::param("lambda", "confidence widths must be >= 0"));
        }
        if !(0.0..=1.0).contains(&self.params.epsilon) {
            return Err(Error::param("epsilon", "must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// File name of the trace of one run.
pub fn trace_file_name(rho: f64, policy: PolicyKind, instance: usize) -> String {
    format!(
        "rho{}_{}_i{:03}.csv",
        format_g9(rho),
        policy.tag(),
        instance
    )
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::param("path", format!("{} has no file name", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Totals of one run, recomputed from its CSV trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceStats {
    pub instance: usize,
    pub tasks: usize,
    pub selected: u64,
    /// Cumulative performance at the horizon.
    pub gamma: f64,
    /// Cumulative expected regret at the horizon.
    pub regret: f64,
    pub final_average: f64,
    pub assessments: u64,
}

impl InstanceStats {
    pub fn from_csv(instance: usize, text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let bad = |line: usize, reason: String| Error::Config { line, reason };
        match lines.next() {
            Some(h) if h == CSV_HEADER => {}
            _ => return Err(bad(1, "unexpected trace header".into())),
        }
        let mut stats = InstanceStats {
            instance,
            tasks: 0,
            selected: 0,
            gamma: 0.0,
            regret: 0.0,
            final_average: 0.0,
            assessments: 0,
        };
        for (i, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 9 {
                return Err(bad(
                    i + 2,
                    format!("expected 9 columns, found {}", fields.len()),
                ));
            }
            let num = |k: usize| -> Result<f64> {
                fields[k]
                    .parse()
                    .map_err(|_| bad(i + 2, format!("column {} is not a number", k + 1)))
            };
            let (w_t, m_t) = (num(2)? as u64, num(3)? as u64);
            stats.tasks += 1;
            stats.selected += w_t.min(m_t);
            stats.gamma += num(4)?;
            stats.regret += num(6)? - num(5)?;
            stats.assessments += num(8)? as u64;
        }
        if stats.selected > 0 {
            stats.final_average = stats.gamma / stats.selected as f64;
        }
        Ok(stats)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicySummary {
    pub policy: PolicyKind,
    pub instances: Vec<InstanceStats>,
    pub mean_gamma: f64,
    pub mean_regret: f64,
    /// Cumulative performance over all instances divided by selections.
    pub final_average: f64,
    /// Summed cumulative performance relative to the learner's; absent when
    /// the learner was not run.
    pub ratio_to_hcl: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhoSummary {
    pub rho: f64,
    pub policies: Vec<PolicySummary>,
}

impl RhoSummary {
    pub fn policy(&self, kind: PolicyKind) -> Option<&PolicySummary> {
        self.policies.iter().find(|p| p.policy == kind)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub horizon: usize,
    pub workers: usize,
    pub instances: usize,
    pub seed: u64,
    pub model: String,
    pub source: String,
    pub params: PolicyParams,
    pub runs: Vec<RhoSummary>,
}

impl ExperimentSummary {
    pub fn rho(&self, rho: f64) -> Option<&RhoSummary> {
        self.runs.iter().find(|r| r.rho == rho)
    }

    /// Plain-text ratio table: one row per availability, one column per policy.
    pub fn ratio_table(&self) -> String {
        let mut out = String::new();
        let policies: Vec<PolicyKind> = self
            .runs
            .first()
            .map(|r| r.policies.iter().map(|p| p.policy).collect())
            .unwrap_or_default();
        out.push_str(&format!("{:>6}", "rho"));
        for p in &policies {
            out.push_str(&format!(" {:>10}", p.tag()));
        }
        out.push('\n');
        for run in &self.runs {
            out.push_str(&format!("{:>6}", format_g9(run.rho)));
            for p in &run.policies {
                let cell = p
                    .ratio_to_hcl
                    .map_or("-".to_string(), |r| format!("{r:.3}"));
                out.push_str(&format!(" {cell:>10}"));
            }
            out.push('\n');
        }
        out
    }
}

fn summarize(
    spec: &ExperimentSpec,
    stats: Vec<(f64, PolicyKind, InstanceStats)>,
) -> ExperimentSummary {
    let mut runs = Vec::new();
    for rho in spec.rho_values() {
        let mut policies: Vec<PolicySummary> = spec
            .policies
            .iter()
            .map(|&policy| {
                let instances: Vec<InstanceStats> = stats
                    .iter()
                    .filter(|(r, p, _)| *r == rho && *p == policy)
                    .map(|(_, _, s)| s.clone())
                    .collect();
                let n = instances.len().max(1) as f64;
                let gamma: f64 = instances.iter().map(|s| s.gamma).sum();
                let selected: u64 = instances.iter().map(|s| s.selected).sum();
                PolicySummary {
                    policy,
                    mean_gamma: gamma / n,
                    mean_regret: instances.iter().map(|s| s.regret).sum::<f64>() / n,
                    final_average: if selected > 0 {
                        gamma / selected as f64
                    } else {
                        0.0
                    },
                    instances,
                    ratio_to_hcl: None,
                }
            })
            .collect();
        if let Some(hcl) = policies
            .iter()
            .find(|p| p.policy == PolicyKind::Hcl)
            .map(|p| p.mean_gamma)
        {
            for p in &mut policies {
                p.ratio_to_hcl = Some(p.mean_gamma / hcl);
            }
        }
        runs.push(RhoSummary { rho, policies });
    }
    ExperimentSummary {
        horizon: spec.env.horizon,
        workers: spec.env.workers,
        instances: spec.instances,
        seed: spec.seed,
        model: spec.env.model.to_string(),
        source: spec.env.source.to_string(),
        params: spec.params,
        runs,
    }
}

/// Loads and box-filters the check-in file when the spec needs it.
pub fn load_spec_checkins(env: &EnvConfig) -> Result<Option<Vec<CheckinRecord>>> {
    if env.source != DataSource::Checkin {
        return Ok(None);
    }
    let path = env
        .checkin_path
        .as_ref()
        .ok_or_else(|| Error::param("checkin_path", "required for the checkin source"))?;
    let records = load_checkins(path)?;
    Ok(Some(filter_bbox(&records, &env.bbox)?))
}

/// Runs the whole grid in parallel, writes one CSV per run and the summary
/// JSON into `out_dir`, and returns the summary.
pub fn run_experiment(spec: &ExperimentSpec, out_dir: &Path) -> Result<ExperimentSummary> {
    spec.validate()?;
    let checkins = load_spec_checkins(&spec.env)?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut jobs = Vec::new();
    for rho in spec.rho_values() {
        for &policy in &spec.policies {
            for k in 0..spec.instances {
                jobs.push((rho, policy, k));
            }
        }
    }
    let stats = jobs
        .into_par_iter()
        .map(|(rho, policy, k)| {
            let config = EnvConfig {
                rho,
                ..spec.env.clone()
            };
            let seeds = RunSeeds {
                environment: environment_seed(spec.seed, rho, k as u64),
                policy: policy_seed(spec.seed, rho, policy.tag(), k as u64),
            };
            let trace = run_instance(
                &config,
                checkins.as_deref(),
                policy,
                &spec.params,
                seeds,
                Detail::Summary,
            )?;
            let csv = trace_csv(&trace);
            write_atomic(
                &out_dir.join(trace_file_name(rho, policy, k)),
                csv.as_bytes(),
            )?;
            Ok((rho, policy, InstanceStats::from_csv(k, &csv)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(spec, stats);
    let json = serde_json::to_string_pretty(&summary)?;
    write_atomic(&out_dir.join(SUMMARY_FILE), json.as_bytes())?;
    Ok(summary)
}

/// Sizes the global worker pool. Must be called before the first run.
pub fn set_threads(threads: usize) -> Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::param("threads", e.to_string()))
}

/// Rebuilds the summary of a finished experiment from its CSV traces alone.
pub fn reaggregate(spec: &ExperimentSpec, out_dir: &Path) -> Result<ExperimentSummary> {
    let mut stats = Vec::new();
    for rho in spec.rho_values() {
        for &policy in &spec.policies {
            for k in 0..spec.instances {
                let path = out_dir.join(trace_file_name(rho, policy, k));
                let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                stats.push((rho, policy, InstanceStats::from_csv(k, &text)?));
            }
        }
    }
    Ok(summarize(spec, stats))
}
