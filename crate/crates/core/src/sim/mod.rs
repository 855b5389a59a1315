//! The per-instance engine: drives one policy through one seeded world and
//! records what happened on every task.

use serde::{Deserialize, Serialize};

use crate::env::{
    outcome_from_noise, CheckinRecord, EnvConfig, Environment, GroundTruth, PerformanceModel,
};
use crate::error::{Error, Result};
use crate::hcl::{ControlParams, Hcl, McspPhase};
use crate::policies::{
    Auer, AvailableWorker, EpsGreedy, LinUcb, Myopic, Oracle, Policy, PolicyKind, RandomPolicy,
    Round,
};
use crate::seed::{rng_from_seed, SimRng};
use crate::types::{Selection, Task};

mod metrics;
mod output;

pub use metrics::{
    assessment_counts, average_performance_up_to, comm_scalars, cumulative_performance,
    expected_regret, CommMode, MetricSeries,
};
pub use output::{format_g9, trace_csv, CSV_HEADER};

/// Tuning of every policy. Defaults: `f = 0.003`, `alpha = 1`,
/// LinUCB width 1.5, AUER width 0.5, `epsilon = 0.01`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyParams {
    pub exploration_factor: f64,
    pub alpha: f64,
    pub linucb_width: f64,
    pub auer_width: f64,
    pub epsilon: f64,
}

impl Default for PolicyParams {
    fn default() -> Self {
        Self {
            exploration_factor: 0.003,
            alpha: 1.0,
            linucb_width: 1.5,
            auer_width: 0.5,
            epsilon: 0.01,
        }
    }
}

impl PolicyParams {
    pub fn control(&self, horizon: usize) -> ControlParams {
        ControlParams {
            alpha: self.alpha,
            exploration_factor: self.exploration_factor,
            horizon,
        }
    }
}

/// Builds a fresh policy for the workers of `env`.
pub fn build_policy(
    kind: PolicyKind,
    params: &PolicyParams,
    env: &Environment,
) -> Result<Box<dyn Policy>> {
    let config = env.config();
    let workers = env.pool().workers();
    let worker_dims = env.worker_dims();
    Ok(match kind {
        PolicyKind::Hcl => Box::new(Hcl::new(
            &worker_dims,
            config.task_dims,
            params.control(config.horizon),
            config.quality,
        )?),
        PolicyKind::Oracle => Box::new(Oracle::new(env.truth())),
        PolicyKind::LinUcb => {
            let joint: Vec<usize> = worker_dims.iter().map(|d| d + config.task_dims).collect();
            Box::new(LinUcb::new(&joint, params.linucb_width)?)
        }
        PolicyKind::Auer => Box::new(Auer::new(workers, params.auer_width)?),
        PolicyKind::EpsGreedy => Box::new(EpsGreedy::new(workers, params.epsilon)?),
        PolicyKind::Myopic => Box::new(Myopic::new(workers)),
        PolicyKind::Random => Box::new(RandomPolicy::new()),
    })
}

/// How much of each round to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Detail {
    /// Keep the available workers with their contexts.
    #[default]
    Full,
    /// Keep only the per-task aggregates needed for metrics and CSV output.
    Summary,
}

/// One task as seen by the simulator.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: usize,
    pub task: Task,
    pub quota: usize,
    pub available_count: usize,
    /// Sum of personal context dimensions over the available workers.
    pub worker_dim_sum: usize,
    /// Empty under [`Detail::Summary`].
    pub available: Vec<AvailableWorker>,
    pub selection: Selection,
    /// Observed performance per selected worker, aligned with `selection`.
    pub performance: Vec<f64>,
    /// True expected performance per selected worker, aligned with `selection`.
    pub theta: Vec<f64>,
    /// True expected performance of the benchmark selection.
    pub oracle_theta_sum: f64,
    pub phase: Option<McspPhase>,
    /// Scalars exchanged for this task under the policy's architecture.
    pub comm: usize,
}

impl TraceRow {
    pub fn selection_size(&self) -> usize {
        self.quota.min(self.available_count)
    }

    pub fn perf_sum(&self) -> f64 {
        self.performance.iter().sum()
    }

    pub fn theta_sum(&self) -> f64 {
        self.theta.iter().sum()
    }

    pub fn assessments(&self) -> usize {
        self.selection.workers.iter().filter(|s| s.explored).count()
    }

    /// Phase column label; `NA` for rounds without a phase.
    pub fn phase_label(&self) -> &'static str {
        self.phase.map_or("NA", McspPhase::label)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub policy: PolicyKind,
    pub workers: usize,
    pub rows: Vec<TraceRow>,
}

impl RunTrace {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

fn sum_top(mut values: Vec<f64>, k: usize) -> f64 {
    values.sort_by(|a, b| b.total_cmp(a));
    values.iter().take(k).sum()
}

/// Runs `policy` for `env.config().horizon` tasks. Every selected worker's
/// outcome is passed to `observe`; learners decide themselves what to keep.
pub fn run_with(
    env: &mut Environment,
    policy: &mut dyn Policy,
    rng: &mut SimRng,
    detail: Detail,
) -> Result<RunTrace> {
    let horizon = env.config().horizon;
    let quality = env.config().quality;
    let noise_width = env.config().noise_width;
    let task_dims = env.config().task_dims;
    let truth: std::sync::Arc<GroundTruth> = env.truth();
    let kind = policy.kind();
    let mut rows = Vec::with_capacity(horizon);
    for t in 1..=horizon {
        let data = env.next_round()?;
        let round = Round {
            t,
            task: &data.task,
            quota: data.quota,
            workers: &data.workers,
        };
        let thetas: Vec<f64> = data
            .workers
            .iter()
            .map(|w| truth.expected(w.id, &w.context, &data.task.context))
            .collect();
        let decision = policy.select(&round, rng)?;
        let selection = decision.selection;
        if selection.len() != round.selection_size() {
            return Err(Error::param(
                "selection",
                format!(
                    "{kind} selected {} of {} workers",
                    selection.len(),
                    round.selection_size()
                ),
            ));
        }
        let mut performance = Vec::with_capacity(selection.len());
        let mut theta = Vec::with_capacity(selection.len());
        for id in selection.ids() {
            let pos = data
                .workers
                .binary_search_by_key(&id, |w| w.id)
                .map_err(|_| Error::param("selection", format!("{id} is not available")))?;
            let outcome = outcome_from_noise(thetas[pos], data.noise[pos], quality, noise_width);
            policy.observe(&round, id, outcome)?;
            performance.push(outcome.performance());
            theta.push(thetas[pos]);
        }
        let worker_dim_sum: usize = data.workers.iter().map(|w| w.context.dim()).sum();
        let mode = if kind == PolicyKind::Hcl {
            CommMode::Hcl
        } else {
            CommMode::Ccl
        };
        let comm = mode.scalars(task_dims, data.workers.len(), data.quota, worker_dim_sum);
        let oracle_theta_sum = sum_top(thetas, round.selection_size());
        rows.push(TraceRow {
            t,
            quota: data.quota,
            available_count: data.workers.len(),
            worker_dim_sum,
            available: match detail {
                Detail::Full => data.workers,
                Detail::Summary => Vec::new(),
            },
            task: data.task,
            selection,
            performance,
            theta,
            oracle_theta_sum,
            phase: decision.phase,
            comm,
        });
    }
    Ok(RunTrace {
        policy: kind,
        workers: env.pool().workers(),
        rows,
    })
}

/// Seeds of one run: the world, and the policy's private randomness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunSeeds {
    pub environment: u64,
    pub policy: u64,
}

/// Builds the world and the policy from seeds and runs one instance.
pub fn run_instance(
    config: &EnvConfig,
    checkins: Option<&[CheckinRecord]>,
    kind: PolicyKind,
    params: &PolicyParams,
    seeds: RunSeeds,
    detail: Detail,
) -> Result<RunTrace> {
    let mut env = Environment::new(config, checkins, seeds.environment)?;
    let mut policy = build_policy(kind, params, &env)?;
    let mut rng = rng_from_seed(seeds.policy);
    run_with(&mut env, policy.as_mut(), &mut rng, detail)
}
