//! Ground-truth expected performance models and outcome sampling.

use rand::Rng;

use crate::env::{location_index, EnvConfig, ModelKind, PerformanceModel};
use crate::error::{Error, Result};
use crate::seed::SimRng;
use crate::types::{JointContext, Outcome, QualityRange, TaskContext, WorkerContext, WorkerId};

const HYBRID_WEIGHT_RANGE: (f64, f64) = (0.5, 1.0);
const HYBRID_MEAN_RANGE: (f64, f64) = (0.1, 0.9);
const HYBRID_SIGMA_RATIO: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub enum WorkerTruth {
    /// Piecewise-constant performance on a battery x location x task grid.
    Discrete {
        bins: usize,
        locations: usize,
        task_dims: usize,
        /// Row-major over (battery, location, task...).
        grid: Vec<f64>,
    },
    /// `q_max * w(location) * gauss(task; mu, sigma) * sqrt(battery)`, with the
    /// Gaussian scaled to peak at 1.
    Hybrid {
        weights: Vec<f64>,
        mu: f64,
        sigma: f64,
    },
}

impl WorkerTruth {
    pub fn locations(&self) -> usize {
        match self {
            WorkerTruth::Discrete { locations, .. } => *locations,
            WorkerTruth::Hybrid { weights, .. } => weights.len(),
        }
    }
}

/// Per-worker expected performance, fixed once sampled.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    workers: Vec<WorkerTruth>,
    quality: QualityRange,
}

fn axis_bin(value: f64, bins: usize) -> usize {
    ((value * bins as f64).floor() as usize).min(bins - 1)
}

impl GroundTruth {
    /// `locations[i]` is the number of distinct locations of worker `i`.
    pub fn sample(config: &EnvConfig, locations: &[usize], rng: &mut SimRng) -> Result<Self> {
        let q = config.quality;
        let workers = locations
            .iter()
            .map(|&l| {
                if l == 0 {
                    return Err(Error::param("locations", "every worker needs a location"));
                }
                Ok(match config.model {
                    ModelKind::Discrete => {
                        let cells = config.grid_bins.pow(1 + config.task_dims as u32) * l;
                        WorkerTruth::Discrete {
                            bins: config.grid_bins,
                            locations: l,
                            task_dims: config.task_dims,
                            grid: (0..cells)
                                .map(|_| rng.random_range(q.q_min..=q.q_max))
                                .collect(),
                        }
                    }
                    ModelKind::Hybrid => {
                        let weights = (0..l)
                            .map(|_| {
                                rng.random_range(HYBRID_WEIGHT_RANGE.0..=HYBRID_WEIGHT_RANGE.1)
                            })
                            .collect();
                        let mu = rng.random_range(HYBRID_MEAN_RANGE.0..=HYBRID_MEAN_RANGE.1);
                        WorkerTruth::Hybrid {
                            weights,
                            mu,
                            sigma: HYBRID_SIGMA_RATIO * mu,
                        }
                    }
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            workers,
            quality: q,
        })
    }

    pub fn from_parts(workers: Vec<WorkerTruth>, quality: QualityRange) -> Self {
        Self { workers, quality }
    }

    pub fn workers(&self) -> &[WorkerTruth] {
        &self.workers
    }

    pub fn quality(&self) -> QualityRange {
        self.quality
    }

    pub fn theta(&self, worker: WorkerId, joint: &[f64]) -> f64 {
        match &self.workers[worker.0] {
            WorkerTruth::Discrete {
                bins,
                locations,
                task_dims,
                grid,
            } => {
                debug_assert_eq!(joint.len(), 2 + task_dims);
                let mut idx = axis_bin(joint[0], *bins);
                idx = idx * locations + location_index(joint[1], *locations);
                for &c in &joint[2..] {
                    idx = idx * bins + axis_bin(c, *bins);
                }
                grid[idx]
            }
            WorkerTruth::Hybrid { weights, mu, sigma } => {
                let w = weights[location_index(joint[1], weights.len())];
                expected_performance_hybrid(self.quality.q_max, w, *mu, *sigma, joint[0], joint[2])
            }
        }
    }
}

impl PerformanceModel for GroundTruth {
    fn expected(
        &self,
        worker: WorkerId,
        worker_ctx: &WorkerContext,
        task_ctx: &TaskContext,
    ) -> f64 {
        let mut joint = [0.0; 8];
        let (w, c) = (worker_ctx.values(), task_ctx.values());
        let d = w.len() + c.len();
        if d <= joint.len() {
            joint[..w.len()].copy_from_slice(w);
            joint[w.len()..d].copy_from_slice(c);
            self.theta(worker, &joint[..d])
        } else {
            self.theta(worker, JointContext::join(worker_ctx, task_ctx).values())
        }
    }
}

/// Discrete-model lookup for a joint `(battery, location, task...)` context.
pub fn expected_performance_discrete(
    truth: &GroundTruth,
    worker: WorkerId,
    joint: &JointContext,
) -> Result<f64> {
    match truth.workers.get(worker.0) {
        Some(WorkerTruth::Discrete { task_dims, .. }) => {
            if joint.dim() != 2 + task_dims {
                return Err(Error::DimensionMismatch {
                    expected: 2 + task_dims,
                    actual: joint.dim(),
                });
            }
            Ok(truth.theta(worker, joint.values()))
        }
        Some(WorkerTruth::Hybrid { .. }) => {
            Err(Error::param("model", "worker uses the hybrid model"))
        }
        None => Err(Error::param("worker", format!("{worker} unknown"))),
    }
}

/// `q_max * weight * exp(-(c - mu)^2 / (2 sigma^2)) * sqrt(battery)`.
pub fn expected_performance_hybrid(
    q_max: f64,
    weight: f64,
    mu: f64,
    sigma: f64,
    battery: f64,
    task: f64,
) -> f64 {
    let z = (task - mu) / sigma;
    q_max * weight * (-0.5 * z * z).exp() * battery.sqrt()
}

/// Symmetric noise half-width `min(width, theta - q_min, q_max - theta)`, so the
/// noisy quality stays in range and remains unbiased.
pub fn noise_half_width(theta: f64, quality: QualityRange, width: f64) -> f64 {
    width
        .min(theta - quality.q_min)
        .min(quality.q_max - theta)
        .max(0.0)
}

/// Outcome for a pre-drawn noise value `u` in `[-1, 1]`. Every request is
/// accepted; the quality is `theta + delta * u`.
pub fn outcome_from_noise(theta: f64, u: f64, quality: QualityRange, width: f64) -> Outcome {
    let delta = noise_half_width(theta, quality, width);
    Outcome::completed((theta + delta * u).clamp(quality.q_min, quality.q_max))
}

pub fn sample_outcome(theta: f64, quality: QualityRange, width: f64, rng: &mut SimRng) -> Outcome {
    let u = rng.random_range(-1.0..=1.0);
    outcome_from_noise(theta, u, quality, width)
}
