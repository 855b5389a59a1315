//! Disjoint LinUCB: one ridge model per worker on the raw joint context.
//!
//! `index_i = theta_i' x + lambda * sqrt(x' A_i^-1 x)` with `theta_i = A_i^-1 b_i`.
//! `A_i` starts at the identity; the inverse is maintained with
//! Sherman-Morrison rank-one updates.

use crate::error::{Error, Result};
use crate::policies::{top_k, Decision, Policy, PolicyKind, Requested, Round};
use crate::seed::SimRng;
use crate::types::{Outcome, Selection, WorkerId};

#[derive(Debug, Clone)]
pub struct RidgeArm {
    dim: usize,
    a: Vec<f64>,
    a_inv: Vec<f64>,
    b: Vec<f64>,
}

impl RidgeArm {
    pub fn new(dim: usize) -> Self {
        let mut a = vec![0.0; dim * dim];
        for i in 0..dim {
            a[i * dim + i] = 1.0;
        }
        Self {
            dim,
            a_inv: a.clone(),
            a,
            b: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Design matrix `A`, row-major.
    pub fn design(&self) -> &[f64] {
        &self.a
    }

    pub fn response(&self) -> &[f64] {
        &self.b
    }

    fn inv_times(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|r| {
                self.a_inv[r * self.dim..(r + 1) * self.dim]
                    .iter()
                    .zip(x)
                    .map(|(a, x)| a * x)
                    .sum()
            })
            .collect()
    }

    /// Ridge coefficients `A^-1 b`.
    pub fn coefficients(&self) -> Vec<f64> {
        self.inv_times(&self.b)
    }

    pub fn index(&self, x: &[f64], width: f64) -> f64 {
        let theta = self.coefficients();
        let mean: f64 = theta.iter().zip(x).map(|(t, x)| t * x).sum();
        let ax = self.inv_times(x);
        let quad: f64 = ax.iter().zip(x).map(|(a, x)| a * x).sum();
        mean + width * quad.max(0.0).sqrt()
    }

    pub fn update(&mut self, x: &[f64], p: f64) {
        let d = self.dim;
        for r in 0..d {
            for c in 0..d {
                self.a[r * d + c] += x[r] * x[c];
            }
            self.b[r] += p * x[r];
        }
        // (A + xx')^-1 = A^-1 - (A^-1 x)(x' A^-1) / (1 + x' A^-1 x), A^-1 symmetric
        let ax = self.inv_times(x);
        let denom = 1.0 + ax.iter().zip(x).map(|(a, x)| a * x).sum::<f64>();
        for r in 0..d {
            for c in 0..d {
                self.a_inv[r * d + c] -= ax[r] * ax[c] / denom;
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct LinUcb {
    width: f64,
    arms: Vec<RidgeArm>,
    requested: Requested,
}

impl LinUcb {
    /// `joint_dims[i]` is worker `i`'s joint context dimension `X_i + C`.
    pub fn new(joint_dims: &[usize], width: f64) -> Result<Self> {
        if !(width >= 0.0 && width.is_finite()) {
            return Err(Error::param(
                "lambda_linucb",
                format!("must be >= 0, got {width}"),
            ));
        }
        Ok(Self {
            width,
            arms: joint_dims.iter().map(|&d| RidgeArm::new(d)).collect(),
            requested: Requested::default(),
        })
    }

    pub fn arm(&self, worker: WorkerId) -> &RidgeArm {
        &self.arms[worker.0]
    }

    fn arm_checked(&self, worker: WorkerId, dim: usize) -> Result<&RidgeArm> {
        let arm = self
            .arms
            .get(worker.0)
            .ok_or_else(|| Error::param("worker", format!("{worker} has no model")))?;
        if arm.dim != dim {
            return Err(Error::DimensionMismatch {
                expected: arm.dim,
                actual: dim,
            });
        }
        Ok(arm)
    }
}

impl Policy for LinUcb {
    fn kind(&self) -> PolicyKind {
        PolicyKind::LinUcb
    }

    fn select(&mut self, round: &Round<'_>, _rng: &mut SimRng) -> Result<Decision> {
        if round.workers.is_empty() {
            return Err(Error::NoWorkersAvailable);
        }
        let decision = match round.select_all(true) {
            Some(all) => all,
            None => {
                let mut scored = Vec::with_capacity(round.workers.len());
                for w in round.workers {
                    let x = round.joint_context(w.id).expect("worker is available");
                    let arm = self.arm_checked(w.id, x.dim())?;
                    scored.push((w.id, arm.index(x.values(), self.width)));
                }
                Decision::ranked(Selection::from_ids(top_k(scored, round.quota), true))
            }
        };
        self.requested.set(&decision.selection);
        Ok(decision)
    }

    fn observe(&mut self, round: &Round<'_>, worker: WorkerId, outcome: Outcome) -> Result<()> {
        self.requested.check(worker)?;
        let x = round
            .joint_context(worker)
            .ok_or(Error::NotSelected(worker.number()))?;
        self.arm_checked(worker, x.dim())?;
        self.arms[worker.0].update(x.values(), outcome.performance());
        Ok(())
    }
}
