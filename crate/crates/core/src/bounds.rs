//! Closed-form guarantees of the hierarchical learner, for cross-checking
//! simulations. All logarithms are natural.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::check_alpha;

/// Inputs of the regret bound. `dims[i]` is the joint context dimension of
/// worker `i`, so `dims.len()` must equal `workers`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub horizon: usize,
    pub workers: usize,
    pub q_max: f64,
    pub alpha: f64,
    /// Hölder constant `L`.
    pub lipschitz: f64,
    pub dims: Vec<usize>,
}

impl BoundInputs {
    /// Suggested smoothness when nothing better is known: `L = 5`, `alpha = 1`.
    /// These are not measured properties of any data set.
    pub const DEFAULT_LIPSCHITZ: f64 = 5.0;
    pub const DEFAULT_ALPHA: f64 = 1.0;

    /// Every worker with the same dimension `dim`.
    pub fn uniform(
        horizon: usize,
        workers: usize,
        dim: usize,
        q_max: f64,
        alpha: f64,
        lipschitz: f64,
    ) -> Self {
        Self {
            horizon,
            workers,
            q_max,
            alpha,
            lipschitz,
            dims: vec![dim; workers],
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_horizon(self.horizon)?;
        check_alpha(self.alpha)?;
        if self.workers == 0 {
            return Err(Error::param("workers", "must be at least 1"));
        }
        if self.dims.len() != self.workers {
            return Err(Error::DimensionMismatch {
                expected: self.workers,
                actual: self.dims.len(),
            });
        }
        if self.dims.contains(&0) {
            return Err(Error::param("dims", "every dimension must be at least 1"));
        }
        if !(self.q_max > 0.0 && self.q_max.is_finite()) {
            return Err(Error::param("q_max", "must be positive"));
        }
        if !(self.lipschitz > 0.0 && self.lipschitz.is_finite()) {
            return Err(Error::param("lipschitz", "must be positive"));
        }
        Ok(())
    }
}

fn check_horizon(horizon: usize) -> Result<()> {
    if horizon == 0 {
        Err(Error::param("horizon", "must be at least 1"))
    } else {
        Ok(())
    }
}

/// The four summands of the regret bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegretTerms {
    /// Exploration phases.
    pub exploration: f64,
    /// Exploitation with well-estimated workers.
    pub exploitation: f64,
    /// Exploitation with badly estimated workers.
    pub estimation: f64,
    /// Context-cell discretisation.
    pub smoothness: f64,
}

impl RegretTerms {
    pub fn total(&self) -> f64 {
        self.exploration + self.exploitation + self.estimation + self.smoothness
    }
}

pub fn regret_terms(inputs: &BoundInputs) -> Result<RegretTerms> {
    inputs.validate()?;
    let t = inputs.horizon as f64;
    let a = inputs.alpha;
    let w = inputs.workers as f64;
    let mut terms = RegretTerms {
        exploration: 0.0,
        exploitation: 0.0,
        estimation: inputs.q_max * w * w * std::f64::consts::PI.powi(2) / 3.0,
        smoothness: 0.0,
    };
    for &d in &inputs.dims {
        let d = d as f64;
        let lead = (2.0 * a + d) / (3.0 * a + d);
        let t_lead = t.powf(lead);
        terms.exploration += 2f64.powf(d) * (t.ln() * t_lead + t.powf(d / (3.0 * a + d)));
        terms.exploitation += 2.0 * inputs.q_max / lead * t_lead;
        terms.smoothness += 2.0 * inputs.lipschitz * d.powf(a / 2.0) * t_lead;
    }
    terms.exploration *= inputs.q_max * w;
    Ok(terms)
}

/// Upper bound on the expected regret after `T` tasks.
pub fn regret_bound(inputs: &BoundInputs) -> Result<f64> {
    Ok(regret_terms(inputs)?.total())
}

/// Upper bound on the number of quality assessments of one worker with
/// joint dimension `dim`: `(1 + T^(1/(3a+D)))^D * (1 + ln T * T^(2a/(3a+D)))`.
pub fn assessment_bound(horizon: usize, alpha: f64, dim: usize) -> Result<f64> {
    assessment_bound_scaled(horizon, alpha, dim, 1.0)
}

/// As [`assessment_bound`] with the control-function factor `f` applied to
/// the `ln T * T^(2a/(3a+D))` term.
pub fn assessment_bound_scaled(horizon: usize, alpha: f64, dim: usize, factor: f64) -> Result<f64> {
    check_horizon(horizon)?;
    check_alpha(alpha)?;
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(Error::param("exploration_factor", "must be positive"));
    }
    let t = horizon as f64;
    let d = dim as f64;
    let cells = (1.0 + t.powf(1.0 / (3.0 * alpha + d))).powf(d);
    Ok(cells * (1.0 + factor * t.ln() * t.powf(2.0 * alpha / (3.0 * alpha + d))))
}

/// Upper bound on the number of stored scalars of one local controller:
/// `2 * (1 + T^(1/(3a+D)))^D`.
pub fn storage_bound(horizon: usize, alpha: f64, dim: usize) -> Result<f64> {
    check_horizon(horizon)?;
    check_alpha(alpha)?;
    let d = dim as f64;
    Ok(2.0 * (1.0 + (horizon as f64).powf(1.0 / (3.0 * alpha + d))).powf(d))
}

/// Bound `1 + (T^(1-p) - 1) / (1 - p)` on the partial sums of `1/t^p`.
pub fn dirichlet_partial_bound(p: f64, horizon: usize) -> Result<f64> {
    check_horizon(horizon)?;
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::param("p", format!("must be positive, got {p}")));
    }
    if p == 1.0 {
        return Err(Error::param("p", "the bound is undefined for p = 1"));
    }
    Ok(1.0 + ((horizon as f64).powf(1.0 - p) - 1.0) / (1.0 - p))
}
