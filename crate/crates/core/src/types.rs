//! Domain types shared by every module.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Worker index. Stored 0-based; displayed and emitted 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WorkerId(pub usize);

impl WorkerId {
    pub fn index(self) -> usize {
        self.0
    }

    /// 1-based number used in traces.
    pub fn number(self) -> usize {
        self.0 + 1
    }
}

impl fmt::Display for WorkerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w{}", self.number())
    }
}

fn check_unit_cube(values: &[f64]) -> Result<()> {
    for (index, &value) in values.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::CoordinateOutOfRange { index, value });
        }
    }
    Ok(())
}

macro_rules! unit_context {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        pub struct $name(Vec<f64>);

        impl $name {
            /// Every coordinate must lie in `[0, 1]`.
            pub fn new(values: Vec<f64>) -> Result<Self> {
                check_unit_cube(&values)?;
                Ok(Self(values))
            }

            pub fn values(&self) -> &[f64] {
                &self.0
            }

            pub fn dim(&self) -> usize {
                self.0.len()
            }
        }
    };
}

unit_context!(
    /// Task feature coordinates in `[0,1]^C`.
    TaskContext
);
unit_context!(
    /// A worker's private context in `[0,1]^X_i` (battery, location, ...).
    WorkerContext
);
unit_context!(
    /// Worker context followed by task context, dimension `X_i + C`.
    JointContext
);

impl JointContext {
    pub fn join(worker: &WorkerContext, task: &TaskContext) -> Self {
        let mut values = Vec::with_capacity(worker.dim() + task.dim());
        values.extend_from_slice(worker.values());
        values.extend_from_slice(task.values());
        Self(values)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    /// 1-based task index.
    pub id: usize,
    pub budget: f64,
    pub context: TaskContext,
    /// Price paid per requested worker.
    pub price: f64,
}

impl Task {
    pub fn quota(&self) -> Result<usize> {
        compute_worker_quota(self.budget, self.price)
    }
}

/// Maximum number of workers a task budget pays for: `floor(budget / price)`.
pub fn compute_worker_quota(budget: f64, price: f64) -> Result<usize> {
    if !(price.is_finite() && price > 0.0) {
        return Err(Error::param(
            "price",
            format!("must be positive, got {price}"),
        ));
    }
    if !budget.is_finite() {
        return Err(Error::param("budget", "must be finite"));
    }
    if budget < price {
        return Err(Error::BudgetBelowPrice { budget, price });
    }
    Ok((budget / price).floor() as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityRange {
    pub q_min: f64,
    pub q_max: f64,
}

impl QualityRange {
    pub fn new(q_min: f64, q_max: f64) -> Result<Self> {
        if !(q_min >= 0.0 && q_max >= q_min && q_max.is_finite()) {
            return Err(Error::param(
                "quality range",
                format!("need 0 <= q_min <= q_max, got [{q_min}, {q_max}]"),
            ));
        }
        Ok(Self { q_min, q_max })
    }

    pub fn contains(&self, quality: f64) -> bool {
        (self.q_min..=self.q_max).contains(&quality)
    }
}

impl Default for QualityRange {
    fn default() -> Self {
        Self {
            q_min: 0.0,
            q_max: 5.0,
        }
    }
}

/// A worker's response to a request: the accept/decline decision and, when
/// accepted, the quality of the completed task.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub accepted: bool,
    pub quality: Option<f64>,
}

impl Outcome {
    pub fn completed(quality: f64) -> Self {
        Self {
            accepted: true,
            quality: Some(quality),
        }
    }

    pub fn declined() -> Self {
        Self {
            accepted: false,
            quality: None,
        }
    }

    /// Observed performance: the quality if accepted, otherwise 0.
    pub fn performance(&self) -> f64 {
        match (self.accepted, self.quality) {
            (true, Some(q)) => q,
            _ => 0.0,
        }
    }
}

/// One selected worker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Selected {
    pub worker: WorkerId,
    /// A quality assessment is requested for this worker. For the hierarchical
    /// learner this is set exactly when the worker reported EXPLORE; the
    /// baselines observe every request and always set it.
    pub explored: bool,
}

/// Workers requested for one task, in selection order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub workers: Vec<Selected>,
}

impl Selection {
    pub fn new(workers: Vec<Selected>) -> Self {
        Self { workers }
    }

    pub fn from_ids(ids: impl IntoIterator<Item = WorkerId>, explored: bool) -> Self {
        Self {
            workers: ids
                .into_iter()
                .map(|worker| Selected { worker, explored })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.workers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.workers.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = WorkerId> + '_ {
        self.workers.iter().map(|s| s.worker)
    }

    pub fn contains(&self, worker: WorkerId) -> bool {
        self.workers.iter().any(|s| s.worker == worker)
    }

    /// Selected ids in ascending order, convenient for set comparisons.
    pub fn sorted_ids(&self) -> Vec<WorkerId> {
        let mut ids: Vec<_> = self.ids().collect();
        ids.sort_unstable();
        ids
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn quota_examples() {
        assert_eq!(compute_worker_quota(0.75, 0.75).unwrap(), 1);
        assert_eq!(compute_worker_quota(20.0, 0.75).unwrap(), 26);
        assert_eq!(compute_worker_quota(20.0, 1.0).unwrap(), 20);
    }

    #[test]
    fn quota_rejects_budget_below_price() {
        assert!(matches!(
            compute_worker_quota(0.5, 0.75),
            Err(Error::BudgetBelowPrice { .. })
        ));
        assert!(compute_worker_quota(1.0, 0.0).is_err());
    }

    #[test]
    fn contexts_reject_out_of_range() {
        assert!(TaskContext::new(vec![0.0, 1.0]).is_ok());
        assert!(matches!(
            WorkerContext::new(vec![0.2, 1.01]),
            Err(Error::CoordinateOutOfRange { index: 1, .. })
        ));
        let joint = JointContext::join(
            &WorkerContext::new(vec![0.1, 0.2]).unwrap(),
            &TaskContext::new(vec![0.3]).unwrap(),
        );
        assert_eq!(joint.values(), &[0.1, 0.2, 0.3]);
    }

    #[test]
    fn worker_ids_print_one_based() {
        assert_eq!(WorkerId(0).to_string(), "w1");
        assert_eq!(WorkerId(6).number(), 7);
    }

    proptest! {
        #[test]
        fn quota_is_monotone(price in 0.1f64..5.0, b1 in 0.0f64..100.0, b2 in 0.0f64..100.0) {
            let (lo, hi) = if b1 <= b2 { (b1, b2) } else { (b2, b1) };
            let (lo, hi) = (lo + price, hi + price);
            prop_assert!(compute_worker_quota(lo, price).unwrap() <= compute_worker_quota(hi, price).unwrap());
        }

        #[test]
        fn quota_non_increasing_in_price(budget in 5.0f64..100.0, p1 in 0.1f64..5.0, p2 in 0.1f64..5.0) {
            let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
            prop_assert!(compute_worker_quota(budget, lo).unwrap() >= compute_worker_quota(budget, hi).unwrap());
        }

        #[test]
        fn quota_brackets_budget(budget in 1.0f64..100.0, price in 0.1f64..1.0) {
            let m = compute_worker_quota(budget, price).unwrap() as f64;
            prop_assert!(m * price <= budget + 1e-9);
            prop_assert!(budget < (m + 1.0) * price);
        }
    }
}
