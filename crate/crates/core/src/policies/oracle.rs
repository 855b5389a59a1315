use std::sync::Arc;

use crate::env::PerformanceModel;
use crate::error::{Error, Result};
use crate::policies::{top_k, Decision, Policy, PolicyKind, Requested, Round};
use crate::seed::SimRng;
use crate::types::{Outcome, Selection, WorkerId};

/// The `min(m_t, W_t)` available workers with the largest true expected
/// performance; ties go to the smaller index.
pub fn oracle_select<M: PerformanceModel + ?Sized>(
    model: &M,
    round: &Round<'_>,
) -> Result<Selection> {
    if round.workers.is_empty() {
        return Err(Error::NoWorkersAvailable);
    }
    let scored = round
        .workers
        .iter()
        .map(|w| (w.id, model.expected(w.id, &w.context, &round.task.context)))
        .collect();
    Ok(Selection::from_ids(
        top_k(scored, round.selection_size()),
        true,
    ))
}

/// Centralized oracle with a priori knowledge of every expected performance.
pub struct Oracle {
    model: Arc<dyn PerformanceModel>,
    requested: Requested,
}

impl Oracle {
    pub fn new(model: Arc<dyn PerformanceModel>) -> Self {
        Self {
            model,
            requested: Requested::default(),
        }
    }
}

impl Policy for Oracle {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Oracle
    }

    fn select(&mut self, round: &Round<'_>, _rng: &mut SimRng) -> Result<Decision> {
        let decision = match round.select_all(true) {
            Some(all) => all,
            None => Decision::ranked(oracle_select(self.model.as_ref(), round)?),
        };
        self.requested.set(&decision.selection);
        Ok(decision)
    }

    fn observe(&mut self, _round: &Round<'_>, worker: WorkerId, _outcome: Outcome) -> Result<()> {
        self.requested.check(worker)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policies::AvailableWorker;
    use crate::types::{Task, TaskContext, WorkerContext};

    /// Looks up a fixed value per worker.
    struct Table(Vec<f64>);

    impl PerformanceModel for Table {
        fn expected(&self, worker: WorkerId, _: &WorkerContext, _: &TaskContext) -> f64 {
            self.0[worker.0]
        }
    }

    fn task() -> Task {
        Task {
            id: 1,
            budget: 2.0,
            context: TaskContext::new(vec![0.5]).unwrap(),
            price: 1.0,
        }
    }

    fn workers(n: usize) -> Vec<AvailableWorker> {
        (0..n)
            .map(|i| AvailableWorker {
                id: WorkerId(i),
                context: WorkerContext::new(vec![0.5, 0.5]).unwrap(),
            })
            .collect()
    }

    #[test]
    fn picks_top_theta() {
        let task = task();
        let workers = workers(3);
        let round = Round {
            t: 1,
            task: &task,
            quota: 2,
            workers: &workers,
        };
        let sel = oracle_select(&Table(vec![4.0, 1.0, 3.0]), &round).unwrap();
        assert_eq!(sel.sorted_ids(), vec![WorkerId(0), WorkerId(2)]);
    }

    #[test]
    fn quota_above_supply_takes_all() {
        let task = task();
        let workers = workers(3);
        let round = Round {
            t: 1,
            task: &task,
            quota: 7,
            workers: &workers,
        };
        let sel = oracle_select(&Table(vec![4.0, 1.0, 3.0]), &round).unwrap();
        assert_eq!(sel.len(), 3);
        let empty = Round {
            t: 1,
            task: &task,
            quota: 7,
            workers: &[],
        };
        assert!(oracle_select(&Table(vec![]), &empty).is_err());
    }

    #[test]
    fn scale_invariant() {
        let task = task();
        let workers = workers(6);
        let round = Round {
            t: 1,
            task: &task,
            quota: 3,
            workers: &workers,
        };
        let theta = vec![0.3, 2.2, 4.1, 0.9, 4.1, 1.7];
        let scaled: Vec<f64> = theta.iter().map(|v| v * 3.7).collect();
        assert_eq!(
            oracle_select(&Table(theta), &round).unwrap(),
            oracle_select(&Table(scaled), &round).unwrap()
        );
    }
}
