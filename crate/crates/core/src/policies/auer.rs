//! Context-free UCB for sleeping arms.

use crate::error::{Error, Result};
use crate::policies::{top_k, ArmStats, Decision, Policy, PolicyKind, Requested, Round};
use crate::seed::SimRng;
use crate::types::{Outcome, Selection, WorkerId};

/// `mean + width * sqrt(2 ln t / pulls)`; unpulled arms score `+inf`.
pub fn auer_index(stats: ArmStats, ln_t: f64, width: f64) -> f64 {
    if stats.pulls == 0 {
        f64::INFINITY
    } else {
        stats.mean + width * (2.0 * ln_t / stats.pulls as f64).sqrt()
    }
}

#[derive(Debug, Clone)]
pub struct Auer {
    width: f64,
    stats: Vec<ArmStats>,
    requested: Requested,
}

impl Auer {
    pub fn new(workers: usize, width: f64) -> Result<Self> {
        if !(width >= 0.0 && width.is_finite()) {
            return Err(Error::param(
                "lambda_auer",
                format!("must be >= 0, got {width}"),
            ));
        }
        Ok(Self {
            width,
            stats: vec![ArmStats::default(); workers],
            requested: Requested::default(),
        })
    }

    pub fn stats(&self) -> &[ArmStats] {
        &self.stats
    }
}

impl Policy for Auer {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Auer
    }

    fn select(&mut self, round: &Round<'_>, _rng: &mut SimRng) -> Result<Decision> {
        if round.workers.is_empty() {
            return Err(Error::NoWorkersAvailable);
        }
        let decision = match round.select_all(true) {
            Some(all) => all,
            None => {
                let ln_t = (round.t as f64).ln();
                let scored = round
                    .ids()
                    .map(|id| (id, auer_index(self.stats[id.0], ln_t, self.width)))
                    .collect();
                Decision::ranked(Selection::from_ids(top_k(scored, round.quota), true))
            }
        };
        self.requested.set(&decision.selection);
        Ok(decision)
    }

    fn observe(&mut self, _round: &Round<'_>, worker: WorkerId, outcome: Outcome) -> Result<()> {
        self.requested.check(worker)?;
        self.stats[worker.0].update(outcome.performance());
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policies::AvailableWorker;
    use crate::seed::rng_from_seed;
    use crate::types::{Task, TaskContext, WorkerContext};

    #[test]
    fn index_by_hand() {
        let stats = ArmStats {
            mean: 2.0,
            pulls: 8,
        };
        assert!((auer_index(stats, 4.0, 0.5) - 2.5).abs() < 1e-12);
        assert_eq!(auer_index(stats, 4.6, 0.0), 2.0);
        assert_eq!(auer_index(ArmStats::default(), 1.1, 0.5), f64::INFINITY);
    }

    #[test]
    fn unpulled_workers_go_first_by_index() {
        let task = Task {
            id: 1,
            budget: 2.0,
            context: TaskContext::new(vec![0.5]).unwrap(),
            price: 1.0,
        };
        let workers: Vec<_> = (0..5)
            .map(|i| AvailableWorker {
                id: WorkerId(i),
                context: WorkerContext::new(vec![0.1, 0.1]).unwrap(),
            })
            .collect();
        let round = Round {
            t: 1,
            task: &task,
            quota: 2,
            workers: &workers,
        };
        let mut auer = Auer::new(5, 0.5).unwrap();
        let d = auer.select(&round, &mut rng_from_seed(0)).unwrap();
        assert_eq!(d.selection.sorted_ids(), vec![WorkerId(0), WorkerId(1)]);
        auer.observe(&round, WorkerId(0), Outcome::completed(4.0))
            .unwrap();
        assert_eq!(
            auer.stats()[0],
            ArmStats {
                mean: 4.0,
                pulls: 1
            }
        );
        assert!(matches!(
            auer.observe(&round, WorkerId(3), Outcome::completed(1.0)),
            Err(Error::NotSelected(4))
        ));
    }
}
