use rand::Rng;

use crate::error::{Error, Result};
use crate::policies::{
    random_select, top_k, ArmStats, Decision, Policy, PolicyKind, Requested, Round,
};
use crate::seed::SimRng;
use crate::types::{Outcome, Selection, WorkerId};

/// Random subset with probability `epsilon`, otherwise the best context-free
/// means. Unpulled workers rank above pulled ones.
#[derive(Debug, Clone)]
pub struct EpsGreedy {
    epsilon: f64,
    stats: Vec<ArmStats>,
    random_rounds: u64,
    requested: Requested,
}

impl EpsGreedy {
    pub fn new(workers: usize, epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::param(
                "epsilon",
                format!("must lie in [0, 1], got {epsilon}"),
            ));
        }
        Ok(Self {
            epsilon,
            stats: vec![ArmStats::default(); workers],
            random_rounds: 0,
            requested: Requested::default(),
        })
    }

    pub fn stats(&self) -> &[ArmStats] {
        &self.stats
    }

    /// Rounds in which the random branch was taken.
    pub fn random_rounds(&self) -> u64 {
        self.random_rounds
    }
}

impl Policy for EpsGreedy {
    fn kind(&self) -> PolicyKind {
        PolicyKind::EpsGreedy
    }

    fn select(&mut self, round: &Round<'_>, rng: &mut SimRng) -> Result<Decision> {
        if round.workers.is_empty() {
            return Err(Error::NoWorkersAvailable);
        }
        let decision = match round.select_all(true) {
            Some(all) => all,
            None if rng.random::<f64>() < self.epsilon => {
                self.random_rounds += 1;
                let ids: Vec<_> = round.ids().collect();
                Decision::ranked(Selection::from_ids(
                    random_select(&ids, round.quota, rng),
                    true,
                ))
            }
            None => {
                let scored = round
                    .ids()
                    .map(|id| {
                        let s = self.stats[id.0];
                        (id, if s.pulls == 0 { f64::INFINITY } else { s.mean })
                    })
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
