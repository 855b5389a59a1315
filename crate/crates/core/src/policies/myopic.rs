use crate::error::{Error, Result};
use crate::policies::{random_select, top_k, Decision, Policy, PolicyKind, Requested, Round};
use crate::seed::SimRng;
use crate::types::{Outcome, Selection, WorkerId};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LastInteraction {
    /// Whether the most recent request was accepted.
    pub accepted: bool,
    /// Performance in the most recently completed task.
    pub last_completed: Option<f64>,
}

/// Learns only from the last interaction with each worker.
#[derive(Debug, Clone)]
pub struct Myopic {
    last: Vec<Option<LastInteraction>>,
    requested: Requested,
}

impl Myopic {
    pub fn new(workers: usize) -> Self {
        Self {
            last: vec![None; workers],
            requested: Requested::default(),
        }
    }

    pub fn last_interaction(&self, worker: WorkerId) -> Option<LastInteraction> {
        self.last[worker.0]
    }
}

impl Policy for Myopic {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Myopic
    }

    fn select(&mut self, round: &Round<'_>, rng: &mut SimRng) -> Result<Decision> {
        if round.workers.is_empty() {
            return Err(Error::NoWorkersAvailable);
        }
        let decision = match round.select_all(true) {
            Some(all) => all,
            None => {
                let mut acceptors = Vec::new();
                let mut others = Vec::new();
                for id in round.ids() {
                    match self.last[id.0] {
                        Some(LastInteraction {
                            accepted: true,
                            last_completed: Some(p),
                        }) => acceptors.push((id, p)),
                        _ => others.push(id),
                    }
                }
                let mut chosen = top_k(acceptors, round.quota);
                let missing = round.quota - chosen.len();
                chosen.extend(random_select(&others, missing, rng));
                Decision::ranked(Selection::from_ids(chosen, true))
            }
        };
        self.requested.set(&decision.selection);
        Ok(decision)
    }

    fn observe(&mut self, _round: &Round<'_>, worker: WorkerId, outcome: Outcome) -> Result<()> {
        self.requested.check(worker)?;
        let previous = self.last[worker.0].and_then(|l| l.last_completed);
        self.last[worker.0] = Some(LastInteraction {
            accepted: outcome.accepted,
            last_completed: if outcome.accepted {
                Some(outcome.performance())
            } else {
                previous
            },
        });
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policies::AvailableWorker;
    use crate::seed::rng_from_seed;
    use crate::types::{Task, TaskContext, WorkerContext};

    fn setup(n: usize) -> (Task, Vec<AvailableWorker>) {
        let task = Task {
            id: 1,
            budget: 1.0,
            context: TaskContext::new(vec![0.5]).unwrap(),
            price: 1.0,
        };
        let workers = (0..n)
            .map(|i| AvailableWorker {
                id: WorkerId(i),
                context: WorkerContext::new(vec![0.1, 0.1]).unwrap(),
            })
            .collect();
        (task, workers)
    }

    fn remember(m: &mut Myopic, id: usize, p: f64) {
        m.last[id] = Some(LastInteraction {
            accepted: true,
            last_completed: Some(p),
        });
    }

    #[test]
    fn cold_start_is_random() {
        let (task, workers) = setup(6);
        let round = Round {
            t: 1,
            task: &task,
            quota: 3,
            workers: &workers,
        };
        let a = Myopic::new(6)
            .select(&round, &mut rng_from_seed(1))
            .unwrap();
        let b = Myopic::new(6)
            .select(&round, &mut rng_from_seed(1))
            .unwrap();
        assert_eq!(a.selection.len(), 3);
        assert_eq!(a, b);
    }

    #[test]
    fn ranks_past_acceptors() {
        let (task, workers) = setup(5);
        let mut m = Myopic::new(5);
        remember(&mut m, 0, 4.0);
        remember(&mut m, 1, 2.0);
        remember(&mut m, 2, 3.0);
        let round = Round {
            t: 2,
            task: &task,
            quota: 2,
            workers: &workers,
        };
        let d = m.select(&round, &mut rng_from_seed(0)).unwrap();
        assert_eq!(
            d.selection.ids().collect::<Vec<_>>(),
            vec![WorkerId(0), WorkerId(2)]
        );
    }

    #[test]
    fn fills_with_random_others() {
        let (task, workers) = setup(5);
        let mut m = Myopic::new(5);
        remember(&mut m, 3, 1.0);
        let round = Round {
            t: 2,
            task: &task,
            quota: 3,
            workers: &workers,
        };
        let d = m.select(&round, &mut rng_from_seed(0)).unwrap();
        let ids: Vec<_> = d.selection.ids().collect();
        assert_eq!(ids.len(), 3);
        assert_eq!(ids[0], WorkerId(3));
        assert!(!ids[1..].contains(&WorkerId(3)));
    }

    #[test]
    fn observe_overwrites_record() {
        let (task, workers) = setup(5);
        let mut m = Myopic::new(5);
        let round = Round {
            t: 1,
            task: &task,
            quota: 5,
            workers: &workers,
        };
        m.select(&round, &mut rng_from_seed(0)).unwrap();
        m.observe(&round, WorkerId(1), Outcome::completed(3.7))
            .unwrap();
        assert_eq!(
            m.last_interaction(WorkerId(1)),
            Some(LastInteraction {
                accepted: true,
                last_completed: Some(3.7)
            })
        );
        m.observe(&round, WorkerId(1), Outcome::declined()).unwrap();
        assert_eq!(
            m.last_interaction(WorkerId(1)),
            Some(LastInteraction {
                accepted: false,
                last_completed: Some(3.7)
            })
        );
    }
}
