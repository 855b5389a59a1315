use crate::error::{Error, Result};
use crate::policies::{Decision, Policy, PolicyKind, Requested, Round};
use crate::seed::SimRng;
use crate::types::{Outcome, WorkerId};

/// Uniformly random subset of `min(quota, available.len())` workers, in
/// ascending id order.
pub fn random_select(available: &[WorkerId], quota: usize, rng: &mut SimRng) -> Vec<WorkerId> {
    let k = quota.min(available.len());
    let mut picks = rand::seq::index::sample(rng, available.len(), k).into_vec();
    picks.sort_unstable();
    picks.into_iter().map(|i| available[i]).collect()
}

#[derive(Debug, Default)]
pub struct RandomPolicy {
    requested: Requested,
}

impl RandomPolicy {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Policy for RandomPolicy {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Random
    }

    fn select(&mut self, round: &Round<'_>, rng: &mut SimRng) -> Result<Decision> {
        if round.workers.is_empty() {
            return Err(Error::NoWorkersAvailable);
        }
        let decision = match round.select_all(true) {
            Some(all) => all,
            None => {
                let ids: Vec<_> = round.ids().collect();
                Decision::ranked(crate::types::Selection::from_ids(
                    random_select(&ids, round.quota, rng),
                    true,
                ))
            }
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
    use crate::seed::rng_from_seed;

    fn ids(n: usize) -> Vec<WorkerId> {
        (0..n).map(WorkerId).collect()
    }

    #[test]
    fn size_contract() {
        let mut rng = rng_from_seed(5);
        assert_eq!(random_select(&ids(3), 5, &mut rng), ids(3));
        let picks = random_select(&ids(10), 4, &mut rng);
        assert_eq!(picks.len(), 4);
        assert!(picks.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn replay_is_identical() {
        let a = random_select(&ids(50), 7, &mut rng_from_seed(11));
        let b = random_select(&ids(50), 7, &mut rng_from_seed(11));
        assert_eq!(a, b);
    }

    #[test]
    fn roughly_uniform() {
        let mut rng = rng_from_seed(2);
        let mut hits = [0u32; 10];
        for _ in 0..20_000 {
            for id in random_select(&ids(10), 3, &mut rng) {
                hits[id.0] += 1;
            }
        }
        // expected 6000 each
        assert!(hits.iter().all(|&h| (5600..6400).contains(&h)), "{hits:?}");
    }
}
