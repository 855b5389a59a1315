use std::collections::HashMap;
use std::sync::Arc;

use rand::distr::weighted::WeightedIndex;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::env::{gen_task, CheckinRecord, DataSource, EnvConfig, GroundTruth, WORKER_DIMS};
use crate::error::{Error, Result};
use crate::policies::AvailableWorker;
use crate::seed::{stream_rng, SimRng, Stream};
use crate::types::{Task, WorkerContext, WorkerId};

/// Context coordinate of location `index` out of `count`: the bin centre, so
/// each location falls into its own cell of a `count`-bin axis.
pub fn location_coordinate(index: usize, count: usize) -> f64 {
    (index as f64 + 0.5) / count as f64
}

pub fn location_index(coordinate: f64, count: usize) -> usize {
    ((coordinate * count as f64).floor() as usize).min(count - 1)
}

pub fn sample_worker_location_synthetic(weights: &WeightedIndex<f64>, rng: &mut SimRng) -> usize {
    weights.sample(rng)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoolUser {
    pub user_id: u64,
    /// Distinct visited locations, in order of first appearance.
    pub locations: Vec<u64>,
}

#[derive(Debug, Clone)]
pub enum WorkerPool {
    Synthetic {
        workers: usize,
        locations: usize,
        weights: WeightedIndex<f64>,
    },
    Checkin {
        users: Vec<PoolUser>,
        /// Reduced data set as (worker index, location index) pairs.
        records: Vec<(usize, usize)>,
    },
}

impl WorkerPool {
    pub fn synthetic(workers: usize, location_weights: &[f64]) -> Result<Self> {
        let weights = WeightedIndex::new(location_weights.iter().copied())
            .map_err(|e| Error::param("location_weights", e.to_string()))?;
        Ok(WorkerPool::Synthetic {
            workers,
            locations: location_weights.len(),
            weights,
        })
    }

    /// Picks `workers` distinct users uniformly without replacement and keeps
    /// only their check-ins.
    pub fn from_checkins(
        records: &[CheckinRecord],
        workers: usize,
        rng: &mut SimRng,
    ) -> Result<Self> {
        let mut user_ids: Vec<u64> = records.iter().map(|r| r.user_id).collect();
        user_ids.sort_unstable();
        user_ids.dedup();
        if user_ids.len() < workers {
            return Err(Error::InsufficientUsers {
                found: user_ids.len(),
                required: workers,
            });
        }
        let mut picks = rand::seq::index::sample(rng, user_ids.len(), workers).into_vec();
        picks.sort_unstable();
        let mut users: Vec<PoolUser> = picks
            .into_iter()
            .map(|i| PoolUser {
                user_id: user_ids[i],
                locations: Vec::new(),
            })
            .collect();
        let slot: HashMap<u64, usize> = users
            .iter()
            .enumerate()
            .map(|(i, u)| (u.user_id, i))
            .collect();
        let mut location_slots: Vec<HashMap<u64, usize>> = vec![HashMap::new(); workers];
        let mut reduced = Vec::new();
        for r in records {
            if let Some(&w) = slot.get(&r.user_id) {
                let next = location_slots[w].len();
                let loc = *location_slots[w].entry(r.location_id).or_insert_with(|| {
                    users[w].locations.push(r.location_id);
                    next
                });
                reduced.push((w, loc));
            }
        }
        Ok(WorkerPool::Checkin {
            users,
            records: reduced,
        })
    }

    pub fn workers(&self) -> usize {
        match self {
            WorkerPool::Synthetic { workers, .. } => *workers,
            WorkerPool::Checkin { users, .. } => users.len(),
        }
    }

    pub fn locations_per_worker(&self) -> Vec<usize> {
        match self {
            WorkerPool::Synthetic {
                workers, locations, ..
            } => vec![*locations; *workers],
            WorkerPool::Checkin { users, .. } => users.iter().map(|u| u.locations.len()).collect(),
        }
    }

    pub fn users(&self) -> Option<&[PoolUser]> {
        match self {
            WorkerPool::Checkin { users, .. } => Some(users),
            WorkerPool::Synthetic { .. } => None,
        }
    }
}

/// Draws the available workers for one task with their personal contexts
/// `(battery, location)`, in ascending id order. Never returns an empty set.
pub fn sample_availability(
    pool: &WorkerPool,
    rho: f64,
    rng: &mut SimRng,
) -> Result<Vec<AvailableWorker>> {
    let located: Vec<(usize, f64)> = match pool {
        WorkerPool::Synthetic {
            workers,
            locations,
            weights,
        } => {
            let ids = loop {
                let ids: Vec<usize> = (0..*workers)
                    .filter(|_| rng.random::<f64>() < rho)
                    .collect();
                if !ids.is_empty() {
                    break ids;
                }
            };
            ids.into_iter()
                .map(|w| {
                    let loc = sample_worker_location_synthetic(weights, rng);
                    (w, location_coordinate(loc, *locations))
                })
                .collect()
        }
        WorkerPool::Checkin { users, records } => {
            if records.is_empty() {
                return Err(Error::InsufficientUsers {
                    found: 0,
                    required: users.len(),
                });
            }
            let binomial = Binomial::new(users.len() as u64, rho)
                .map_err(|e| Error::param("rho", e.to_string()))?;
            let target = loop {
                let n = binomial.sample(rng) as usize;
                if n > 0 {
                    break n;
                }
            };
            let mut first_location: Vec<Option<usize>> = vec![None; users.len()];
            let mut found = 0;
            while found < target {
                let (w, loc) = records[rng.random_range(0..records.len())];
                if first_location[w].is_none() {
                    first_location[w] = Some(loc);
                    found += 1;
                }
            }
            first_location
                .into_iter()
                .enumerate()
                .filter_map(|(w, loc)| {
                    loc.map(|l| (w, location_coordinate(l, users[w].locations.len())))
                })
                .collect()
        }
    };
    located
        .into_iter()
        .map(|(w, location)| {
            let battery = rng.random::<f64>();
            Ok(AvailableWorker {
                id: WorkerId(w),
                context: WorkerContext::new(vec![battery, location])?,
            })
        })
        .collect()
}

/// Everything drawn for one task.
#[derive(Debug, Clone)]
pub struct RoundData {
    pub task: Task,
    pub quota: usize,
    pub workers: Vec<AvailableWorker>,
    /// Noise draw in `[-1, 1]` per available worker, aligned with `workers`.
    pub noise: Vec<f64>,
}

/// One seeded world. Arrivals and noise come from separate streams, so the
/// sequence of rounds does not depend on which policy is being evaluated.
#[derive(Debug)]
pub struct Environment {
    config: EnvConfig,
    truth: Arc<GroundTruth>,
    pool: WorkerPool,
    arrivals: SimRng,
    noise: SimRng,
    t: usize,
}

impl Environment {
    /// `checkins` must already be restricted to the bounding box; it is only
    /// used for the check-in data source.
    pub fn new(config: &EnvConfig, checkins: Option<&[CheckinRecord]>, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut world = stream_rng(seed, Stream::World);
        let pool = match config.source {
            DataSource::Synthetic => {
                WorkerPool::synthetic(config.workers, &config.location_weights)?
            }
            DataSource::Checkin => {
                let records = checkins.ok_or_else(|| {
                    Error::param(
                        "checkin_path",
                        "check-in records required for the checkin source",
                    )
                })?;
                WorkerPool::from_checkins(records, config.workers, &mut world)?
            }
        };
        let truth = GroundTruth::sample(config, &pool.locations_per_worker(), &mut world)?;
        Ok(Self {
            config: config.clone(),
            truth: Arc::new(truth),
            pool,
            arrivals: stream_rng(seed, Stream::Arrivals),
            noise: stream_rng(seed, Stream::Noise),
            t: 0,
        })
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn truth(&self) -> Arc<GroundTruth> {
        Arc::clone(&self.truth)
    }

    pub fn pool(&self) -> &WorkerPool {
        &self.pool
    }

    /// Personal context dimension of every worker.
    pub fn worker_dims(&self) -> Vec<usize> {
        vec![WORKER_DIMS; self.pool.workers()]
    }

    pub fn next_round(&mut self) -> Result<RoundData> {
        self.t += 1;
        let task = gen_task(self.t, &self.config, &mut self.arrivals)?;
        let quota = task.quota()?;
        let workers = sample_availability(&self.pool, self.config.rho, &mut self.arrivals)?;
        let noise = workers
            .iter()
            .map(|_| self.noise.random_range(-1.0..=1.0))
            .collect();
        Ok(RoundData {
            task,
            quota,
            workers,
            noise,
        })
    }
}
