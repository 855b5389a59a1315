//! Worker selection policies behind one interface.
//!
//! Every policy sees the same [`Round`]: the task, its quota `m_t` and the
//! available workers with their private contexts. It returns a [`Decision`]
//! and is then told the outcome of each worker it requested. When the quota
//! covers every available worker, all policies select everyone.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hcl::McspPhase;
use crate::seed::SimRng;
use crate::types::{JointContext, Outcome, Selection, Task, WorkerContext, WorkerId};

mod auer;
mod eps_greedy;
mod linucb;
mod myopic;
mod oracle;
mod random;

pub use auer::Auer;
pub use eps_greedy::EpsGreedy;
pub use linucb::LinUcb;
pub use myopic::{LastInteraction, Myopic};
pub use oracle::{oracle_select, Oracle};
pub use random::{random_select, RandomPolicy};

#[derive(Debug, Clone, PartialEq)]
pub struct AvailableWorker {
    pub id: WorkerId,
    pub context: WorkerContext,
}

/// Everything a policy may look at when selecting workers for one task.
#[derive(Debug, Clone, Copy)]
pub struct Round<'a> {
    /// 1-based task index.
    pub t: usize,
    pub task: &'a Task,
    /// `m_t`, the number of workers the budget pays for.
    pub quota: usize,
    /// Available workers in ascending id order.
    pub workers: &'a [AvailableWorker],
}

impl<'a> Round<'a> {
    pub fn available(&self) -> usize {
        self.workers.len()
    }

    /// `min(m_t, W_t)`.
    pub fn selection_size(&self) -> usize {
        self.quota.min(self.workers.len())
    }

    pub fn ids(&self) -> impl Iterator<Item = WorkerId> + 'a {
        self.workers.iter().map(|w| w.id)
    }

    pub fn worker_context(&self, id: WorkerId) -> Option<&'a WorkerContext> {
        self.workers.iter().find(|w| w.id == id).map(|w| &w.context)
    }

    pub fn joint_context(&self, id: WorkerId) -> Option<JointContext> {
        self.worker_context(id)
            .map(|ctx| JointContext::join(ctx, &self.task.context))
    }

    /// Selects everyone when the quota covers all available workers.
    pub(crate) fn select_all(&self, explored: bool) -> Option<Decision> {
        (self.workers.len() <= self.quota).then(|| Decision {
            selection: Selection::from_ids(self.ids(), explored),
            phase: Some(McspPhase::SelectAll),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub selection: Selection,
    /// Selection phase when the policy distinguishes them.
    pub phase: Option<McspPhase>,
}

impl Decision {
    pub(crate) fn ranked(selection: Selection) -> Self {
        Self {
            selection,
            phase: None,
        }
    }
}

pub trait Policy: Send {
    fn kind(&self) -> PolicyKind;

    fn select(&mut self, round: &Round<'_>, rng: &mut SimRng) -> Result<Decision>;

    /// Feedback for one worker of the last selection.
    fn observe(&mut self, round: &Round<'_>, worker: WorkerId, outcome: Outcome) -> Result<()>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    Hcl,
    Oracle,
    LinUcb,
    Auer,
    EpsGreedy,
    Myopic,
    Random,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 7] = [
        PolicyKind::Hcl,
        PolicyKind::Oracle,
        PolicyKind::LinUcb,
        PolicyKind::Auer,
        PolicyKind::EpsGreedy,
        PolicyKind::Myopic,
        PolicyKind::Random,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            PolicyKind::Hcl => "hcl",
            PolicyKind::Oracle => "oracle",
            PolicyKind::LinUcb => "linucb",
            PolicyKind::Auer => "auer",
            PolicyKind::EpsGreedy => "epsgreedy",
            PolicyKind::Myopic => "myopic",
            PolicyKind::Random => "random",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.tag() == lower)
            .ok_or_else(|| Error::UnknownPolicy(s.to_string()))
    }
}

/// The `k` highest-scoring workers; ties go to the smaller worker index.
/// `+inf` scores rank above every finite score.
pub fn top_k(mut scored: Vec<(WorkerId, f64)>, k: usize) -> Vec<WorkerId> {
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.into_iter().take(k).map(|(id, _)| id).collect()
}

/// Tracks which workers were requested in the current round so feedback for
/// anyone else can be rejected.
#[derive(Debug, Clone, Default)]
pub(crate) struct Requested {
    flags: Vec<bool>,
    ids: Vec<WorkerId>,
}

impl Requested {
    pub(crate) fn set(&mut self, selection: &Selection) {
        for id in self.ids.drain(..) {
            self.flags[id.0] = false;
        }
        for id in selection.ids() {
            if id.0 >= self.flags.len() {
                self.flags.resize(id.0 + 1, false);
            }
            self.flags[id.0] = true;
            self.ids.push(id);
        }
    }

    pub(crate) fn check(&self, worker: WorkerId) -> Result<()> {
        if self.flags.get(worker.0).copied().unwrap_or(false) {
            Ok(())
        } else {
            Err(Error::NotSelected(worker.number()))
        }
    }
}

/// Running mean and pull count used by the context-free baselines.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ArmStats {
    pub mean: f64,
    pub pulls: u64,
}

impl ArmStats {
    pub fn update(&mut self, p: f64) {
        self.pulls += 1;
        self.mean += (p - self.mean) / self.pulls as f64;
    }
}
