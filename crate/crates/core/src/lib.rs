//! Context-aware hierarchical online learning for crowdsourced task assignment.
//!
//! A mobile crowdsourcing platform (the MCSP) receives a stream of tasks, each
//! with a budget and a task context. For every task it must pick a subset of the
//! currently available workers whose performance depends on both the task
//! context and the worker's private context (battery state, location, ...).
//!
//! The crate is organised bottom-up:
//!
//! - [`types`]: shared value types and the budget-to-quota rule.
//! - [`partition`]: uniform hypercube partitions of `[0,1]^D`.
//! - [`hcl`]: the hierarchical learner, split into per-worker local controllers
//!   and the central selection step, connected by explicit messages.
//! - [`policies`]: the oracle benchmark and the reference baselines.
//! - [`env`]: task generation, worker availability and the ground-truth
//!   performance models, including the check-in data loader.
//! - [`sim`]: the per-instance engine, run traces and metrics.
//! - [`bounds`]: closed-form storage, assessment and regret guarantees.
//! - [`experiment`]: experiment grids, seed derivation and output files.

pub mod bounds;
pub mod env;
pub mod error;
pub mod experiment;
pub mod hcl;
pub mod partition;
pub mod policies;
pub mod seed;
pub mod sim;
pub mod types;

pub use error::{Error, Result};
pub use types::{
    compute_worker_quota, JointContext, Outcome, QualityRange, Selected, Selection, Task,
    TaskContext, WorkerContext, WorkerId,
};
