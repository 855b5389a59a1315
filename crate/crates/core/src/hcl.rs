//! Hierarchical context-aware learning.
//!
//! Each worker runs a local controller ([`LcState`]) that partitions its joint
//! context space into hypercubes and keeps, per cell, a counter of exploration
//! observations and the running mean of observed performance. For every task
//! the controller either reports its estimate or asks to be explored. The
//! platform ([`mcsp_select`]) never sees worker contexts: it selects from the
//! messages alone.
//!
//! Only explored selections trigger a quality assessment, so the number of
//! (costly) assessments per worker grows sublinearly in the horizon.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{check_alpha, CellId, UniformPartition};
use crate::policies::{top_k, Decision, Policy, PolicyKind, Round};
use crate::seed::SimRng;
use crate::types::{
    Outcome, QualityRange, Selected, Selection, TaskContext, WorkerContext, WorkerId,
};

/// Exploration threshold `K(t) = f * t^(2a/(3a+D)) * ln(t)`.
pub fn control_threshold(t: usize, alpha: f64, dim: usize, factor: f64) -> Result<f64> {
    if t == 0 {
        return Err(Error::param("t", "must be at least 1"));
    }
    if !(factor > 0.0 && factor <= 1.0) {
        return Err(Error::param(
            "exploration_factor",
            format!("must lie in (0, 1], got {factor}"),
        ));
    }
    check_alpha(alpha)?;
    let t = t as f64;
    let exponent = 2.0 * alpha / (3.0 * alpha + dim as f64);
    Ok(factor * t.powf(exponent) * t.ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlParams {
    /// Hölder exponent used to size the partition and the threshold.
    pub alpha: f64,
    /// Factor `f` in `(0, 1]` scaling the control function.
    pub exploration_factor: f64,
    /// Number of tasks `T`.
    pub horizon: usize,
}

impl ControlParams {
    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if self.horizon == 0 {
            return Err(Error::param("horizon", "must be at least 1"));
        }
        if !(self.exploration_factor > 0.0 && self.exploration_factor <= 1.0) {
            return Err(Error::param(
                "exploration_factor",
                format!("must lie in (0, 1], got {}", self.exploration_factor),
            ));
        }
        Ok(())
    }
}

impl Default for ControlParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            exploration_factor: 0.003,
            horizon: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Report {
    Estimate(f64),
    Explore,
}

/// Per-task reply of a local controller to the platform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LcMessage {
    pub worker: WorkerId,
    pub payload: Report,
}

impl LcMessage {
    pub fn estimate(worker: WorkerId, value: f64) -> Self {
        Self {
            worker,
            payload: Report::Estimate(value),
        }
    }

    pub fn explore(worker: WorkerId) -> Self {
        Self {
            worker,
            payload: Report::Explore,
        }
    }

    pub fn is_explore(&self) -> bool {
        matches!(self.payload, Report::Explore)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum McspPhase {
    SelectAll,
    Exploitation,
    Exploration,
}

impl McspPhase {
    pub fn classify(available: usize, quota: usize, under_explored: usize) -> Self {
        if available <= quota {
            McspPhase::SelectAll
        } else if under_explored == 0 {
            McspPhase::Exploitation
        } else {
            McspPhase::Exploration
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            McspPhase::SelectAll => "SELECT_ALL",
            McspPhase::Exploitation => "EXPLOITATION",
            McspPhase::Exploration => "EXPLORATION",
        }
    }
}

/// Local controller state of one worker.
#[derive(Debug, Clone)]
pub struct LcState {
    worker: WorkerId,
    worker_dim: usize,
    task_dim: usize,
    partition: UniformPartition,
    counters: Vec<u64>,
    estimates: Vec<f64>,
    params: ControlParams,
    quality: QualityRange,
}

impl LcState {
    pub fn new(
        worker: WorkerId,
        worker_dim: usize,
        task_dim: usize,
        params: ControlParams,
        quality: QualityRange,
    ) -> Result<Self> {
        params.validate()?;
        let partition =
            UniformPartition::for_horizon(params.horizon, params.alpha, worker_dim + task_dim)?;
        let cells = partition.cell_count();
        Ok(Self {
            worker,
            worker_dim,
            task_dim,
            partition,
            counters: vec![0; cells],
            estimates: vec![0.0; cells],
            params,
            quality,
        })
    }

    pub fn worker(&self) -> WorkerId {
        self.worker
    }

    pub fn partition(&self) -> &UniformPartition {
        &self.partition
    }

    pub fn params(&self) -> &ControlParams {
        &self.params
    }

    pub fn counters(&self) -> &[u64] {
        &self.counters
    }

    pub fn estimates(&self) -> &[f64] {
        &self.estimates
    }

    /// Number of stored scalars (one counter and one estimate per cell).
    pub fn storage_scalars(&self) -> usize {
        self.counters.len() + self.estimates.len()
    }

    pub fn threshold(&self, t: usize) -> Result<f64> {
        control_threshold(
            t,
            self.params.alpha,
            self.partition.dim(),
            self.params.exploration_factor,
        )
    }

    fn cell_of(&self, task_ctx: &TaskContext, worker_ctx: &WorkerContext) -> Result<usize> {
        if worker_ctx.dim() != self.worker_dim {
            return Err(Error::DimensionMismatch {
                expected: self.worker_dim,
                actual: worker_ctx.dim(),
            });
        }
        if task_ctx.dim() != self.task_dim {
            return Err(Error::DimensionMismatch {
                expected: self.task_dim,
                actual: task_ctx.dim(),
            });
        }
        let mut joint = [0.0; 8];
        let d = self.partition.dim();
        if d <= joint.len() {
            joint[..self.worker_dim].copy_from_slice(worker_ctx.values());
            joint[self.worker_dim..d].copy_from_slice(task_ctx.values());
            self.partition.locate_flat(&joint[..d])
        } else {
            let mut joint = worker_ctx.values().to_vec();
            joint.extend_from_slice(task_ctx.values());
            self.partition.locate_flat(&joint)
        }
    }

    fn report_cell(&self, cell: usize, t: usize) -> Result<LcMessage> {
        let threshold = self.threshold(t)?;
        Ok(if self.counters[cell] as f64 > threshold {
            LcMessage::estimate(self.worker, self.estimates[cell])
        } else {
            LcMessage::explore(self.worker)
        })
    }

    /// Message for task `t` and the cell of the joint context. Does not modify state.
    pub fn report(
        &self,
        task_ctx: &TaskContext,
        worker_ctx: &WorkerContext,
        t: usize,
    ) -> Result<(LcMessage, CellId)> {
        let flat = self.cell_of(task_ctx, worker_ctx)?;
        let message = self.report_cell(flat, t)?;
        Ok((message, self.partition.unflatten(flat)?))
    }

    /// Folds one explored observation into the cell estimate. A declined
    /// request counts as performance 0.
    pub fn record(&mut self, cell: &CellId, accepted: bool, quality: Option<f64>) -> Result<()> {
        let flat = self.partition.flatten(cell)?;
        self.record_flat(flat, accepted, quality)
    }

    fn record_flat(&mut self, cell: usize, accepted: bool, quality: Option<f64>) -> Result<()> {
        let p = match (accepted, quality) {
            (false, Some(_)) => return Err(Error::QualityWithoutAcceptance),
            (false, None) => 0.0,
            (true, None) => {
                return Err(Error::param(
                    "quality",
                    "an accepted request needs a quality",
                ))
            }
            (true, Some(q)) => {
                if !self.quality.contains(q) {
                    return Err(Error::QualityOutOfRange {
                        quality: q,
                        q_min: self.quality.q_min,
                        q_max: self.quality.q_max,
                    });
                }
                q
            }
        };
        let n = self.counters[cell] as f64;
        self.estimates[cell] = (self.estimates[cell] * n + p) / (n + 1.0);
        self.counters[cell] += 1;
        Ok(())
    }

    #[cfg(test)]
    pub(crate) fn set_cell(&mut self, cell: usize, counter: u64, estimate: f64) {
        self.counters[cell] = counter;
        self.estimates[cell] = estimate;
    }
}

/// Senders of EXPLORE messages.
pub fn under_explored_set(messages: &[LcMessage]) -> Vec<WorkerId> {
    messages
        .iter()
        .filter(|m| m.is_explore())
        .map(|m| m.worker)
        .collect()
}

/// Platform-side selection from one round of controller messages.
pub fn mcsp_select(
    messages: &[LcMessage],
    quota: usize,
    rng: &mut SimRng,
) -> Result<(Selection, McspPhase)> {
    if messages.is_empty() {
        return Err(Error::NoWorkersAvailable);
    }
    if quota == 0 {
        return Err(Error::param("quota", "must be at least 1"));
    }
    let flagged = |m: &LcMessage| Selected {
        worker: m.worker,
        explored: m.is_explore(),
    };
    let under_explored = under_explored_set(messages);
    let phase = McspPhase::classify(messages.len(), quota, under_explored.len());

    let selection = match phase {
        McspPhase::SelectAll => Selection::new(messages.iter().map(flagged).collect()),
        McspPhase::Exploitation => Selection::from_ids(top_k(estimates(messages), quota), false),
        McspPhase::Exploration if under_explored.len() >= quota => {
            let mut picks = rand::seq::index::sample(rng, under_explored.len(), quota).into_vec();
            picks.sort_unstable();
            Selection::from_ids(picks.into_iter().map(|i| under_explored[i]), true)
        }
        McspPhase::Exploration => {
            let fill = top_k(estimates(messages), quota - under_explored.len());
            let mut workers: Vec<Selected> = under_explored
                .iter()
                .map(|&worker| Selected {
                    worker,
                    explored: true,
                })
                .collect();
            workers.extend(fill.into_iter().map(|worker| Selected {
                worker,
                explored: false,
            }));
            Selection::new(workers)
        }
    };
    Ok((selection, phase))
}

fn estimates(messages: &[LcMessage]) -> Vec<(WorkerId, f64)> {
    messages
        .iter()
        .filter_map(|m| match m.payload {
            Report::Estimate(v) => Some((m.worker, v)),
            Report::Explore => None,
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
struct Pending {
    cell: usize,
    explore: bool,
    selected: bool,
}

/// The full hierarchical learner: one controller per worker plus the platform
/// selection step, driven through the [`Policy`] interface.
#[derive(Debug, Clone)]
pub struct Hcl {
    controllers: Vec<LcState>,
    pending: Vec<Option<Pending>>,
    touched: Vec<WorkerId>,
    last_messages: Vec<LcMessage>,
}

impl Hcl {
    pub fn new(
        worker_dims: &[usize],
        task_dim: usize,
        params: ControlParams,
        quality: QualityRange,
    ) -> Result<Self> {
        let controllers = worker_dims
            .iter()
            .enumerate()
            .map(|(i, &x)| LcState::new(WorkerId(i), x, task_dim, params, quality))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            pending: vec![None; controllers.len()],
            controllers,
            touched: Vec::new(),
            last_messages: Vec::new(),
        })
    }

    pub fn controllers(&self) -> &[LcState] {
        &self.controllers
    }

    /// Messages received in the most recent round.
    pub fn last_messages(&self) -> &[LcMessage] {
        &self.last_messages
    }

    fn controller(&self, id: WorkerId) -> Result<&LcState> {
        self.controllers
            .get(id.0)
            .ok_or_else(|| Error::param("worker", format!("{id} has no local controller")))
    }
}

impl Policy for Hcl {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Hcl
    }

    fn select(&mut self, round: &Round<'_>, rng: &mut SimRng) -> Result<Decision> {
        for id in self.touched.drain(..) {
            self.pending[id.0] = None;
        }
        self.last_messages.clear();
        for worker in round.workers {
            let lc = self.controller(worker.id)?;
            let cell = lc.cell_of(&round.task.context, &worker.context)?;
            let message = lc.report_cell(cell, round.t)?;
            self.pending[worker.id.0] = Some(Pending {
                cell,
                explore: message.is_explore(),
                selected: false,
            });
            self.touched.push(worker.id);
            self.last_messages.push(message);
        }
        let (selection, phase) = mcsp_select(&self.last_messages, round.quota, rng)?;
        for id in selection.ids() {
            if let Some(p) = self.pending[id.0].as_mut() {
                p.selected = true;
            }
        }
        Ok(Decision {
            selection,
            phase: Some(phase),
        })
    }

    fn observe(&mut self, _round: &Round<'_>, worker: WorkerId, outcome: Outcome) -> Result<()> {
        let pending = self
            .pending
            .get(worker.0)
            .copied()
            .flatten()
            .filter(|p| p.selected)
            .ok_or(Error::NotSelected(worker.number()))?;
        if pending.explore {
            self.controllers[worker.0].record_flat(
                pending.cell,
                outcome.accepted,
                outcome.quality,
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;
    use proptest::prelude::*;

    fn lc() -> LcState {
        LcState::new(
            WorkerId(0),
            2,
            1,
            ControlParams::default(),
            QualityRange::default(),
        )
        .unwrap()
    }

    fn ctx(w: [f64; 2], c: f64) -> (TaskContext, WorkerContext) {
        (
            TaskContext::new(vec![c]).unwrap(),
            WorkerContext::new(w.to_vec()).unwrap(),
        )
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(control_threshold(1, 1.0, 3, 1.0).unwrap(), 0.0);
        assert_eq!(control_threshold(1, 0.4, 7, 0.2).unwrap(), 0.0);
        let k = control_threshold(1000, 1.0, 3, 1.0).unwrap();
        assert!((k - 69.0776).abs() < 1e-4, "{k}");
        let k = control_threshold(1000, 1.0, 3, 0.003).unwrap();
        assert!((k - 0.20723).abs() < 1e-5, "{k}");
        assert!(control_threshold(0, 1.0, 3, 1.0).is_err());
        assert!(control_threshold(5, 1.0, 3, 0.0).is_err());
    }

    #[test]
    fn threshold_is_monotone() {
        let mut prev = 0.0;
        for t in 1..5000 {
            let k = control_threshold(t, 1.0, 3, 0.003).unwrap();
            assert!(k >= prev);
            prev = k;
        }
    }

    #[test]
    fn fresh_state_explores() {
        let state = lc();
        assert_eq!(state.counters().len(), 125);
        let (task, worker) = ctx([0.4, 0.9], 0.1);
        let (message, cell) = state.report(&task, &worker, 1).unwrap();
        assert!(message.is_explore());
        assert_eq!(cell, CellId(vec![2, 4, 0]));
    }

    #[test]
    fn report_compares_counter_with_threshold() {
        let mut state = lc();
        let (task, worker) = ctx([0.4, 0.9], 0.1);
        let flat = state.cell_of(&task, &worker).unwrap();
        // K(1000) = 0.207 with the default factor
        state.set_cell(flat, 5, 3.2);
        let (message, _) = state.report(&task, &worker, 1000).unwrap();
        assert_eq!(message.payload, Report::Estimate(3.2));
        // K(t) ~ 2.1 around t = 37_000 with f = 0.003... use f = 1 instead
        let params = ControlParams {
            exploration_factor: 1.0,
            ..ControlParams::default()
        };
        let mut state = LcState::new(WorkerId(0), 2, 1, params, QualityRange::default()).unwrap();
        state.set_cell(flat, 1, 4.0);
        // K(3) = 3^(1/3) * ln 3 = 1.58 > 1
        assert!(state.threshold(3).unwrap() > 1.0);
        assert!(state.report(&task, &worker, 3).unwrap().0.is_explore());
    }

    #[test]
    fn counter_equal_to_threshold_explores() {
        let mut state = lc();
        let (task, worker) = ctx([0.1, 0.1], 0.1);
        let flat = state.cell_of(&task, &worker).unwrap();
        state.set_cell(flat, 0, 0.0);
        // K(1) = 0 = N
        assert!(state.report(&task, &worker, 1).unwrap().0.is_explore());
    }

    #[test]
    fn report_rejects_wrong_dimensions() {
        let state = lc();
        let task = TaskContext::new(vec![0.1, 0.2]).unwrap();
        let worker = WorkerContext::new(vec![0.1, 0.2]).unwrap();
        assert!(matches!(
            state.report(&task, &worker, 1),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn record_examples() {
        let mut state = lc();
        let cell = CellId(vec![0, 0, 0]);
        state.record(&cell, true, Some(3.5)).unwrap();
        assert_eq!((state.counters()[0], state.estimates()[0]), (1, 3.5));

        state.set_cell(0, 3, 2.0);
        state.record(&cell, true, Some(4.0)).unwrap();
        assert_eq!((state.counters()[0], state.estimates()[0]), (4, 2.5));

        state.set_cell(0, 3, 2.0);
        state.record(&cell, false, None).unwrap();
        assert_eq!((state.counters()[0], state.estimates()[0]), (4, 1.5));
    }

    #[test]
    fn record_errors() {
        let mut state = lc();
        let cell = CellId(vec![0, 0, 0]);
        assert!(matches!(
            state.record(&cell, false, Some(1.0)),
            Err(Error::QualityWithoutAcceptance)
        ));
        assert!(matches!(
            state.record(&cell, true, Some(5.5)),
            Err(Error::QualityOutOfRange { .. })
        ));
        assert_eq!(state.counters()[0], 0);
    }

    fn estimates_msgs(values: &[(usize, f64)]) -> Vec<LcMessage> {
        values
            .iter()
            .map(|&(w, v)| LcMessage::estimate(WorkerId(w), v))
            .collect()
    }

    #[test]
    fn select_all_when_quota_covers_supply() {
        let mut rng = rng_from_seed(1);
        let msgs = vec![
            LcMessage::explore(WorkerId(0)),
            LcMessage::estimate(WorkerId(1), 2.0),
            LcMessage::estimate(WorkerId(2), 1.0),
        ];
        let (sel, phase) = mcsp_select(&msgs, 5, &mut rng).unwrap();
        assert_eq!(phase, McspPhase::SelectAll);
        assert_eq!(
            sel.sorted_ids(),
            vec![WorkerId(0), WorkerId(1), WorkerId(2)]
        );
        assert!(sel.workers[0].explored && !sel.workers[1].explored);
    }

    #[test]
    fn exploitation_takes_top_estimates() {
        let mut rng = rng_from_seed(1);
        // w1..w5 -> ids 0..4
        let msgs = estimates_msgs(&[(0, 1.0), (1, 5.0), (2, 3.0), (3, 2.0), (4, 4.0)]);
        let (sel, phase) = mcsp_select(&msgs, 2, &mut rng).unwrap();
        assert_eq!(phase, McspPhase::Exploitation);
        assert_eq!(
            sel.ids().collect::<Vec<_>>(),
            vec![WorkerId(1), WorkerId(4)]
        );
        assert!(sel.workers.iter().all(|s| !s.explored));
    }

    #[test]
    fn exploration_fills_with_top_estimates() {
        let mut rng = rng_from_seed(1);
        let mut msgs = estimates_msgs(&[(0, 1.0), (2, 3.0), (3, 2.0), (4, 4.0)]);
        msgs.insert(1, LcMessage::explore(WorkerId(1)));
        let (sel, phase) = mcsp_select(&msgs, 3, &mut rng).unwrap();
        assert_eq!(phase, McspPhase::Exploration);
        assert_eq!(
            sel.ids().collect::<Vec<_>>(),
            vec![WorkerId(1), WorkerId(4), WorkerId(2)]
        );
        assert_eq!(
            sel.workers.iter().map(|s| s.explored).collect::<Vec<_>>(),
            vec![true, false, false]
        );
    }

    #[test]
    fn exploration_samples_from_under_explored() {
        let mut rng = rng_from_seed(9);
        let mut msgs: Vec<LcMessage> = (0..6).map(|w| LcMessage::explore(WorkerId(w))).collect();
        msgs.push(LcMessage::estimate(WorkerId(6), 5.0));
        let (sel, phase) = mcsp_select(&msgs, 3, &mut rng).unwrap();
        assert_eq!(phase, McspPhase::Exploration);
        assert_eq!(sel.len(), 3);
        assert!(sel.workers.iter().all(|s| s.explored && s.worker.0 < 6));
    }

    #[test]
    fn empty_messages_rejected() {
        let mut rng = rng_from_seed(1);
        assert!(matches!(
            mcsp_select(&[], 3, &mut rng),
            Err(Error::NoWorkersAvailable)
        ));
    }

    #[test]
    fn under_explored_examples() {
        let all_est = estimates_msgs(&[(0, 1.0), (1, 2.0)]);
        assert!(under_explored_set(&all_est).is_empty());
        let all_exp: Vec<_> = (0..3).map(|w| LcMessage::explore(WorkerId(w))).collect();
        assert_eq!(under_explored_set(&all_exp).len(), 3);
        let mixed = vec![
            LcMessage::estimate(WorkerId(0), 1.0),
            LcMessage::explore(WorkerId(1)),
            LcMessage::estimate(WorkerId(3), 1.0),
            LcMessage::explore(WorkerId(6)),
        ];
        // 1-based {2, 7}
        assert_eq!(under_explored_set(&mixed), vec![WorkerId(1), WorkerId(6)]);
    }

    #[test]
    fn phase_table_exhaustive() {
        // every message pattern over up to 5 senders and quotas 1..6
        let mut rng = rng_from_seed(3);
        for n in 1..=5usize {
            for mask in 0..(1u32 << n) {
                let msgs: Vec<_> = (0..n)
                    .map(|w| {
                        if mask & (1 << w) != 0 {
                            LcMessage::explore(WorkerId(w))
                        } else {
                            LcMessage::estimate(WorkerId(w), w as f64)
                        }
                    })
                    .collect();
                let n_ue = mask.count_ones() as usize;
                for quota in 1..=6 {
                    let (sel, phase) = mcsp_select(&msgs, quota, &mut rng).unwrap();
                    let expected = if n <= quota {
                        McspPhase::SelectAll
                    } else if n_ue == 0 {
                        McspPhase::Exploitation
                    } else {
                        McspPhase::Exploration
                    };
                    assert_eq!(phase, expected);
                    assert_eq!(sel.len(), quota.min(n));
                    let ids = sel.sorted_ids();
                    assert!(ids.windows(2).all(|w| w[0] != w[1]));
                    for s in &sel.workers {
                        assert_eq!(s.explored, mask & (1 << s.worker.0) != 0);
                    }
                    // under-explored workers are preferred
                    let explored = sel.workers.iter().filter(|s| s.explored).count();
                    assert_eq!(explored, n_ue.min(quota));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn exploitation_is_scale_invariant(values in proptest::collection::vec(0.0f64..5.0, 2..12),
                                           scale in 0.01f64..100.0, quota in 1usize..6) {
            let msgs: Vec<_> = values.iter().enumerate()
                .map(|(w, &v)| LcMessage::estimate(WorkerId(w), v)).collect();
            let scaled: Vec<_> = values.iter().enumerate()
                .map(|(w, &v)| LcMessage::estimate(WorkerId(w), v * scale)).collect();
            let mut rng = rng_from_seed(0);
            let a = mcsp_select(&msgs, quota, &mut rng).unwrap().0;
            let b = mcsp_select(&scaled, quota, &mut rng).unwrap().0;
            prop_assert_eq!(a, b);
        }

        #[test]
        fn selection_is_deterministic(mask in proptest::collection::vec(any::<bool>(), 1..20),
                                      quota in 1usize..10, seed in any::<u64>()) {
            let msgs: Vec<_> = mask.iter().enumerate().map(|(w, &e)| if e {
                LcMessage::explore(WorkerId(w))
            } else {
                LcMessage::estimate(WorkerId(w), (w * 7 % 5) as f64)
            }).collect();
            let a = mcsp_select(&msgs, quota, &mut rng_from_seed(seed)).unwrap();
            let b = mcsp_select(&msgs, quota, &mut rng_from_seed(seed)).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn estimates_stay_running_means(obs in proptest::collection::vec((0usize..4, proptest::option::of(0.0f64..=5.0)), 1..200)) {
            let mut state = lc();
            let mut sums = [0.0f64; 4];
            let mut counts = [0u64; 4];
            for &(cell, q) in &obs {
                let id = state.partition().unflatten(cell).unwrap();
                state.record(&id, q.is_some(), q).unwrap();
                sums[cell] += q.unwrap_or(0.0);
                counts[cell] += 1;
            }
            for cell in 0..125 {
                if cell < 4 && counts[cell] > 0 {
                    prop_assert_eq!(state.counters()[cell], counts[cell]);
                    prop_assert!((state.estimates()[cell] - sums[cell] / counts[cell] as f64).abs() < 1e-9);
                } else {
                    prop_assert_eq!(state.counters()[cell], 0);
                    prop_assert_eq!(state.estimates()[cell], 0.0);
                }
            }
        }
    }
}
