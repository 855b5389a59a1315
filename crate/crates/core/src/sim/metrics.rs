use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{RunTrace, TraceRow};

fn prefix(trace: &RunTrace, t: usize) -> Result<&[TraceRow]> {
    trace.rows.get(..t).ok_or(Error::HorizonExceedsTrace {
        requested: t,
        available: trace.len(),
    })
}

/// Sum of observed performance over the first `t` tasks.
pub fn cumulative_performance(trace: &RunTrace, t: usize) -> Result<f64> {
    Ok(prefix(trace, t)?.iter().map(TraceRow::perf_sum).sum())
}

/// Mean observed performance per selected worker over the first `t` tasks.
pub fn average_performance_up_to(trace: &RunTrace, t: usize) -> Result<f64> {
    if t == 0 {
        return Err(Error::param("t", "must be at least 1"));
    }
    let rows = prefix(trace, t)?;
    let selected: usize = rows.iter().map(|r| r.selection.len()).sum();
    Ok(rows.iter().map(TraceRow::perf_sum).sum::<f64>() / selected as f64)
}

/// Cumulative gap in true expected performance to the benchmark selection.
pub fn expected_regret(trace: &RunTrace, t: usize) -> Result<f64> {
    Ok(prefix(trace, t)?
        .iter()
        .map(|r| r.oracle_theta_sum - r.theta_sum())
        .sum())
}

/// Per-worker number of quality assessments over the first `t` tasks.
pub fn assessment_counts(trace: &RunTrace, t: usize) -> Result<Vec<u64>> {
    let mut counts = vec![0; trace.workers];
    for row in prefix(trace, t)? {
        for s in row.selection.workers.iter().filter(|s| s.explored) {
            counts[s.worker.0] += 1;
        }
    }
    Ok(counts)
}

/// Communication architecture used to count exchanged scalars.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CommMode {
    /// Task context out, one scalar back per available worker, decisions out.
    Hcl,
    /// Every available worker uploads its full personal context.
    Ccl,
}

impl CommMode {
    pub fn scalars(
        self,
        task_dims: usize,
        available: usize,
        quota: usize,
        worker_dim_sum: usize,
    ) -> usize {
        match self {
            CommMode::Hcl => task_dims + available + quota,
            CommMode::Ccl => worker_dim_sum + quota + task_dims,
        }
    }
}

pub fn comm_scalars(row: &TraceRow, mode: CommMode) -> usize {
    mode.scalars(
        row.task.context.dim(),
        row.available_count,
        row.quota,
        row.worker_dim_sum,
    )
}

/// Running metrics, one entry per task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSeries {
    pub cumulative_performance: Vec<f64>,
    pub average_performance: Vec<f64>,
    pub regret: Vec<f64>,
    pub cumulative_comm: Vec<u64>,
    /// Final per-worker assessment counts.
    pub assessments: Vec<u64>,
}

impl MetricSeries {
    pub fn from_trace(trace: &RunTrace) -> Self {
        let n = trace.len();
        let mut series = MetricSeries {
            cumulative_performance: Vec::with_capacity(n),
            average_performance: Vec::with_capacity(n),
            regret: Vec::with_capacity(n),
            cumulative_comm: Vec::with_capacity(n),
            assessments: vec![0; trace.workers],
        };
        let (mut gamma, mut regret, mut comm, mut selected) = (0.0, 0.0, 0u64, 0usize);
        for row in &trace.rows {
            gamma += row.perf_sum();
            // increments are non-negative up to rounding; keep R monotone
            regret += (row.oracle_theta_sum - row.theta_sum()).max(0.0);
            comm += row.comm as u64;
            selected += row.selection.len();
            series.cumulative_performance.push(gamma);
            series.average_performance.push(gamma / selected as f64);
            series.regret.push(regret);
            series.cumulative_comm.push(comm);
            for s in row.selection.workers.iter().filter(|s| s.explored) {
                series.assessments[s.worker.0] += 1;
            }
        }
        series
    }

    pub fn len(&self) -> usize {
        self.cumulative_performance.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative_performance.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policies::PolicyKind;
    use crate::types::{Selection, Task, TaskContext, WorkerId};
    use proptest::prelude::*;

    fn row(t: usize, perf: Vec<f64>, theta: Vec<f64>, oracle: f64, explored: bool) -> TraceRow {
        let ids = (0..perf.len()).map(WorkerId);
        TraceRow {
            t,
            task: Task {
                id: t,
                budget: 20.0,
                context: TaskContext::new(vec![0.5]).unwrap(),
                price: 1.0,
            },
            quota: perf.len(),
            available_count: perf.len() + 1,
            worker_dim_sum: 2 * (perf.len() + 1),
            available: Vec::new(),
            selection: Selection::from_ids(ids, explored),
            performance: perf,
            theta,
            oracle_theta_sum: oracle,
            phase: None,
            comm: 0,
        }
    }

    fn trace(rows: Vec<TraceRow>) -> RunTrace {
        RunTrace {
            policy: PolicyKind::Random,
            workers: 10,
            rows,
        }
    }

    #[test]
    fn sums_and_averages() {
        let tr = trace(vec![
            row(1, vec![1.0, 2.0], vec![1.0, 2.0], 3.0, true),
            row(2, vec![4.5], vec![4.5], 4.5, true),
        ]);
        assert_eq!(cumulative_performance(&tr, 0).unwrap(), 0.0);
        assert_eq!(cumulative_performance(&tr, 2).unwrap(), 7.5);
        assert!(cumulative_performance(&tr, 3).is_err());
        assert_eq!(
            average_performance_up_to(
                &trace(vec![row(1, vec![3.0, 5.0], vec![3.0, 5.0], 8.0, true)]),
                1
            )
            .unwrap(),
            4.0
        );
        assert!(average_performance_up_to(&tr, 0).is_err());
    }

    #[test]
    fn regret_of_one_task() {
        let tr = trace(vec![row(1, vec![3.0, 4.5], vec![3.0, 4.5], 9.0, true)]);
        assert_eq!(expected_regret(&tr, 1).unwrap(), 1.5);
    }

    #[test]
    fn comm_examples() {
        let mut r = row(1, vec![0.0; 26], vec![0.0; 26], 0.0, true);
        r.available_count = 70;
        r.worker_dim_sum = 210;
        assert_eq!(comm_scalars(&r, CommMode::Hcl), 97);
        assert_eq!(comm_scalars(&r, CommMode::Ccl), 237);
        r.worker_dim_sum = 70;
        assert!(comm_scalars(&r, CommMode::Hcl) <= comm_scalars(&r, CommMode::Ccl));
    }

    #[test]
    fn assessments_follow_explored_flags() {
        let tr = trace(vec![
            row(1, vec![1.0, 1.0], vec![1.0, 1.0], 2.0, true),
            row(2, vec![1.0, 1.0, 1.0], vec![1.0; 3], 3.0, false),
            row(3, vec![1.0], vec![1.0], 1.0, true),
        ]);
        assert_eq!(&assessment_counts(&tr, 3).unwrap()[..3], &[2, 1, 0]);
        assert_eq!(
            MetricSeries::from_trace(&tr).assessments,
            assessment_counts(&tr, 3).unwrap()
        );
    }

    proptest! {
        #[test]
        fn series_matches_resummation(
            raw in prop::collection::vec(
                (prop::collection::vec(0.0f64..5.0, 1..6), 0.0f64..3.0), 1..40)
        ) {
            let rows: Vec<TraceRow> = raw
                .iter()
                .enumerate()
                .map(|(i, (p, gap))| {
                    let s: f64 = p.iter().sum();
                    row(i + 1, p.clone(), p.clone(), s + gap, true)
                })
                .collect();
            let tr = trace(rows);
            let series = MetricSeries::from_trace(&tr);
            let mut gamma = 0.0;
            let mut count = 0usize;
            let mut regret = 0.0;
            for (i, (p, gap)) in raw.iter().enumerate() {
                for x in p {
                    gamma += x;
                }
                count += p.len();
                regret += gap;
                prop_assert!((series.cumulative_performance[i] - gamma).abs() < 1e-9);
                prop_assert!((series.average_performance[i] - gamma / count as f64).abs() < 1e-12);
                prop_assert!((cumulative_performance(&tr, i + 1).unwrap() - gamma).abs() < 1e-9);
                prop_assert!((expected_regret(&tr, i + 1).unwrap() - regret).abs() < 1e-9);
            }
            prop_assert!(series.cumulative_performance.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(series.regret.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
