//! The simulated world: tasks, worker availability and contexts, ground-truth
//! expected performance and instantaneous outcomes.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{QualityRange, TaskContext, WorkerContext, WorkerId};

mod checkin;
mod tasks;
mod truth;
mod world;

pub use checkin::{filter_bbox, load_checkins, parse_checkins, BoundingBox, CheckinRecord};
pub use tasks::{gen_task, price_for};
pub use truth::{
    expected_performance_discrete, expected_performance_hybrid, noise_half_width,
    outcome_from_noise, sample_outcome, GroundTruth, WorkerTruth,
};
pub use world::{
    location_coordinate, location_index, sample_availability, sample_worker_location_synthetic,
    Environment, RoundData, WorkerPool,
};

/// Personal context dimensions used by the built-in models: battery, location.
pub const WORKER_DIMS: usize = 2;

/// Ground-truth expected performance `theta_i(x, c)`.
pub trait PerformanceModel: Send + Sync {
    fn expected(&self, worker: WorkerId, worker_ctx: &WorkerContext, task_ctx: &TaskContext)
        -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Discrete,
    Hybrid,
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "discrete" => Ok(ModelKind::Discrete),
            "hybrid" => Ok(ModelKind::Hybrid),
            other => Err(Error::param("model", format!("unknown model `{other}`"))),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Discrete => "discrete",
            ModelKind::Hybrid => "hybrid",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataSource {
    Synthetic,
    Checkin,
}

impl FromStr for DataSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "synthetic" => Ok(DataSource::Synthetic),
            "checkin" => Ok(DataSource::Checkin),
            other => Err(Error::param(
                "source",
                format!("unknown data source `{other}`"),
            )),
        }
    }
}

impl fmt::Display for DataSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DataSource::Synthetic => "synthetic",
            DataSource::Checkin => "checkin",
        })
    }
}

/// World parameters. The defaults are the standard experimental setup:
/// 100 workers, 10,000 tasks, availability 0.7, prices 0.75/1.0 split at
/// task context 0.5, budgets from N(20, 5^2) truncated to [1, 100], quality
/// in [0, 5] and five personal locations weighted 1/2, 1/3, 1/12, 1/24, 1/24.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvConfig {
    pub workers: usize,
    pub horizon: usize,
    pub rho: f64,
    pub task_dims: usize,
    pub price_low: f64,
    pub price_high: f64,
    /// Tasks whose first context coordinate is at most this pay `price_low`.
    pub price_split: f64,
    pub budget_mean: f64,
    pub budget_sd: f64,
    pub budget_min: f64,
    pub budget_max: f64,
    pub quality: QualityRange,
    /// Half-width of the uniform performance noise before truncation.
    pub noise_width: f64,
    pub location_weights: Vec<f64>,
    /// Bins per battery and task axis of the discrete model.
    pub grid_bins: usize,
    pub model: ModelKind,
    pub source: DataSource,
    pub checkin_path: Option<PathBuf>,
    pub bbox: BoundingBox,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            workers: 100,
            horizon: 10_000,
            rho: 0.7,
            task_dims: 1,
            price_low: 0.75,
            price_high: 1.0,
            price_split: 0.5,
            budget_mean: 20.0,
            budget_sd: 5.0,
            budget_min: 1.0,
            budget_max: 100.0,
            quality: QualityRange::default(),
            noise_width: 1.0,
            location_weights: vec![1.0 / 2.0, 1.0 / 3.0, 1.0 / 12.0, 1.0 / 24.0, 1.0 / 24.0],
            grid_bins: 5,
            model: ModelKind::Discrete,
            source: DataSource::Synthetic,
            checkin_path: None,
            bbox: BoundingBox::NEW_YORK,
        }
    }
}

fn parse_num<T: FromStr>(key: &'static str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::param(key, format!("cannot parse `{value}`")))
}

fn parse_list(key: &'static str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_num(key, s))
        .collect()
}

fn parse_pair(key: &'static str, value: &str) -> Result<(f64, f64)> {
    match parse_list(key, value)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(Error::param(
            key,
            format!("expected `min,max`, got `{value}`"),
        )),
    }
}

impl EnvConfig {
    /// Keys accepted by [`EnvConfig::set`].
    pub const KEYS: &'static [&'static str] = &[
        "workers",
        "horizon",
        "rho",
        "task_dims",
        "price_low",
        "price_high",
        "price_split",
        "budget_mean",
        "budget_sd",
        "budget_min",
        "budget_max",
        "q_min",
        "q_max",
        "noise_width",
        "location_weights",
        "grid_bins",
        "model",
        "source",
        "checkin_path",
        "bbox_lat",
        "bbox_lon",
    ];

    /// Applies one `key = value` setting. Returns `Ok(false)` for keys that
    /// are not environment keys.
    pub fn set(&mut self, key: &str, value: &str) -> Result<bool> {
        match key {
            "workers" => self.workers = parse_num("workers", value)?,
            "horizon" => self.horizon = parse_num("horizon", value)?,
            "rho" => self.rho = parse_num("rho", value)?,
            "task_dims" => self.task_dims = parse_num("task_dims", value)?,
            "price_low" => self.price_low = parse_num("price_low", value)?,
            "price_high" => self.price_high = parse_num("price_high", value)?,
            "price_split" => self.price_split = parse_num("price_split", value)?,
            "budget_mean" => self.budget_mean = parse_num("budget_mean", value)?,
            "budget_sd" => self.budget_sd = parse_num("budget_sd", value)?,
            "budget_min" => self.budget_min = parse_num("budget_min", value)?,
            "budget_max" => self.budget_max = parse_num("budget_max", value)?,
            "q_min" => self.quality.q_min = parse_num("q_min", value)?,
            "q_max" => self.quality.q_max = parse_num("q_max", value)?,
            "noise_width" => self.noise_width = parse_num("noise_width", value)?,
            "location_weights" => self.location_weights = parse_list("location_weights", value)?,
            "grid_bins" => self.grid_bins = parse_num("grid_bins", value)?,
            "model" => self.model = value.parse()?,
            "source" => self.source = value.parse()?,
            "checkin_path" => {
                let v = value.trim();
                self.checkin_path = (!v.is_empty()).then(|| PathBuf::from(v));
            }
            "bbox_lat" => {
                let (lo, hi) = parse_pair("bbox_lat", value)?;
                self.bbox.lat = (lo, hi);
            }
            "bbox_lon" => {
                let (lo, hi) = parse_pair("bbox_lon", value)?;
                self.bbox.lon = (lo, hi);
            }
            _ => return Ok(false),
        }
        Ok(true)
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::param("workers", "must be at least 1"));
        }
        if self.horizon == 0 {
            return Err(Error::param("horizon", "must be at least 1"));
        }
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(Error::param(
                "rho",
                format!("must lie in (0, 1], got {}", self.rho),
            ));
        }
        if self.task_dims == 0 {
            return Err(Error::param("task_dims", "must be at least 1"));
        }
        if !(self.price_low > 0.0 && self.price_high >= self.price_low) {
            return Err(Error::param("price", "need 0 < price_low <= price_high"));
        }
        if !(self.budget_sd > 0.0 && self.budget_min < self.budget_max) {
            return Err(Error::param(
                "budget",
                "need budget_sd > 0 and budget_min < budget_max",
            ));
        }
        // the truncation window must carry probability mass we can hit by rejection
        let z_lo = (self.budget_min - self.budget_mean) / self.budget_sd;
        let z_hi = (self.budget_max - self.budget_mean) / self.budget_sd;
        if z_lo > 6.0 || z_hi < -6.0 {
            return Err(Error::param(
                "budget",
                "truncation window has negligible mass",
            ));
        }
        QualityRange::new(self.quality.q_min, self.quality.q_max)?;
        if !(self.noise_width >= 0.0 && self.noise_width.is_finite()) {
            return Err(Error::param("noise_width", "must be >= 0"));
        }
        if self.location_weights.is_empty()
            || self
                .location_weights
                .iter()
                .any(|w| !(*w >= 0.0 && w.is_finite()))
            || self.location_weights.iter().sum::<f64>() <= 0.0
        {
            return Err(Error::param(
                "location_weights",
                "need a non-empty list of non-negative weights with positive sum",
            ));
        }
        if self.grid_bins == 0 {
            return Err(Error::param("grid_bins", "must be at least 1"));
        }
        self.bbox.validate()?;
        if self.source == DataSource::Checkin && self.checkin_path.is_none() {
            return Err(Error::param(
                "checkin_path",
                "required for the checkin source",
            ));
        }
        Ok(())
    }
}
