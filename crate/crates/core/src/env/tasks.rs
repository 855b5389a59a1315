use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::env::EnvConfig;
use crate::error::{Error, Result};
use crate::seed::SimRng;
use crate::types::{Task, TaskContext};

/// Price per requested worker, a function of the first task coordinate.
pub fn price_for(config: &EnvConfig, context: &TaskContext) -> f64 {
    if context.values()[0] <= config.price_split {
        config.price_low
    } else {
        config.price_high
    }
}

/// Draws task `t`: uniform context, the matching price, and a budget from the
/// truncated normal (rejection against `[budget_min, budget_max]`), finally
/// clamped into `[price, W * price]` so that `1 <= m_t <= W`.
pub fn gen_task(t: usize, config: &EnvConfig, rng: &mut SimRng) -> Result<Task> {
    let context = TaskContext::new((0..config.task_dims).map(|_| rng.random::<f64>()).collect())?;
    let price = price_for(config, &context);
    let normal = Normal::new(config.budget_mean, config.budget_sd)
        .map_err(|e| Error::param("budget_sd", e.to_string()))?;
    let budget = loop {
        let b = normal.sample(rng);
        if (config.budget_min..=config.budget_max).contains(&b) {
            break b;
        }
    };
    let budget = budget.clamp(price, config.workers as f64 * price);
    Ok(Task {
        id: t,
        budget,
        context,
        price,
    })
}
