//! Survivor counts through the exploration cycles of one realization.

use serde::{Deserialize, Serialize};

use super::seed::{cell_id, derive_trial_seed, stream_adaptive, trial_rng, STREAM_REALIZATION};
use crate::detect::{run_exploration, AdaptivePlan, Retention};
use crate::error::{Error, Result};
use crate::model::{draw_occupancy, PowerModel, ScenarioConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceQuery {
    pub n: usize,
    pub epsilon: f64,
    pub gamma: f64,
    pub cycles: u32,
    pub seed: u64,
    /// Samples per channel in every cycle.
    pub exploration_samples: u32,
}

/// One CSV line: survivors after cycle `cycle` of a `k`-cycle run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRow {
    pub cycle: u32,
    pub k: u32,
    pub holes_retained: usize,
    pub occupied_retained: usize,
}

/// Entry 0 is the full channel set, entry `k` the survivors of cycle `k`.
///
/// The realization is trial 0 of the matching sweep cell under `seed`, and
/// the exploration uses the adaptive detector's stream for `cycles`. The
/// budget is exactly what the cycles can cost, so no cycle is ever skipped.
pub fn exploration_trace(query: &TraceQuery) -> Result<Vec<Retention>> {
    if query.exploration_samples < 1 {
        return Err(Error::domain("exploration samples must be >= 1"));
    }
    let config = ScenarioConfig::new(query.n, query.epsilon, query.gamma, 1)?;
    let seed = derive_trial_seed(query.seed, cell_id(config.n, config.epsilon, config.gamma, 1), 0);
    let realization = draw_occupancy(&config, &PowerModel::WorstCase, &mut trial_rng(seed, STREAM_REALIZATION))?;
    let budget = query.n as u64 * query.exploration_samples as u64 * query.cycles as u64;
    let plan = AdaptivePlan::with_allocations(budget, vec![query.exploration_samples; query.cycles as usize])?;
    let run = run_exploration(&config, &realization, &plan, &mut trial_rng(seed, stream_adaptive(query.cycles)))?;
    debug_assert!(!run.exhausted);
    Ok(run.trace)
}

pub fn trace_rows(cycles: u32, trace: &[Retention]) -> Vec<TraceRow> {
    trace
        .iter()
        .enumerate()
        .map(|(i, r)| TraceRow { cycle: i as u32, k: cycles, holes_retained: r.holes, occupied_retained: r.occupied })
        .collect()
}
