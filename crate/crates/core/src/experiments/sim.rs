//! Trial execution shared by every experiment.

use rayon::prelude::*;

use super::seed::{cell_id, derive_trial_seed, stream_adaptive, trial_rng, STREAM_NONADAPTIVE, STREAM_REALIZATION};
use super::wilson::wilson_interval;
use crate::detect::{run_adaptive, run_nonadaptive, AdaptivePlan, DetectionOutcome, FailureKind};
use crate::error::{Error, Result};
use crate::model::{draw_occupancy, PowerModel, ScenarioConfig};

/// A detector with its full budget fixed.
#[derive(Debug, Clone, PartialEq)]
pub enum Detector {
    NonAdaptive { samples_per_channel: u32 },
    Adaptive(AdaptivePlan),
}

impl Detector {
    /// Adaptive detector on a total budget with one sample per channel in
    /// each of `cycles` exploration cycles.
    pub fn adaptive(cycles: u32, total_budget: u64) -> Result<Self> {
        Ok(Detector::Adaptive(AdaptivePlan::new(cycles as usize, total_budget)?))
    }

    fn stream(&self) -> u64 {
        match self {
            Detector::NonAdaptive { .. } => STREAM_NONADAPTIVE,
            Detector::Adaptive(plan) => stream_adaptive(plan.cycles() as u32),
        }
    }
}

/// Runs trial `trial` of `config` under `master_seed`.
///
/// The realization depends only on the scenario cell, the seed and the trial
/// index, so all detectors and budgets face the same worlds.
pub fn run_trial(
    config: &ScenarioConfig,
    detector: &Detector,
    master_seed: u64,
    trial: u64,
) -> Result<DetectionOutcome> {
    let id = cell_id(config.n, config.epsilon, config.gamma, config.target_holes);
    let seed = derive_trial_seed(master_seed, id, trial);
    let realization = draw_occupancy(config, &PowerModel::WorstCase, &mut trial_rng(seed, STREAM_REALIZATION))?;
    let mut rng = trial_rng(seed, detector.stream());
    match detector {
        Detector::NonAdaptive { samples_per_channel } => {
            run_nonadaptive(config, &realization, *samples_per_channel, &mut rng)
        }
        Detector::Adaptive(plan) => run_adaptive(config, &realization, plan, &mut rng),
    }
}

/// Integer outcome counts for one cell; merging is order-independent.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CellTally {
    pub trials: u64,
    pub failures: u64,
    pub picked_occupied: u64,
    pub insufficient: u64,
    pub budget_exhausted: u64,
    pub samples_total: u64,
}

impl CellTally {
    fn record(mut self, outcome: &DetectionOutcome) -> Self {
        self.trials += 1;
        self.samples_total += outcome.samples_spent;
        match outcome.failure_kind {
            FailureKind::None => {}
            FailureKind::PickedOccupied => self.picked_occupied += 1,
            FailureKind::InsufficientSurvivors => self.insufficient += 1,
            FailureKind::BudgetExhausted => self.budget_exhausted += 1,
        }
        if !outcome.success {
            self.failures += 1;
        }
        self
    }

    fn merge(self, o: Self) -> Self {
        CellTally {
            trials: self.trials + o.trials,
            failures: self.failures + o.failures,
            picked_occupied: self.picked_occupied + o.picked_occupied,
            insufficient: self.insufficient + o.insufficient,
            budget_exhausted: self.budget_exhausted + o.budget_exhausted,
            samples_total: self.samples_total + o.samples_total,
        }
    }

    pub fn error_rate(&self) -> f64 {
        self.failures as f64 / self.trials as f64
    }

    pub fn interval(&self) -> (f64, f64) {
        wilson_interval(self.failures, self.trials)
    }

    pub fn mean_samples(&self) -> f64 {
        self.samples_total as f64 / self.trials as f64
    }
}

/// Runs trials `0..trials` in parallel on the current rayon pool.
pub fn simulate_cell(config: &ScenarioConfig, detector: &Detector, trials: u64, master_seed: u64) -> Result<CellTally> {
    if trials == 0 {
        return Err(Error::domain("trials must be >= 1"));
    }
    config.validate()?;
    (0..trials)
        .into_par_iter()
        .try_fold(CellTally::default, |acc, t| run_trial(config, detector, master_seed, t).map(|o| acc.record(&o)))
        .try_reduce(CellTally::default, |a, b| Ok(a.merge(b)))
}
