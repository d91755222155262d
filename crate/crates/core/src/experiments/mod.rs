//! Seeded, parallel Monte Carlo studies built on the detectors.
//!
//! Every trial derives its own seed from `(master_seed, cell, trial)` and
//! tallies are integer counts, so results are identical for any number of
//! worker threads. Run inside [`with_threads`] to cap the worker count.

mod budget;
#[cfg(test)]
mod end_to_end;
mod output;
mod region;
pub mod seed;
mod sim;
mod sweep;
mod trace;
mod wilson;

pub use budget::{agility_table, find_required_budget, AgilityRow, BudgetProbe, BudgetQuery, BudgetSearch, Method};
pub use output::{effective_threads, read_metadata, sidecar_path, with_threads, RunMetadata, Sidecar, TOOL_VERSION};
pub use region::{
    detectability_grid, GridCell, GridQuery, RegionClass, TheoryRegion, BETA_MAX, DEFAULT_SUCCESS_THRESHOLD,
};
pub use seed::derive_trial_seed;
pub use sim::{run_trial, simulate_cell, CellTally, Detector};
pub use sweep::{
    results_csv, run_reliability_sweep, write_csv, EpsilonRule, GammaRule, ResultRow, SweepSpec, EXPERIMENT_ADAPTIVE,
    EXPERIMENT_NONADAPTIVE, RESULTS_HEADER,
};
pub use trace::{exploration_trace, trace_rows, TraceQuery, TraceRow};
pub use wilson::{wilson_interval, Z95};
