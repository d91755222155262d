//! Simulation and analysis of wideband spectrum-hole detection.
//!
//! A scenario has `n` channels, each a hole with probability `epsilon` or
//! occupied at power at least `gamma`. Detectors measure channel energies
//! under a shared sampling budget and report `T` channels believed to be
//! holes. [`detect::run_nonadaptive`] spreads the budget uniformly;
//! [`detect::run_adaptive`] first discards channels over a few cheap
//! exploration cycles.
//!
//! [`experiments`] wraps both in a seeded, parallel Monte Carlo harness and
//! [`theory`] gives the closed-form large-`n` predictions.

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod detect;
pub mod error;
pub mod experiments;
pub mod model;
pub mod stats;
pub mod theory;

pub use detect::{AdaptivePlan, BudgetLedger, DetectionOutcome, FailureKind, Retention};
pub use error::{Error, Result};
pub use model::{Energies, MeasurementMode, PowerModel, Realization, ScenarioConfig};
pub use stats::GammaParams;
pub use theory::TheoryPoint;
