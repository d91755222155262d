//! Detectability map over the `(alpha, beta)` exponent plane.

use serde::{Deserialize, Serialize};

use super::sim::{simulate_cell, Detector};
use crate::error::{Error, Result};
use crate::model::ScenarioConfig;
use crate::theory::power_scaling_boundaries;

pub const DEFAULT_SUCCESS_THRESHOLD: f64 = 0.1;
/// Largest power exponent accepted on the grid.
pub const BETA_MAX: f64 = 1.0;
const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionClass {
    BothFail,
    AdaptiveOnly,
    NonadaptiveOnly,
    BothSucceed,
}

/// Where a cell sits relative to `beta = (1-alpha)/M` and `beta = (1-alpha)/M'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoryRegion {
    AboveBoth,
    Between,
    BelowBoth,
    OnBoundary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridQuery {
    pub alpha_grid: Vec<f64>,
    pub beta_grid: Vec<f64>,
    pub m: u32,
    pub k: u32,
    pub n: usize,
    pub t: usize,
    pub trials: u64,
    pub seed: u64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub gamma: f64,
    pub err_nonadaptive: f64,
    pub err_adaptive: f64,
    pub class: RegionClass,
    pub theory: TheoryRegion,
    pub boundary_nonadaptive: f64,
    pub boundary_adaptive: f64,
}

fn theory_region(beta: f64, upper: f64, lower: f64) -> TheoryRegion {
    if (beta - upper).abs() <= BOUNDARY_TOL || (beta - lower).abs() <= BOUNDARY_TOL {
        TheoryRegion::OnBoundary
    } else if beta > upper {
        TheoryRegion::AboveBoth
    } else if beta < lower {
        TheoryRegion::BelowBoth
    } else {
        TheoryRegion::Between
    }
}

/// Classifies every `(alpha, beta)` cell by which detectors reach an error
/// below `threshold`; both run on budget `M n`, the adaptive one with `K`
/// single-sample exploration cycles. Cells come out alpha-major.
pub fn detectability_grid(query: &GridQuery) -> Result<Vec<GridCell>> {
    if query.alpha_grid.iter().any(|a| !(0.0..1.0).contains(a)) {
        return Err(Error::domain("alpha values must lie in [0,1)"));
    }
    if query.beta_grid.iter().any(|&b| !(b > 0.0 && b <= BETA_MAX)) {
        return Err(Error::domain(format!("beta values must lie in (0,{BETA_MAX}]")));
    }
    if !(query.threshold > 0.0 && query.threshold <= 1.0) {
        return Err(Error::domain("success threshold must lie in (0,1]"));
    }
    if query.trials < 1 {
        return Err(Error::domain("trials must be >= 1"));
    }
    let budget = query.m as u64 * query.n as u64;
    let nonadaptive = Detector::NonAdaptive { samples_per_channel: query.m };
    let adaptive = Detector::adaptive(query.k, budget)?;

    let mut cells = Vec::with_capacity(query.alpha_grid.len() * query.beta_grid.len());
    for &alpha in &query.alpha_grid {
        let (upper, lower) = power_scaling_boundaries(alpha, query.m, query.k)?;
        for &beta in &query.beta_grid {
            let config = ScenarioConfig::from_exponents(query.n, alpha, beta, query.t)?;
            let na = simulate_cell(&config, &nonadaptive, query.trials, query.seed)?.error_rate();
            let a = simulate_cell(&config, &adaptive, query.trials, query.seed)?.error_rate();
            let class = match (na < query.threshold, a < query.threshold) {
                (true, true) => RegionClass::BothSucceed,
                (false, true) => RegionClass::AdaptiveOnly,
                (true, false) => RegionClass::NonadaptiveOnly,
                (false, false) => RegionClass::BothFail,
            };
            cells.push(GridCell {
                alpha,
                beta,
                epsilon: config.epsilon,
                gamma: config.gamma,
                err_nonadaptive: na,
                err_adaptive: a,
                class,
                theory: theory_region(beta, upper, lower),
                boundary_nonadaptive: upper,
                boundary_adaptive: lower,
            });
        }
    }
    Ok(cells)
}
