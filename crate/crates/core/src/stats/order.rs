//! Limit law of the smallest order statistics of many Gamma draws.
//!
//! For `m` i.i.d. `Gamma(M, alpha)` values scaled by
//! `b_m = alpha * (Gamma(M+1) / m)^(1/M)`, the i-th smallest converges to a
//! law with CDF `1 - exp(-w^M) * sum_{k<i} w^{kM} / k!`.

use serde::{Deserialize, Serialize};

use super::{ln_gamma, regularized_gamma, GammaParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderStatLimitQuery {
    rank: u32,
    shape: u32,
    argument: f64,
}

impl OrderStatLimitQuery {
    /// `rank` is 1 for the minimum; `argument` is the scaled energy `w`.
    pub fn new(rank: u32, shape: u32, argument: f64) -> Result<Self> {
        if rank < 1 || shape < 1 {
            return Err(Error::domain("order statistic rank and shape must be >= 1"));
        }
        if !(argument >= 0.0) {
            return Err(Error::domain(format!("scaled argument must be >= 0, got {argument}")));
        }
        Ok(Self { rank, shape, argument })
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn shape(&self) -> u32 {
        self.shape
    }

    pub fn argument(&self) -> f64 {
        self.argument
    }
}

/// Limiting CDF of the scaled `rank`-th order statistic.
///
/// The finite sum is the Poisson(w^M) upper tail at `rank`, so it is
/// evaluated as the regularized lower incomplete gamma `P(rank, w^M)`,
/// which avoids the cancellation of `1 - (...)` for small `w`.
pub fn order_stat_limit_cdf(query: &OrderStatLimitQuery) -> f64 {
    let x = query.argument.powi(query.shape as i32);
    regularized_gamma(query.rank as f64, x).0
}

/// The normalizer `b_m` that puts the smallest of `m` Gamma draws on unit scale.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct ScalingConstant(f64);

impl ScalingConstant {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// `b_m = scale * (M! / m)^(1/M)` for `m` draws of `Gamma(M, scale)`.
pub fn scaling_constant(m: u64, params: &GammaParams) -> Result<ScalingConstant> {
    if m < 1 {
        return Err(Error::domain("scaling constant needs m >= 1"));
    }
    let shape = params.shape() as f64;
    let log_ratio = ln_gamma(shape + 1.0) - (m as f64).ln();
    Ok(ScalingConstant(params.scale() * (log_ratio / shape).exp()))
}
