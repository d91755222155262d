//! Distribution machinery for the energy statistic: Gamma evaluation and
//! sampling, the limit law of scaled Gamma order statistics, and the two
//! tail bounds used by the exploration analysis.

mod bounds;
mod gamma;
pub mod ks;
mod order;
mod sampling;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bounds::{binomial_lower_tail_bound, gamma_tail_bound};
pub use gamma::{
    gamma_cdf, gamma_median, gamma_pdf, gamma_quantile, gamma_sf, ln_gamma, regularized_gamma, QUANTILE_MAX_ITER,
    QUANTILE_TOL,
};
pub use order::{order_stat_limit_cdf, scaling_constant, OrderStatLimitQuery, ScalingConstant};
pub use sampling::{sample_energy_exact, sample_exponential, sample_gamma};

/// `Gamma(shape, scale)` with integer shape: the law of a sum of `shape`
/// squared complex-normal magnitudes with per-sample variance `scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaParams {
    shape: u32,
    scale: f64,
}

impl GammaParams {
    pub fn new(shape: u32, scale: f64) -> Result<Self> {
        if shape < 1 {
            return Err(Error::domain("gamma shape must be >= 1"));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::domain(format!("gamma scale must be finite and > 0, got {scale}")));
        }
        Ok(Self { shape, scale })
    }

    pub fn shape(&self) -> u32 {
        self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn mean(&self) -> f64 {
        self.shape as f64 * self.scale
    }
}
