use super::GammaParams;
use crate::error::{Error, Result};

/// `1 - exp(-threshold / scale)`, the exponential-tail term of the hole
/// retention analysis.
///
/// For shape 1 this is the Gamma CDF itself. For shape > 1 a Gamma variable
/// dominates its first exponential summand, so the value is an upper bound
/// on `P(X < threshold)` rather than a lower one.
pub fn gamma_tail_bound(threshold: f64, params: &GammaParams) -> Result<f64> {
    if !(threshold > 0.0) {
        return Err(Error::domain(format!("threshold must be > 0, got {threshold}")));
    }
    Ok(-(-threshold / params.scale()).exp_m1())
}

/// Chernoff-type bound on `P(B <= b)` for `B ~ Binomial(m, a)` and `b < m a`:
/// `((m - m a) / (m - b))^(m - b) * (m a / b)^b`.
pub fn binomial_lower_tail_bound(m: u64, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::domain(format!("success probability must lie in (0,1), got {a}")));
    }
    let mf = m as f64;
    let mean = mf * a;
    if !(b > 0.0) {
        return Err(Error::domain(format!("b must be > 0, got {b}")));
    }
    if b >= mean {
        return Err(Error::domain(format!("bound needs b < m*a = {mean}, got {b}")));
    }
    let log_bound = (mf - b) * ((mf - mean) / (mf - b)).ln() + b * (mean / b).ln();
    Ok(log_bound.min(0.0).exp())
}
