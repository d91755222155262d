//! Closed-form large-`n` predictions for both detectors.
//!
//! These are limits, not finite-`n` values: at desk-scale channel counts the
//! measured error of the non-adaptive detector can sit well above
//! [`p_na_asymptotic`]. All logarithms are natural.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_common(gamma: f64, epsilon: f64, t: u32) -> Result<()> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::domain(format!("gamma must be finite and > 0, got {gamma}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::domain(format!("epsilon must lie in (0,1), got {epsilon}")));
    }
    if t < 1 {
        return Err(Error::domain("T must be >= 1"));
    }
    Ok(())
}

/// `1 - (1 + 1/x)^-T` given `ln x`, stable for very large or small `x`.
fn error_from_log_odds(log_x: f64, t: u32) -> f64 {
    let inv = (-log_x).exp();
    let log_term = if inv.is_infinite() { -log_x } else { inv.ln_1p() };
    -(-(t as f64) * log_term).exp_m1()
}

/// Asymptotic worst-case error of the non-adaptive detector:
/// `1 - (1 + [(1+gamma)^M * epsilon]^-1)^-T`.
pub fn p_na_asymptotic(gamma: f64, m: u32, epsilon: f64, t: u32) -> Result<f64> {
    check_common(gamma, epsilon, t)?;
    if m < 1 {
        return Err(Error::domain("M must be >= 1"));
    }
    Ok(error_from_log_odds(m as f64 * gamma.ln_1p() + epsilon.ln(), t))
}

/// Asymptotic worst-case error of the adaptive detector with `K` cycles and
/// `m_detect` samples per survivor: the exploration multiplies the hole odds
/// by `2^K`.
pub fn p_a_asymptotic(gamma: f64, m_detect: f64, k: u32, epsilon: f64, t: u32) -> Result<f64> {
    check_common(gamma, epsilon, t)?;
    if !(m_detect > 0.0) {
        return Err(Error::domain("detection allocation must be > 0"));
    }
    let log_x = m_detect * gamma.ln_1p() + k as f64 * std::f64::consts::LN_2 + epsilon.ln();
    Ok(error_from_log_odds(log_x, t))
}

/// Per-survivor detection allocation that equalizes adaptive and non-adaptive
/// error: `M - K / ln(1 + gamma)`.
pub fn detection_allocation_asymptotic(m: f64, k: u32, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::domain("gamma must be > 0"));
    }
    Ok(m - k as f64 / gamma.ln_1p())
}

/// Lower bound on the budget ratio non-adaptive / adaptive at equal
/// error: `(2^-K + 2/M)^-1`. Tends to `M/2` as `K` grows.
pub fn agility_gain_lower_bound(m: f64, k: u32) -> Result<f64> {
    if !(m >= 1.0) {
        return Err(Error::domain("M must be >= 1"));
    }
    Ok(1.0 / ((-(k as f64)).exp2() + 2.0 / m))
}

/// Effective detection samples of the adaptive scheme on budget `M n`:
/// `2^K (M - 2) + 2`.
pub fn m_prime(m: u32, k: u32) -> Result<i64> {
    if m < 1 {
        return Err(Error::domain("M must be >= 1"));
    }
    let factor = 1i64.checked_shl(k).filter(|_| k < 62).ok_or_else(|| Error::domain(format!("K = {k} too large")))?;
    Ok(factor * (m as i64 - 2) + 2)
}

/// Power-exponent boundaries `((1-alpha)/M, (1-alpha)/M')` under
/// `epsilon = n^(alpha-1)`, `gamma = n^beta`.
pub fn power_scaling_boundaries(alpha: f64, m: u32, k: u32) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::domain(format!("alpha must lie in [0,1], got {alpha}")));
    }
    let mp = m_prime(m, k)?;
    if mp < 1 {
        return Err(Error::domain(format!("M' = {mp} is not positive for M = {m}")));
    }
    Ok(((1.0 - alpha) / m as f64, (1.0 - alpha) / mp as f64))
}

/// `ln ln (1/epsilon)`, the cycle count up to which exploration keeps every hole.
pub fn optimal_cycles(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < (-1.0f64).exp()) {
        return Err(Error::domain(format!("optimal cycles need 0 < epsilon < 1/e, got {epsilon}")));
    }
    Ok((-epsilon.ln()).ln())
}

/// All closed-form quantities for one parameter tuple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryPoint {
    pub p_na: f64,
    pub p_a: f64,
    pub agility_gain_lb: f64,
    pub m_prime: i64,
    pub k_star: Option<f64>,
}

impl TheoryPoint {
    /// Evaluates both error laws on budget `M n`; the adaptive one uses
    /// `M'` detection samples per survivor.
    pub fn evaluate(gamma: f64, m: u32, k: u32, epsilon: f64, t: u32) -> Result<Self> {
        let mp = m_prime(m, k)?;
        let p_a = if mp >= 1 { p_a_asymptotic(gamma, mp as f64, k, epsilon, t)? } else { 1.0 };
        Ok(TheoryPoint {
            p_na: p_na_asymptotic(gamma, m, epsilon, t)?,
            p_a,
            agility_gain_lb: agility_gain_lower_bound(m as f64, k)?,
            m_prime: mp,
            k_star: optimal_cycles(epsilon).ok(),
        })
    }
}
