//! Smallest budget reaching a target error.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::sim::{simulate_cell, Detector};
use crate::error::{Error, Result};
use crate::model::ScenarioConfig;
use crate::theory::agility_gain_lower_bound;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    NonAdaptive,
    Adaptive { cycles: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetQuery {
    pub target_error: f64,
    pub method: Method,
    pub n: usize,
    pub epsilon: f64,
    pub gamma: f64,
    pub t: usize,
    pub trials: u64,
    pub seed: u64,
    /// Largest per-channel budget tried.
    pub m_max: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetProbe {
    pub total_budget: u64,
    pub per_channel: f64,
    pub err_emp: f64,
    pub err_lo: f64,
    pub err_hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetSearch {
    /// `None` when even `m_max` misses the target.
    pub per_channel: Option<f64>,
    /// Every probe evaluated, ascending by budget.
    pub probes: Vec<BudgetProbe>,
    /// False when some larger budget did clearly worse than a smaller one
    /// (disjoint Wilson intervals).
    pub monotone: bool,
}

impl BudgetSearch {
    pub fn attainable(&self) -> bool {
        self.per_channel.is_some()
    }
}

/// Bisection for the smallest budget whose upper Wilson bound is at most
/// `target_error`.
///
/// The non-adaptive detector is searched over integer `M` in `[1, m_max]`.
/// The adaptive detector is searched over integer totals in
/// `[n, m_max * n]`, so its answer has resolution `1/n` per channel. Every
/// probe reuses the same trial seeds.
pub fn find_required_budget(query: &BudgetQuery) -> Result<BudgetSearch> {
    if !(query.target_error > 0.0 && query.target_error < 1.0) {
        return Err(Error::domain(format!("target error must lie in (0,1), got {}", query.target_error)));
    }
    if query.m_max < 1 {
        return Err(Error::domain("m_max must be >= 1"));
    }
    if query.trials < 1 {
        return Err(Error::domain("trials must be >= 1"));
    }
    let config = ScenarioConfig::new(query.n, query.epsilon, query.gamma, query.t)?;
    let n = query.n as u64;
    let (lo, hi) = match query.method {
        Method::NonAdaptive => (1u64, query.m_max as u64),
        Method::Adaptive { .. } => (n, query.m_max as u64 * n),
    };

    let mut probes: BTreeMap<u64, BudgetProbe> = BTreeMap::new();
    let mut meets = |x: u64| -> Result<bool> {
        let (detector, total) = match query.method {
            Method::NonAdaptive => {
                let m = u32::try_from(x).map_err(|_| Error::domain("per-channel budget exceeds u32"))?;
                (Detector::NonAdaptive { samples_per_channel: m }, x * n)
            }
            Method::Adaptive { cycles } => (Detector::adaptive(cycles, x)?, x),
        };
        let tally = simulate_cell(&config, &detector, query.trials, query.seed)?;
        let (err_lo, err_hi) = tally.interval();
        probes.insert(
            total,
            BudgetProbe {
                total_budget: total,
                per_channel: total as f64 / n as f64,
                err_emp: tally.error_rate(),
                err_lo,
                err_hi,
            },
        );
        Ok(err_hi <= query.target_error)
    };

    let found = if !meets(hi)? {
        None
    } else if meets(lo)? {
        Some(lo)
    } else {
        let (mut fail, mut pass) = (lo, hi);
        while pass - fail > 1 {
            let mid = fail + (pass - fail) / 2;
            if meets(mid)? {
                pass = mid;
            } else {
                fail = mid;
            }
        }
        Some(pass)
    };

    let probes: Vec<BudgetProbe> = probes.into_values().collect();
    let monotone = probes.iter().enumerate().all(|(i, a)| probes[i + 1..].iter().all(|b| b.err_lo <= a.err_hi));
    let per_channel = found.map(|x| match query.method {
        Method::NonAdaptive => x as f64,
        Method::Adaptive { .. } => x as f64 / n as f64,
    });
    Ok(BudgetSearch { per_channel, probes, monotone })
}

/// One line of an agility table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgilityRow {
    pub method: String,
    #[serde(rename = "K")]
    pub k: u32,
    pub n: usize,
    pub epsilon: f64,
    pub gamma: f64,
    #[serde(rename = "T")]
    pub t: usize,
    pub target_error: f64,
    pub trials: u64,
    /// Empty when the target was not reached within `m_max`.
    pub per_channel: Option<f64>,
    pub probes: usize,
    pub monotone: bool,
    /// Non-adaptive over adaptive per-channel budget.
    pub gain: Option<f64>,
    pub gain_lower_bound: Option<f64>,
}

/// Required budgets of the non-adaptive detector and of the adaptive one for
/// each entry of `cycles`, with the measured gains. `base.method` is ignored.
pub fn agility_table(base: &BudgetQuery, cycles: &[u32]) -> Result<Vec<AgilityRow>> {
    let row = |method: Method, search: &BudgetSearch, m_na: Option<f64>| -> Result<AgilityRow> {
        let (name, k) = match method {
            Method::NonAdaptive => ("nonadaptive", 0),
            Method::Adaptive { cycles } => ("adaptive", cycles),
        };
        let (gain, gain_lower_bound) = match (method, m_na, search.per_channel) {
            (Method::Adaptive { cycles }, Some(na), Some(a)) => {
                (Some(na / a), Some(agility_gain_lower_bound(na, cycles)?))
            }
            _ => (None, None),
        };
        Ok(AgilityRow {
            method: name.to_string(),
            k,
            n: base.n,
            epsilon: base.epsilon,
            gamma: base.gamma,
            t: base.t,
            target_error: base.target_error,
            trials: base.trials,
            per_channel: search.per_channel,
            probes: search.probes.len(),
            monotone: search.monotone,
            gain,
            gain_lower_bound,
        })
    };
    let na = find_required_budget(&BudgetQuery { method: Method::NonAdaptive, ..base.clone() })?;
    let mut rows = vec![row(Method::NonAdaptive, &na, None)?];
    for &k in cycles {
        let method = Method::Adaptive { cycles: k };
        let a = find_required_budget(&BudgetQuery { method, ..base.clone() })?;
        rows.push(row(method, &a, na.per_channel)?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn query(target: f64, method: Method) -> BudgetQuery {
        BudgetQuery {
            target_error: target,
            method,
            n: 100,
            epsilon: 0.1,
            gamma: 3.0,
            t: 2,
            trials: 200,
            seed: 4,
            m_max: 30,
        }
    }

    #[test]
    fn loose_target_met_at_one() {
        let r = find_required_budget(&query(1.0 - 1e-9, Method::NonAdaptive)).unwrap();
        assert_eq!(r.per_channel, Some(1.0));
        let r = find_required_budget(&query(1.0 - 1e-9, Method::Adaptive { cycles: 0 })).unwrap();
        assert_eq!(r.per_channel, Some(1.0));
    }

    #[test]
    fn impossible_target_is_reported() {
        let mut q = query(1e-6, Method::NonAdaptive);
        q.m_max = 3;
        let r = find_required_budget(&q).unwrap();
        assert!(!r.attainable());
        assert_eq!(r.probes.len(), 1);
    }

    #[test]
    fn answer_is_the_boundary() {
        let r = find_required_budget(&query(0.1, Method::NonAdaptive)).unwrap();
        let m = r.per_channel.unwrap();
        let at = r.probes.iter().find(|p| p.per_channel == m).unwrap();
        assert!(at.err_hi <= 0.1);
        if m > 1.0 {
            let below = r.probes.iter().find(|p| p.per_channel == m - 1.0).unwrap();
            assert!(below.err_hi > 0.1);
        }
        assert!(r.probes.windows(2).all(|w| w[0].total_budget < w[1].total_budget));
    }

    #[test]
    fn adaptive_resolution_is_one_sample() {
        let r = find_required_budget(&query(0.1, Method::Adaptive { cycles: 2 })).unwrap();
        let m = r.per_channel.unwrap();
        assert_eq!((m * 100.0).round(), m * 100.0);
    }

    #[test]
    fn table_rows() {
        let rows = agility_table(&query(0.2, Method::NonAdaptive), &[1, 2]).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!((rows[0].method.as_str(), rows[0].k), ("nonadaptive", 0));
        assert!(rows[0].gain.is_none());
        for r in &rows[1..] {
            let want = rows[0].per_channel.unwrap() / r.per_channel.unwrap();
            assert_eq!(r.gain, Some(want));
            assert!(r.gain_lower_bound.is_some());
        }
    }

    #[test]
    fn rejects_bad_target() {
        assert!(find_required_budget(&query(0.0, Method::NonAdaptive)).is_err());
        assert!(find_required_budget(&query(1.0, Method::NonAdaptive)).is_err());
    }
}
