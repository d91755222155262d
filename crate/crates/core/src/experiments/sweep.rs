//! Reliability sweeps over channel counts and exploration depths.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::sim::{simulate_cell, CellTally, Detector};
use crate::error::{Error, Result};
use crate::model::ScenarioConfig;
use crate::theory::{p_na_asymptotic, TheoryPoint};

/// How `epsilon` follows `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EpsilonRule {
    /// `epsilon = n^(alpha - 1)`.
    Alpha(f64),
    /// One value per entry of `n_values`, or a single value for all.
    Values(Vec<f64>),
}

/// How `gamma` follows `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GammaRule {
    /// `gamma = n^beta`.
    Beta(f64),
    /// One value per entry of `n_values`, or a single value for all.
    Values(Vec<f64>),
}

fn pick(values: &[f64], i: usize, what: &str, cells: usize) -> Result<f64> {
    match values.len() {
        1 => Ok(values[0]),
        len if len == cells => Ok(values[i]),
        len => Err(Error::domain(format!("{what} list has {len} entries for {cells} channel counts"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub n_values: Vec<usize>,
    pub epsilon_rule: EpsilonRule,
    pub gamma_rule: GammaRule,
    /// Per-channel budget; both detectors get `M n` samples in total.
    pub m: u32,
    pub k_values: Vec<u32>,
    pub t: usize,
    pub trials: u64,
    pub master_seed: u64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::domain("trials must be >= 1"));
        }
        if self.m < 1 {
            return Err(Error::domain("M must be >= 1"));
        }
        if self.n_values.is_empty() {
            return Err(Error::domain("no channel counts given"));
        }
        let floor = self.t.max(2);
        if let Some(&n) = self.n_values.iter().find(|&&n| n < floor) {
            return Err(Error::domain(format!("n = {n} is below max(T, 2) = {floor}")));
        }
        self.scenarios().map(|_| ())
    }

    /// The scenario of each entry of `n_values`, in order.
    pub fn scenarios(&self) -> Result<Vec<ScenarioConfig>> {
        let cells = self.n_values.len();
        self.n_values
            .iter()
            .enumerate()
            .map(|(i, &n)| {
                let nf = n as f64;
                let epsilon = match &self.epsilon_rule {
                    EpsilonRule::Alpha(a) => nf.powf(a - 1.0),
                    EpsilonRule::Values(v) => pick(v, i, "epsilon", cells)?,
                };
                let gamma = match &self.gamma_rule {
                    GammaRule::Beta(b) => nf.powf(*b),
                    GammaRule::Values(v) => pick(v, i, "gamma", cells)?,
                };
                ScenarioConfig::new(n, epsilon, gamma, self.t)
            })
            .collect()
    }
}

/// One CSV line of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub n: usize,
    pub epsilon: f64,
    pub gamma: f64,
    #[serde(rename = "M")]
    pub m: f64,
    /// Exploration cycles; 0 for the non-adaptive detector.
    #[serde(rename = "K")]
    pub k: u32,
    #[serde(rename = "T")]
    pub t: usize,
    pub trials: u64,
    pub err_emp: f64,
    pub err_lo: f64,
    pub err_hi: f64,
    pub err_theory: f64,
    pub mean_samples: f64,
    pub fail_picked_occupied: u64,
    pub fail_insufficient: u64,
    pub fail_budget: u64,
}

pub const RESULTS_HEADER: &str = "experiment,n,epsilon,gamma,M,K,T,trials,err_emp,err_lo,err_hi,err_theory,mean_samples,fail_picked_occupied,fail_insufficient,fail_budget";

pub const EXPERIMENT_NONADAPTIVE: &str = "reliability-nonadaptive";
pub const EXPERIMENT_ADAPTIVE: &str = "reliability-adaptive";

impl ResultRow {
    pub fn from_tally(
        experiment: &str,
        config: &ScenarioConfig,
        m: f64,
        k: u32,
        tally: &CellTally,
        theory: f64,
    ) -> Self {
        let (lo, hi) = tally.interval();
        ResultRow {
            experiment: experiment.to_string(),
            n: config.n,
            epsilon: config.epsilon,
            gamma: config.gamma,
            m,
            k,
            t: config.target_holes,
            trials: tally.trials,
            err_emp: tally.error_rate(),
            err_lo: lo,
            err_hi: hi,
            err_theory: theory,
            mean_samples: tally.mean_samples(),
            fail_picked_occupied: tally.picked_occupied,
            fail_insufficient: tally.insufficient,
            fail_budget: tally.budget_exhausted,
        }
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.err_hi - self.err_lo)
    }

    /// Within `max(3 * Wilson half-width, 25%)` of the closed form.
    pub fn agrees_with_theory(&self) -> bool {
        (self.err_emp - self.err_theory).abs() <= (3.0 * self.half_width()).max(0.25 * self.err_theory)
    }
}

/// Both detectors on every cell: non-adaptive with `M` samples per channel,
/// then adaptive on budget `M n` for each `K`.
///
/// Trials run on the current rayon pool; row order and content do not depend
/// on the number of threads.
pub fn run_reliability_sweep(spec: &SweepSpec) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    let mut rows = Vec::with_capacity(spec.n_values.len() * (1 + spec.k_values.len()));
    for config in spec.scenarios()? {
        let t = config.target_holes as u32;
        let budget = spec.m as u64 * config.n as u64;

        let tally = simulate_cell(
            &config,
            &Detector::NonAdaptive { samples_per_channel: spec.m },
            spec.trials,
            spec.master_seed,
        )?;
        let theory = p_na_asymptotic(config.gamma, spec.m, config.epsilon, t)?;
        rows.push(ResultRow::from_tally(EXPERIMENT_NONADAPTIVE, &config, spec.m as f64, 0, &tally, theory));

        for &k in &spec.k_values {
            let tally = simulate_cell(&config, &Detector::adaptive(k, budget)?, spec.trials, spec.master_seed)?;
            let theory = TheoryPoint::evaluate(config.gamma, spec.m, k, config.epsilon, t)?.p_a;
            rows.push(ResultRow::from_tally(EXPERIMENT_ADAPTIVE, &config, spec.m as f64, k, &tally, theory));
        }
    }
    Ok(rows)
}

/// Serializes any row type as CSV with a header line.
pub fn write_csv<W: Write, T: Serialize>(writer: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// CSV text of sweep rows. An empty sweep still gets the header.
pub fn results_csv(rows: &[ResultRow]) -> Result<String> {
    if rows.is_empty() {
        return Ok(format!("{RESULTS_HEADER}\n"));
    }
    let mut buf = Vec::new();
    write_csv(&mut buf, rows)?;
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(trials: u64) -> SweepSpec {
        SweepSpec {
            n_values: vec![20, 60],
            epsilon_rule: EpsilonRule::Alpha(1.0 / 3.0),
            gamma_rule: GammaRule::Beta(0.2),
            m: 5,
            k_values: vec![1, 2],
            t: 2,
            trials,
            master_seed: 42,
        }
    }

    #[test]
    fn header_matches_serialized_fields() {
        let rows = run_reliability_sweep(&spec(20)).unwrap();
        let text = results_csv(&rows).unwrap();
        assert_eq!(text.lines().next().unwrap(), RESULTS_HEADER);
        assert_eq!(text.lines().count(), 1 + 2 * 3);
        assert_eq!(results_csv(&[]).unwrap().trim_end(), RESULTS_HEADER);
    }

    #[test]
    fn single_trial_rows() {
        for row in run_reliability_sweep(&spec(1)).unwrap() {
            assert!(row.err_emp == 0.0 || row.err_emp == 1.0);
            let (lo, hi) = super::super::wilson_interval(row.err_emp as u64, 1);
            assert_eq!((row.err_lo, row.err_hi), (lo, hi));
        }
    }

    #[test]
    fn accounting() {
        for row in run_reliability_sweep(&spec(400)).unwrap() {
            let failures = row.fail_picked_occupied + row.fail_insufficient + row.fail_budget;
            assert_eq!(failures as f64, (row.err_emp * row.trials as f64).round());
            assert!(row.mean_samples <= row.m * row.n as f64);
            assert!(row.err_lo >= 0.0 && row.err_hi <= 1.0 && row.err_lo <= row.err_hi);
        }
    }

    #[test]
    fn spec_validation() {
        let mut s = spec(10);
        s.trials = 0;
        assert!(s.validate().is_err());
        let mut s = spec(10);
        s.n_values = vec![1];
        assert!(s.validate().is_err());
        let mut s = spec(10);
        s.epsilon_rule = EpsilonRule::Values(vec![0.1, 0.2, 0.3]);
        assert!(s.validate().is_err());
        let mut s = spec(10);
        s.epsilon_rule = EpsilonRule::Values(vec![0.1]);
        s.gamma_rule = GammaRule::Values(vec![2.0, 3.0]);
        let cells = s.scenarios().unwrap();
        assert_eq!((cells[1].epsilon, cells[1].gamma), (0.1, 3.0));
    }

    #[test]
    fn exponent_rules() {
        let cells = spec(1).scenarios().unwrap();
        assert!((cells[0].epsilon - 20f64.powf(-2.0 / 3.0)).abs() < 1e-15);
        assert!((cells[1].gamma - 60f64.powf(0.2)).abs() < 1e-15);
    }

    #[test]
    fn theory_band() {
        let mut row = ResultRow::from_tally(
            EXPERIMENT_NONADAPTIVE,
            &ScenarioConfig::new(10, 0.5, 1.0, 1).unwrap(),
            1.0,
            0,
            &CellTally { trials: 100, failures: 10, picked_occupied: 10, ..Default::default() },
            0.12,
        );
        assert!(row.agrees_with_theory());
        row.err_theory = 0.5;
        assert!(!row.agrees_with_theory());
    }
}
