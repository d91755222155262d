//! Hole detection procedures.
//!
//! The non-adaptive detector spreads the budget evenly and keeps the `T`
//! channels with the smallest energies. The adaptive detector first runs `K`
//! exploration cycles that keep only channels whose fresh energy falls below
//! `median(Gamma(M_k, 1)) * (1 + gamma)`, then spends whatever budget is left
//! on the survivors and applies the same smallest-`T` rule to them.

#[cfg(test)]
mod exact_error;
mod select;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use select::{exploration_cycle, map_log_statistic, map_statistic, robust_select};

use crate::error::{Error, Result};
use crate::model::{measure_into, Energies, MeasurementMode, Realization, ScenarioConfig};
use crate::stats::gamma_median;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureKind {
    None,
    PickedOccupied,
    InsufficientSurvivors,
    BudgetExhausted,
}

impl FailureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FailureKind::None => "none",
            FailureKind::PickedOccupied => "picked-occupied",
            FailureKind::InsufficientSurvivors => "insufficient-survivors",
            FailureKind::BudgetExhausted => "budget-exhausted",
        }
    }
}

/// Holes (`m_k`) and occupied channels (`l_k`) still in play after a cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Retention {
    pub holes: usize,
    pub occupied: usize,
}

impl Retention {
    fn count(realization: &Realization, indices: &[usize]) -> Self {
        let holes = indices.iter().filter(|&&i| realization.is_hole(i)).count();
        Retention { holes, occupied: indices.len() - holes }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionOutcome {
    pub selected: Vec<usize>,
    pub success: bool,
    pub failure_kind: FailureKind,
    /// Entry 0 is the full channel set; entry `k` follows exploration cycle `k`.
    pub retention_trace: Vec<Retention>,
    pub samples_spent: u64,
}

impl DetectionOutcome {
    fn failed(kind: FailureKind, trace: Vec<Retention>, spent: u64) -> Self {
        DetectionOutcome {
            selected: Vec::new(),
            success: false,
            failure_kind: kind,
            retention_trace: trace,
            samples_spent: spent,
        }
    }

    fn classify(realization: &Realization, t: usize, selected: Vec<usize>, trace: Vec<Retention>, spent: u64) -> Self {
        let all_holes = selected.iter().all(|&i| realization.is_hole(i));
        let success = all_holes && selected.len() == t;
        DetectionOutcome {
            selected,
            success,
            failure_kind: if success { FailureKind::None } else { FailureKind::PickedOccupied },
            retention_trace: trace,
            samples_spent: spent,
        }
    }
}

/// Integer sample accounting for one adaptive run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetLedger {
    total_budget: u64,
    per_cycle_allocation: Vec<u32>,
    detection_allocation: Option<u64>,
    consumed: u64,
}

impl BudgetLedger {
    pub fn new(total_budget: u64, per_cycle_allocation: Vec<u32>) -> Self {
        Self { total_budget, per_cycle_allocation, detection_allocation: None, consumed: 0 }
    }

    pub fn total_budget(&self) -> u64 {
        self.total_budget
    }

    pub fn per_cycle_allocation(&self) -> &[u32] {
        &self.per_cycle_allocation
    }

    pub fn detection_allocation(&self) -> Option<u64> {
        self.detection_allocation
    }

    pub fn consumed(&self) -> u64 {
        self.consumed
    }

    pub fn remaining(&self) -> u64 {
        self.total_budget - self.consumed
    }

    /// Charges `per_channel * channels` samples; refuses (leaving the ledger
    /// untouched) if that would overrun the budget.
    pub fn try_charge(&mut self, per_channel: u64, channels: usize) -> bool {
        match per_channel.checked_mul(channels as u64) {
            Some(cost) if cost <= self.remaining() => {
                self.consumed += cost;
                true
            }
            _ => false,
        }
    }

    /// Fixes the detection-phase allocation once exploration is over.
    pub fn settle_detection(&mut self, survivors: usize) -> Result<u64> {
        let m = compute_detection_allocation(self.total_budget, self.consumed, survivors)?;
        self.detection_allocation = Some(m);
        Ok(m)
    }
}

/// `floor((budget - consumed) / survivors)`.
pub fn compute_detection_allocation(budget: u64, consumed: u64, survivors: usize) -> Result<u64> {
    if survivors == 0 {
        return Err(Error::InsufficientSurvivors { needed: 1, available: 0 });
    }
    if consumed > budget {
        return Err(Error::domain(format!("consumed {consumed} exceeds budget {budget}")));
    }
    Ok((budget - consumed) / survivors as u64)
}

/// Exploration schedule and total budget for [`run_adaptive`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptivePlan {
    total_budget: u64,
    exploration: Vec<u32>,
    medians: Vec<f64>,
}

impl AdaptivePlan {
    /// `cycles` exploration cycles of one sample per channel.
    pub fn new(cycles: usize, total_budget: u64) -> Result<Self> {
        Self::with_allocations(total_budget, vec![1; cycles])
    }

    pub fn with_allocations(total_budget: u64, exploration: Vec<u32>) -> Result<Self> {
        let medians = exploration.iter().map(|&m| gamma_median(m)).collect::<Result<Vec<_>>>()?;
        Ok(Self { total_budget, exploration, medians })
    }

    pub fn cycles(&self) -> usize {
        self.exploration.len()
    }

    pub fn total_budget(&self) -> u64 {
        self.total_budget
    }

    pub fn exploration(&self) -> &[u32] {
        &self.exploration
    }

    /// `lambda_k`, the median of `Gamma(M_k, 1)`, per cycle.
    pub fn medians(&self) -> &[f64] {
        &self.medians
    }
}

/// Measures every channel `samples_per_channel` times and keeps the `T`
/// lowest energies.
pub fn run_nonadaptive<R: Rng + ?Sized>(
    config: &ScenarioConfig,
    realization: &Realization,
    samples_per_channel: u32,
    rng: &mut R,
) -> Result<DetectionOutcome> {
    config.validate()?;
    check_realization(config, realization)?;
    if samples_per_channel < 1 {
        return Err(Error::domain("samples per channel must be >= 1"));
    }
    let all: Vec<usize> = (0..config.n).collect();
    let trace = vec![Retention::count(realization, &all)];
    let mut energies = Energies::unmeasured(config.n);
    measure_into(realization, &all, samples_per_channel, MeasurementMode::SufficientStatistic, rng, &mut energies)?;
    let selected = robust_select(&energies, config.target_holes)?;
    let spent = samples_per_channel as u64 * config.n as u64;
    Ok(DetectionOutcome::classify(realization, config.target_holes, selected, trace, spent))
}

/// What is left after the exploration cycles.
#[derive(Debug, Clone, PartialEq)]
pub struct Exploration {
    /// Surviving channel indices, ascending.
    pub retained: Vec<usize>,
    pub trace: Vec<Retention>,
    pub ledger: BudgetLedger,
    /// Set when a cycle could not be paid for; `retained` is then the set
    /// entering that cycle.
    pub exhausted: bool,
}

/// Runs only the exploration cycles of `plan`.
///
/// Cycle `k` measures every retained channel with `M_k` fresh samples and
/// keeps those strictly below `lambda_k * (1 + gamma)`.
pub fn run_exploration<R: Rng + ?Sized>(
    config: &ScenarioConfig,
    realization: &Realization,
    plan: &AdaptivePlan,
    rng: &mut R,
) -> Result<Exploration> {
    config.validate()?;
    check_realization(config, realization)?;
    let mut ledger = BudgetLedger::new(plan.total_budget, plan.exploration.clone());
    let mut retained: Vec<usize> = (0..config.n).collect();
    let mut trace = Vec::with_capacity(plan.cycles() + 1);
    trace.push(Retention::count(realization, &retained));

    for (&m_k, &lambda) in plan.exploration.iter().zip(&plan.medians) {
        if !ledger.try_charge(m_k as u64, retained.len()) {
            return Ok(Exploration { retained, trace, ledger, exhausted: true });
        }
        let mut energies = Energies::unmeasured(config.n);
        measure_into(realization, &retained, m_k, MeasurementMode::SufficientStatistic, rng, &mut energies)?;
        retained = exploration_cycle(&retained, &energies, lambda * (1.0 + config.gamma))?;
        trace.push(Retention::count(realization, &retained));
    }
    Ok(Exploration { retained, trace, ledger, exhausted: false })
}

/// Exploration followed by detection on the survivors.
///
/// Budget overruns and too few survivors end the run with a failure outcome
/// rather than an error; errors are reserved for invalid inputs.
pub fn run_adaptive<R: Rng + ?Sized>(
    config: &ScenarioConfig,
    realization: &Realization,
    plan: &AdaptivePlan,
    rng: &mut R,
) -> Result<DetectionOutcome> {
    let Exploration { retained, trace, mut ledger, exhausted } = run_exploration(config, realization, plan, rng)?;
    if exhausted {
        return Ok(DetectionOutcome::failed(FailureKind::BudgetExhausted, trace, ledger.consumed()));
    }
    if retained.len() < config.target_holes {
        return Ok(DetectionOutcome::failed(FailureKind::InsufficientSurvivors, trace, ledger.consumed()));
    }
    let m_detect = ledger.settle_detection(retained.len())?;
    if m_detect == 0 {
        return Ok(DetectionOutcome::failed(FailureKind::BudgetExhausted, trace, ledger.consumed()));
    }
    let m_detect =
        u32::try_from(m_detect).map_err(|_| Error::domain(format!("detection allocation {m_detect} exceeds u32")))?;
    let charged = ledger.try_charge(m_detect as u64, retained.len());
    debug_assert!(charged);

    // every channel outside the survivors carries +inf
    let mut detection = Energies::unmeasured(config.n);
    measure_into(realization, &retained, m_detect, MeasurementMode::SufficientStatistic, rng, &mut detection)?;
    let selected = robust_select(&detection, config.target_holes)?;
    Ok(DetectionOutcome::classify(realization, config.target_holes, selected, trace, ledger.consumed()))
}

fn check_realization(config: &ScenarioConfig, realization: &Realization) -> Result<()> {
    if realization.n() != config.n {
        return Err(Error::domain(format!(
            "realization has {} channels, scenario expects {}",
            realization.n(),
            config.n
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{draw_occupancy, PowerModel};
    use crate::stats::{gamma_cdf, gamma_tail_bound, GammaParams};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn allocation_examples() {
        assert_eq!(compute_detection_allocation(500, 187, 11).unwrap(), 28);
        assert_eq!(compute_detection_allocation(500, 500, 3).unwrap(), 0);
        assert_eq!(compute_detection_allocation(500, 123, 1).unwrap(), 377);
        assert!(matches!(compute_detection_allocation(500, 0, 0), Err(Error::InsufficientSurvivors { .. })));
        assert!(compute_detection_allocation(10, 11, 1).is_err());
    }

    #[test]
    fn ledger_refuses_overrun() {
        let mut l = BudgetLedger::new(10, vec![1]);
        assert!(l.try_charge(2, 4));
        assert!(!l.try_charge(1, 3));
        assert_eq!(l.consumed(), 8);
        assert_eq!(l.settle_detection(2).unwrap(), 1);
        assert_eq!(l.detection_allocation(), Some(1));
    }

    #[test]
    fn nonadaptive_separable_success() {
        // holes are essentially silent relative to huge occupied powers
        let occ = vec![true, false, true, true, false, true];
        let real = Realization::worst_case(occ, 1e9).unwrap();
        let cfg = ScenarioConfig::new(6, 0.3, 1e9, 2).unwrap();
        let out = run_nonadaptive(&cfg, &real, 5, &mut rng(1)).unwrap();
        assert!(out.success);
        assert_eq!(out.selected, vec![1, 4]);
        assert_eq!(out.failure_kind, FailureKind::None);
    }

    #[test]
    fn nonadaptive_accounting() {
        let cfg = ScenarioConfig::new(100, 0.046, 2.51, 2).unwrap();
        let real = draw_occupancy(&cfg, &PowerModel::WorstCase, &mut rng(2)).unwrap();
        let out = run_nonadaptive(&cfg, &real, 5, &mut rng(3)).unwrap();
        assert_eq!(out.samples_spent, 500);
        assert_eq!(out.selected.len(), 2);
    }

    #[test]
    fn zero_cycles_matches_nonadaptive() {
        let cfg = ScenarioConfig::new(200, 0.05, 3.0, 2).unwrap();
        let plan = AdaptivePlan::new(0, 1000).unwrap();
        for seed in 0..200 {
            let real = draw_occupancy(&cfg, &PowerModel::WorstCase, &mut rng(seed)).unwrap();
            let a = run_adaptive(&cfg, &real, &plan, &mut rng(seed + 1000)).unwrap();
            let b = run_nonadaptive(&cfg, &real, 5, &mut rng(seed + 1000)).unwrap();
            assert_eq!(a.selected, b.selected);
            assert_eq!(a.success, b.success);
            assert_eq!(a.samples_spent, b.samples_spent);
        }
    }

    #[test]
    fn default_exploration_is_one_sample() {
        let plan = AdaptivePlan::new(4, 5000).unwrap();
        assert_eq!(plan.exploration(), &[1, 1, 1, 1]);
        assert!((plan.medians()[0] - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn budget_exhausted_in_exploration() {
        let cfg = ScenarioConfig::new(100, 0.1, 3.0, 2).unwrap();
        let real = draw_occupancy(&cfg, &PowerModel::WorstCase, &mut rng(4)).unwrap();
        let plan = AdaptivePlan::new(3, 120).unwrap();
        let out = run_adaptive(&cfg, &real, &plan, &mut rng(5)).unwrap();
        assert_eq!(out.failure_kind, FailureKind::BudgetExhausted);
        assert!(!out.success);
        assert!(out.samples_spent <= 120);
    }

    #[test]
    fn budget_exhausted_at_detection() {
        let cfg = ScenarioConfig::new(100, 0.1, 3.0, 2).unwrap();
        let real = draw_occupancy(&cfg, &PowerModel::WorstCase, &mut rng(6)).unwrap();
        // the single exploration cycle takes exactly the whole budget
        let plan = AdaptivePlan::new(1, 100).unwrap();
        let out = run_adaptive(&cfg, &real, &plan, &mut rng(7)).unwrap();
        assert_eq!(out.failure_kind, FailureKind::BudgetExhausted);
        assert_eq!(out.samples_spent, 100);
    }

    #[test]
    fn insufficient_survivors() {
        // all occupied at enormous power: exploration empties the set
        let cfg = ScenarioConfig::new(50, 0.01, 1.0, 2).unwrap();
        let real = Realization::from_parts(vec![true; 50], vec![1e6; 50]).unwrap();
        let plan = AdaptivePlan::new(2, 10_000).unwrap();
        let out = run_adaptive(&cfg, &real, &plan, &mut rng(8)).unwrap();
        assert_eq!(out.failure_kind, FailureKind::InsufficientSurvivors);
        assert_eq!(out.retention_trace.len(), 3);
    }

    #[test]
    fn trace_and_outcome_shape() {
        let cfg = ScenarioConfig::from_exponents(1000, 1.0 / 3.0, 0.2, 2).unwrap();
        let real = draw_occupancy(&cfg, &PowerModel::WorstCase, &mut rng(9)).unwrap();
        let plan = AdaptivePlan::new(4, 5000).unwrap();
        let out = run_adaptive(&cfg, &real, &plan, &mut rng(10)).unwrap();
        assert_eq!(out.retention_trace.len(), 5);
        assert_eq!(out.retention_trace[0].holes, real.hole_count());
        for w in out.retention_trace.windows(2) {
            assert!(w[1].holes <= w[0].holes && w[1].occupied <= w[0].occupied);
        }
        let last = out.retention_trace[4].occupied as f64;
        let first = out.retention_trace[0].occupied as f64;
        assert!((last / first - 1.0 / 16.0).abs() < 0.03);
        assert!(out.samples_spent <= 5000);
        assert!(out.selected.len() <= 2);
    }

    #[test]
    fn determinism() {
        let cfg = ScenarioConfig::new(300, 0.03, 2.0, 2).unwrap();
        let real = draw_occupancy(&cfg, &PowerModel::WorstCase, &mut rng(11)).unwrap();
        let plan = AdaptivePlan::new(3, 1500).unwrap();
        let a = run_adaptive(&cfg, &real, &plan, &mut rng(12)).unwrap();
        let b = run_adaptive(&cfg, &real, &plan, &mut rng(12)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn outcome_json_shape() {
        let out = DetectionOutcome {
            selected: vec![3, 9],
            success: false,
            failure_kind: FailureKind::PickedOccupied,
            retention_trace: vec![Retention { holes: 4, occupied: 96 }],
            samples_spent: 500,
        };
        let v = serde_json::to_value(&out).unwrap();
        assert_eq!(v["failure_kind"], "picked-occupied");
        assert_eq!(v["selected"], serde_json::json!([3, 9]));
        assert_eq!(v["retention_trace"][0]["holes"], 4);
        assert_eq!(v["samples_spent"], 500);
        let back: DetectionOutcome = serde_json::from_value(v).unwrap();
        assert_eq!(back, out);
    }

    /// Per-channel retention rate of one exploration cycle, measured on
    /// channels that are all holes or all occupied at a fixed power.
    fn retention_rate(power: f64, gamma: f64, m_k: u32, channels: usize, trials: usize, seed: u64) -> f64 {
        let occupied = power > 0.0;
        let real = Realization::from_parts(vec![occupied; channels], vec![power; channels]).unwrap();
        let lambda = gamma_median(m_k).unwrap();
        let all: Vec<usize> = (0..channels).collect();
        let mut r = rng(seed);
        let mut kept = 0usize;
        for _ in 0..trials {
            let mut e = Energies::unmeasured(channels);
            measure_into(&real, &all, m_k, MeasurementMode::SufficientStatistic, &mut r, &mut e).unwrap();
            kept += exploration_cycle(&all, &e, lambda * (1.0 + gamma)).unwrap().len();
        }
        kept as f64 / (channels * trials) as f64
    }

    #[test]
    fn hole_retention_matches_gamma_cdf() {
        let gamma = 2.0;
        for m_k in [1u32, 3] {
            let lambda = gamma_median(m_k).unwrap();
            let thr = lambda * (1.0 + gamma);
            let params = GammaParams::new(m_k, 1.0).unwrap();
            let exact = gamma_cdf(thr, &params).unwrap();
            let rate = retention_rate(0.0, gamma, m_k, 10, 1_000, 20 + m_k as u64);
            let sigma = (exact * (1.0 - exact) / 10_000.0).sqrt();
            assert!((rate - exact).abs() < 3.0 * sigma, "m_k {m_k}: {rate} vs {exact}");
            let tail = gamma_tail_bound(thr, &params).unwrap();
            if m_k == 1 {
                assert!((tail - exact).abs() < 1e-14);
            } else {
                assert!(tail >= exact);
            }
        }
    }

    #[test]
    fn occupied_retention_halves_at_worst_case() {
        let gamma = 3.0;
        for m_k in [1u32, 2, 5] {
            let rate = retention_rate(gamma, gamma, m_k, 100, 1_000, 30 + m_k as u64);
            let sigma = (0.25f64 / 100_000.0).sqrt();
            assert!((rate - 0.5).abs() < 3.0 * sigma, "m_k {m_k}: {rate}");
            let stronger = retention_rate(1.5 * gamma, gamma, m_k, 100, 200, 40 + m_k as u64);
            assert!(stronger < 0.5);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn adaptive_never_overspends(
            n in 5usize..120,
            eps in 0.02f64..0.5,
            gamma in 0.2f64..20.0,
            cycles in 0usize..5,
            per in 0.5f64..6.0,
            m_k in 1u32..3,
            seed in any::<u64>(),
        ) {
            let cfg = ScenarioConfig::new(n, eps, gamma, 2.min(n)).unwrap();
            let real = draw_occupancy(&cfg, &PowerModel::WorstCase, &mut rng(seed)).unwrap();
            let budget = (per * n as f64) as u64;
            let plan = AdaptivePlan::with_allocations(budget, vec![m_k; cycles]).unwrap();
            let out = run_adaptive(&cfg, &real, &plan, &mut rng(seed ^ 0xabc)).unwrap();
            prop_assert!(out.samples_spent <= budget);
            prop_assert!(out.selected.len() <= cfg.target_holes);
            prop_assert!(!out.success || out.failure_kind == FailureKind::None);
        }
    }
}
