//! The non-adaptive detector against its exact finite-n error.
//!
//! Success means the T-th smallest hole energy lies below every occupied
//! energy. Conditioning on the hole count n0 ~ Bin(n, eps):
//!
//! P(success | n0) = int f_{T:n0}(y) * S_occ(y)^(n - n0) dy
//!
//! with f_{T:n0} the density of the T-th order statistic of n0 Gamma(M, 1)
//! draws and S_occ the survival function of Gamma(M, 1 + gamma). Everything
//! below uses closed forms for integer shape and Simpson's rule.

use crate::experiments::{simulate_cell, Detector};
use crate::theory::p_na_asymptotic;
use crate::ScenarioConfig;

fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

/// `(cdf, sf, pdf)` of Gamma(m, scale) by the Poisson sum.
fn gamma_parts(m: u32, scale: f64, y: f64) -> (f64, f64, f64) {
    let x = y / scale;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..m {
        term *= x / k as f64;
        sum += term;
    }
    let sf = (-x).exp() * sum;
    // term is x^(m-1) / (m-1)! after the loop
    let pdf = (-x).exp() * term / scale;
    (1.0 - sf, sf, pdf)
}

fn success_given(n0: usize, n1: usize, m: u32, gamma: f64, t: usize) -> f64 {
    if n0 < t {
        return 0.0;
    }
    let log_coef = ln_factorial(n0) - ln_factorial(t - 1) - ln_factorial(n0 - t);
    let integrand = |y: f64| {
        let (f, s, pdf) = gamma_parts(m, 1.0, y);
        let (_, s_occ, _) = gamma_parts(m, 1.0 + gamma, y);
        if pdf <= 0.0 || s_occ <= 0.0 || (t > 1 && f <= 0.0) {
            return 0.0;
        }
        let lower = if t > 1 { (t - 1) as f64 * f.ln() } else { 0.0 };
        (log_coef + lower + (n0 - t) as f64 * s.ln() + pdf.ln() + n1 as f64 * s_occ.ln()).exp()
    };
    let (a, b, steps) = (0.0, 80.0, 16_000);
    let h = (b - a) / steps as f64;
    let mut acc = integrand(a) + integrand(b);
    for i in 1..steps {
        acc += integrand(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

fn exact_error(n: usize, eps: f64, gamma: f64, m: u32, t: usize) -> f64 {
    let mut success = 0.0;
    for n0 in 0..=n {
        let ln_w = ln_factorial(n) - ln_factorial(n0) - ln_factorial(n - n0)
            + n0 as f64 * eps.ln()
            + (n - n0) as f64 * (-eps).ln_1p();
        let w = ln_w.exp();
        if w < 1e-15 {
            continue;
        }
        success += w * success_given(n0, n - n0, m, gamma, t);
    }
    1.0 - success
}

fn reference_cell(n: usize) -> ScenarioConfig {
    ScenarioConfig::from_exponents(n, 1.0 / 3.0, 0.2, 2).unwrap()
}

#[test]
fn oracle_sanity() {
    // one hole vs one occupied channel with M = 1: P(E0 < E1) = (1+g)/(2+g)
    let p = success_given(1, 1, 1, 3.0, 1);
    assert!((p - 4.0 / 5.0).abs() < 1e-9, "{p}");
    // no occupied channels: always success once enough holes exist
    assert!((success_given(5, 0, 3, 1.0, 2) - 1.0).abs() < 1e-9);
}

#[test]
fn simulation_matches_exact_error_at_n100() {
    let c = reference_cell(100);
    let exact = exact_error(c.n, c.epsilon, c.gamma, 5, 2);
    let tally = simulate_cell(&c, &Detector::NonAdaptive { samples_per_channel: 5 }, 20_000, 1).unwrap();
    let sigma = (exact * (1.0 - exact) / 20_000.0).sqrt();
    assert!((tally.error_rate() - exact).abs() < 4.0 * sigma, "{} vs {exact}", tally.error_rate());
    assert!((exact - 0.4873).abs() < 1e-3, "{exact}");
    // the large-n closed form sits far below at this size
    let closed = p_na_asymptotic(c.gamma, 5, c.epsilon, 2).unwrap();
    assert!((closed - 0.07603).abs() < 1e-4, "{closed}");
}

#[test]
fn simulation_matches_exact_error_at_n1000() {
    let c = reference_cell(1000);
    let exact = exact_error(c.n, c.epsilon, c.gamma, 5, 2);
    let tally = simulate_cell(&c, &Detector::NonAdaptive { samples_per_channel: 5 }, 10_000, 2).unwrap();
    let sigma = (exact * (1.0 - exact) / 10_000.0).sqrt();
    assert!((tally.error_rate() - exact).abs() < 4.0 * sigma, "{} vs {exact}", tally.error_rate());
}

#[test]
fn more_samples_help() {
    let c = reference_cell(300);
    let errs: Vec<f64> = [3u32, 6, 12]
        .iter()
        .map(|&m| simulate_cell(&c, &Detector::NonAdaptive { samples_per_channel: m }, 4000, 3).unwrap().error_rate())
        .collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
}
