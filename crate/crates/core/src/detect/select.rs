use crate::error::{Error, Result};
use crate::model::Energies;

/// Log of the per-channel MAP weight `(1+p)^-M * exp(p/(1+p) * energy)`.
pub fn map_log_statistic(energy: f64, power: f64, samples: u32) -> Result<f64> {
    if !(energy >= 0.0) {
        return Err(Error::domain(format!("energy must be >= 0, got {energy}")));
    }
    if !(power >= 0.0) {
        return Err(Error::domain(format!("power must be >= 0, got {power}")));
    }
    if samples < 1 {
        return Err(Error::domain("samples must be >= 1"));
    }
    Ok(power / (1.0 + power) * energy - samples as f64 * power.ln_1p())
}

/// The MAP weight itself; may overflow to `+inf` for very large energies,
/// in which case compare [`map_log_statistic`] values instead.
pub fn map_statistic(energy: f64, power: f64, samples: u32) -> Result<f64> {
    map_log_statistic(energy, power, samples).map(f64::exp)
}

/// Indices of the `t` smallest finite energies, ascending by index.
///
/// Ties go to the lower channel index. Non-finite entries (the `+inf`
/// sentinel of eliminated channels) are never selected.
pub fn robust_select(energies: &Energies, t: usize) -> Result<Vec<usize>> {
    let mut finite: Vec<(f64, usize)> =
        energies.as_slice().iter().enumerate().filter(|(_, e)| e.is_finite()).map(|(i, &e)| (e, i)).collect();
    if finite.len() < t {
        return Err(Error::InsufficientSurvivors { needed: t, available: finite.len() });
    }
    if t == 0 {
        return Ok(Vec::new());
    }
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if t < finite.len() {
        finite.select_nth_unstable_by(t - 1, cmp);
    }
    let mut chosen: Vec<usize> = finite[..t].iter().map(|&(_, i)| i).collect();
    chosen.sort_unstable();
    Ok(chosen)
}

/// Keeps the retained channels whose energy is strictly below `threshold`.
pub fn exploration_cycle(retained: &[usize], energies: &Energies, threshold: f64) -> Result<Vec<usize>> {
    let mut kept = Vec::with_capacity(retained.len() / 2 + 1);
    for &i in retained {
        if i >= energies.len() {
            return Err(Error::IndexOutOfRange { index: i, n: energies.len() });
        }
        let e = energies.get(i);
        if !e.is_finite() {
            return Err(Error::MissingEnergy(i));
        }
        if e < threshold {
            kept.push(i);
        }
    }
    Ok(kept)
}
