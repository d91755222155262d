//! Channel occupancy realizations and energy measurements.
//!
//! Each channel is a hole with probability `epsilon`, otherwise occupied by a
//! user whose power is at least `gamma`. Measuring channel `i` with `M`
//! samples yields `||X_i||^2`, distributed `Gamma(M, 1 + p_i Z_i)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{sample_energy_exact, sample_gamma, GammaParams};

/// One simulated wideband world.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub n: usize,
    pub epsilon: f64,
    pub gamma: f64,
    pub target_holes: usize,
}

impl ScenarioConfig {
    pub fn new(n: usize, epsilon: f64, gamma: f64, target_holes: usize) -> Result<Self> {
        let cfg = Self { n, epsilon, gamma, target_holes };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `epsilon = n^(alpha - 1)`, `gamma = n^beta`.
    pub fn from_exponents(n: usize, alpha: f64, beta: f64, target_holes: usize) -> Result<Self> {
        let nf = n as f64;
        Self::new(n, nf.powf(alpha - 1.0), nf.powf(beta), target_holes)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::domain("channel count must be >= 1"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::domain(format!("epsilon must lie in (0,1), got {}", self.epsilon)));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::domain(format!("gamma must be finite and > 0, got {}", self.gamma)));
        }
        if self.target_holes < 1 || self.target_holes > self.n {
            return Err(Error::domain(format!("target holes must lie in 1..={}, got {}", self.n, self.target_holes)));
        }
        Ok(())
    }
}

/// How occupied channels get their powers.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PowerModel {
    /// Every occupied channel sits exactly at the minimum power.
    #[default]
    WorstCase,
    /// Per-channel powers, indexed by channel; holes ignore their entry.
    FixedList(Vec<f64>),
    /// `p_i = gamma * U` with `U ~ Uniform[low, high]`, `1 <= low <= high`.
    /// Consumes one uniform per occupied channel.
    ScaledRandom { low: f64, high: f64 },
}

/// Frozen occupancy and powers for one trial. Hole powers are stored as 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "RealizationDoc", try_from = "RealizationDoc")]
pub struct Realization {
    occupied: Vec<bool>,
    powers: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RealizationDoc {
    n: usize,
    occupancy: Vec<u8>,
    powers: Vec<f64>,
}

impl From<Realization> for RealizationDoc {
    fn from(r: Realization) -> Self {
        RealizationDoc {
            n: r.occupied.len(),
            occupancy: r.occupied.iter().map(|&z| z as u8).collect(),
            powers: r.powers,
        }
    }
}

impl TryFrom<RealizationDoc> for Realization {
    type Error = Error;

    fn try_from(doc: RealizationDoc) -> Result<Self> {
        if doc.occupancy.len() != doc.n || doc.powers.len() != doc.n {
            return Err(Error::domain("realization lengths disagree with n"));
        }
        let occupied = doc
            .occupancy
            .iter()
            .map(|&z| match z {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(Error::domain(format!("occupancy bit must be 0 or 1, got {other}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Realization::from_parts(occupied, doc.powers)
    }
}

impl Realization {
    /// Builds a realization, checking that holes carry zero power and occupied
    /// channels carry positive power.
    pub fn from_parts(occupied: Vec<bool>, powers: Vec<f64>) -> Result<Self> {
        if occupied.len() != powers.len() {
            return Err(Error::domain("occupancy and power lengths differ"));
        }
        for (i, (&z, &p)) in occupied.iter().zip(&powers).enumerate() {
            let ok = if z { p > 0.0 && p.is_finite() } else { p == 0.0 };
            if !ok {
                return Err(Error::domain(format!("channel {i}: power {p} inconsistent with occupancy")));
            }
        }
        Ok(Self { occupied, powers })
    }

    /// Worst-case powers (`gamma` on every occupied channel) for a given occupancy.
    pub fn worst_case(occupied: Vec<bool>, gamma: f64) -> Result<Self> {
        let powers = occupied.iter().map(|&z| if z { gamma } else { 0.0 }).collect();
        Self::from_parts(occupied, powers)
    }

    pub fn n(&self) -> usize {
        self.occupied.len()
    }

    pub fn occupied(&self) -> &[bool] {
        &self.occupied
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn is_hole(&self, i: usize) -> bool {
        !self.occupied[i]
    }

    pub fn hole_count(&self) -> usize {
        self.occupied.iter().filter(|&&z| !z).count()
    }

    pub fn occupied_count(&self) -> usize {
        self.n() - self.hole_count()
    }

    /// Per-sample variance `1 + p_i Z_i` of channel `i`.
    pub fn variance(&self, i: usize) -> f64 {
        1.0 + self.powers[i]
    }

    /// Checks the minimum-power constraint against a scenario.
    pub fn respects(&self, config: &ScenarioConfig) -> bool {
        self.n() == config.n && self.occupied.iter().zip(&self.powers).all(|(&z, &p)| !z || p >= config.gamma)
    }
}

/// Draws occupancy (one uniform per channel, hole iff `u < epsilon`) and then
/// powers per `model`.
pub fn draw_occupancy<R: Rng + ?Sized>(
    config: &ScenarioConfig,
    model: &PowerModel,
    rng: &mut R,
) -> Result<Realization> {
    config.validate()?;
    let occupied: Vec<bool> = (0..config.n).map(|_| rng.gen::<f64>() >= config.epsilon).collect();
    let powers = match model {
        PowerModel::WorstCase => occupied.iter().map(|&z| if z { config.gamma } else { 0.0 }).collect(),
        PowerModel::FixedList(list) => {
            if list.len() != config.n {
                return Err(Error::domain("fixed power list length differs from n"));
            }
            occupied
                .iter()
                .zip(list)
                .map(|(&z, &p)| {
                    if !z {
                        Ok(0.0)
                    } else if p >= config.gamma {
                        Ok(p)
                    } else {
                        Err(Error::domain(format!("power {p} below gamma {}", config.gamma)))
                    }
                })
                .collect::<Result<Vec<_>>>()?
        }
        &PowerModel::ScaledRandom { low, high } => {
            if !(low >= 1.0 && high >= low && high.is_finite()) {
                return Err(Error::domain("scaled-random powers need 1 <= low <= high"));
            }
            occupied
                .iter()
                .map(|&z| {
                    if z {
                        let u: f64 = rng.gen();
                        config.gamma * (low + (high - low) * u)
                    } else {
                        0.0
                    }
                })
                .collect()
        }
    };
    Realization::from_parts(occupied, powers)
}

/// How a channel's energy is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasurementMode {
    /// Draw complex samples and sum their squared magnitudes.
    ExactVector,
    /// Draw the Gamma-distributed energy directly.
    #[default]
    SufficientStatistic,
}

/// Energies over all `n` channels; unmeasured channels hold `+inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct Energies(Vec<f64>);

impl Energies {
    pub fn unmeasured(n: usize) -> Self {
        Energies(vec![f64::INFINITY; n])
    }

    pub fn from_values(values: Vec<f64>) -> Self {
        Energies(values)
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, v: f64) {
        self.0[i] = v;
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// Measures each channel in `indices` with `samples_per_channel` fresh samples.
///
/// Indices are validated before any randomness is consumed. Channels are
/// visited in the order given; stream use is `samples_per_channel` uniforms
/// per channel in sufficient-statistic mode and twice that in exact mode.
pub fn measure_energies<R: Rng + ?Sized>(
    realization: &Realization,
    indices: &[usize],
    samples_per_channel: u32,
    mode: MeasurementMode,
    rng: &mut R,
) -> Result<Energies> {
    let mut out = Energies::unmeasured(realization.n());
    measure_into(realization, indices, samples_per_channel, mode, rng, &mut out)?;
    Ok(out)
}

pub(crate) fn measure_into<R: Rng + ?Sized>(
    realization: &Realization,
    indices: &[usize],
    samples_per_channel: u32,
    mode: MeasurementMode,
    rng: &mut R,
    out: &mut Energies,
) -> Result<()> {
    if samples_per_channel < 1 {
        return Err(Error::domain("samples per channel must be >= 1"));
    }
    let n = realization.n();
    if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index: bad, n });
    }
    for &i in indices {
        let variance = realization.variance(i);
        let energy = match mode {
            MeasurementMode::SufficientStatistic => {
                let params = GammaParams::new(samples_per_channel, variance)?;
                sample_gamma(&params, rng)
            }
            MeasurementMode::ExactVector => sample_energy_exact(samples_per_channel, variance, rng)?,
        };
        out.set(i, energy);
    }
    Ok(())
}
