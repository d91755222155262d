//! Random draws for the energy statistic.
//!
//! Stream consumption is fixed so that trial replay is exact:
//! `sample_gamma` takes `shape` uniforms, `sample_energy_exact` takes
//! `2 * count` uniforms, `sample_exponential` takes one.

use rand::Rng;

use super::GammaParams;
use crate::error::{Error, Result};

// 16 factors in (0, 1] each >= 2^-53 cannot underflow a product.
const PRODUCT_CHUNK: u32 = 16;

/// One `Exp(scale)` draw by inversion.
#[inline]
pub fn sample_exponential<R: Rng + ?Sized>(scale: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.gen();
    -scale * (1.0 - u).ln()
}

/// One `Gamma(shape, scale)` draw as a sum of `shape` exponentials.
///
/// The exponentials are combined as `-ln` of a product of uniforms in
/// chunks, which needs one logarithm per chunk instead of one per sample.
pub fn sample_gamma<R: Rng + ?Sized>(params: &GammaParams, rng: &mut R) -> f64 {
    -params.scale() * neg_log_uniform_product(params.shape(), rng)
}

#[inline]
pub(crate) fn neg_log_uniform_product<R: Rng + ?Sized>(count: u32, rng: &mut R) -> f64 {
    let mut total = 0.0;
    let mut left = count;
    while left > 0 {
        let take = left.min(PRODUCT_CHUNK);
        let mut prod = 1.0_f64;
        for _ in 0..take {
            let u: f64 = rng.gen();
            prod *= 1.0 - u;
        }
        total += prod.ln();
        left -= take;
    }
    total
}

/// `||X||^2` for a vector of `count` i.i.d. `CN(0, variance)` samples, built
/// from explicit real and imaginary parts (Box-Muller, variance/2 per part).
pub fn sample_energy_exact<R: Rng + ?Sized>(count: u32, variance: f64, rng: &mut R) -> Result<f64> {
    if count < 1 {
        return Err(Error::domain("sample count must be >= 1"));
    }
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(Error::domain(format!("variance must be finite and > 0, got {variance}")));
    }
    let sigma = (0.5 * variance).sqrt();
    let mut energy = 0.0;
    for _ in 0..count {
        let u1: f64 = rng.gen();
        let u2: f64 = rng.gen();
        let radius = (-2.0 * (1.0 - u1).ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        let re = sigma * radius * theta.cos();
        let im = sigma * radius * theta.sin();
        energy += re * re + im * im;
    }
    Ok(energy)
}
