//! Fringe patterns behind an unbalanced polarization interferometer and
//! their coherence envelopes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::Spectrum;
use crate::error::{Error, Result};
use crate::units::FS;

pub const DEFAULT_TAU_POINTS: usize = 8192;
pub const DEFAULT_TAU_HALF_SPAN: f64 = 300.0 * FS;

/// The fringe must be sampled at least this many times per carrier period.
pub const SAMPLES_PER_PERIOD: f64 = 8.0;

/// Count probability versus interferometer delay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FringePattern {
    /// Delays (s).
    pub taus: Vec<f64>,
    pub values: Vec<f64>,
    /// P(0), equal to the integrated spectral weight.
    pub reference: f64,
    /// Carrier angular frequency (rad/s).
    pub carrier: f64,
}

impl FringePattern {
    pub fn normalized(&self) -> Vec<f64> {
        self.values.iter().map(|v| v / self.reference).collect()
    }

    pub fn carrier_period(&self) -> f64 {
        std::f64::consts::TAU / self.carrier
    }
}

/// Uniform delay grid of `n` points over ±`half_span`.
pub fn tau_grid(n: usize, half_span: f64) -> Vec<f64> {
    if n < 2 {
        return vec![0.0; n];
    }
    let step = 2.0 * half_span / (n - 1) as f64;
    (0..n).map(|i| -half_span + step * i as f64).collect()
}

pub fn default_tau_grid() -> Vec<f64> {
    tau_grid(DEFAULT_TAU_POINTS, DEFAULT_TAU_HALF_SPAN)
}

/// P(τ) = ∫ dΩ w(Ω)·¼|1 + e^{i(Ω⁰+Ω)τ}|², integrated with the trapezoid rule.
pub fn fringe_pattern(spectrum: &Spectrum, taus: &[f64]) -> FringePattern {
    let carrier = spectrum.carrier();
    let step = spectrum.step();
    let offsets = spectrum.offsets();
    let weights = spectrum.weights();
    let last = weights.len() - 1;
    let values = taus
        .par_iter()
        .map(|&tau| {
            let mut acc = 0.0;
            for (i, (&o, &w)) in offsets.iter().zip(weights).enumerate() {
                let term = w * 0.5 * (1.0 + ((carrier + o) * tau).cos());
                acc += if i == 0 || i == last {
                    0.5 * term
                } else {
                    term
                };
            }
            acc * step
        })
        .collect();
    FringePattern {
        taus: taus.to_vec(),
        values,
        reference: spectrum.integral(),
        carrier,
    }
}

/// Fringe visibility (max − min)/(max + min) over a one-period window centred
/// on every sample.
pub fn visibility_envelope(pattern: &FringePattern) -> Result<Vec<f64>> {
    let taus = &pattern.taus;
    if taus.len() < 2 {
        return Err(Error::domain("fringe pattern needs at least two samples"));
    }
    let step = taus[1] - taus[0];
    let period = pattern.carrier_period();
    let limit = period / SAMPLES_PER_PERIOD;
    if !(step > 0.0) || step > limit {
        return Err(Error::Undersampled {
            step_fs: step / FS,
            limit_fs: limit / FS,
        });
    }
    let half = ((0.5 * period / step).ceil() as usize).max(1);
    let v = &pattern.values;
    Ok((0..v.len())
        .map(|k| {
            let window = &v[k.saturating_sub(half)..(k + half + 1).min(v.len())];
            let (lo, hi) = window
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
                    (a.min(x), b.max(x))
                });
            if hi + lo > 0.0 {
                (hi - lo) / (hi + lo)
            } else {
                0.0
            }
        })
        .collect())
}

/// FWHM (s) of the fringe-visibility envelope.
pub fn envelope_width(pattern: &FringePattern) -> Result<f64> {
    let env = visibility_envelope(pattern)?;
    let taus = &pattern.taus;
    let (imax, &peak) = env
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty envelope");
    let half = 0.5 * peak;
    let cross =
        |i: usize, j: usize| taus[i] + (half - env[i]) * (taus[j] - taus[i]) / (env[j] - env[i]);
    let left = (0..imax)
        .rev()
        .find(|&i| env[i] < half)
        .map(|i| cross(i, i + 1))
        .ok_or_else(|| {
            Error::domain("envelope does not decay to half maximum at negative delay")
        })?;
    let right = (imax + 1..env.len())
        .find(|&i| env[i] < half)
        .map(|i| cross(i - 1, i))
        .ok_or_else(|| {
            Error::domain("envelope does not decay to half maximum at positive delay")
        })?;
    Ok(right - left)
}

/// Envelope FWHM of a Gaussian power spectrum with FWHM `spectral_fwhm`
/// (rad/s): 8 ln 2 / Δω.
pub fn transform_limited_width(spectral_fwhm: f64) -> f64 {
    8.0 * std::f64::consts::LN_2 / spectral_fwhm
}
