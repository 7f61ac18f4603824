//! CHSH correlations and the Bell `S` parameter.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{coincidence_probability, model_state, DensityMatrix4};

/// Polarizer angles (deg) for the four CHSH settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshSettings {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
}

impl ChshSettings {
    /// a = 0, b = θ, a′ = 2θ, b′ = 3θ.
    pub fn theta_scheme(theta: f64) -> Self {
        Self {
            a: 0.0,
            b: theta,
            a_prime: 2.0 * theta,
            b_prime: 3.0 * theta,
        }
    }

    /// The four (α, β) pairs in the order they enter S, with their signs.
    pub fn terms(&self) -> [(f64, f64, f64); 4] {
        [
            (self.a, self.b, 1.0),
            (self.a, self.b_prime, -1.0),
            (self.a_prime, self.b, 1.0),
            (self.a_prime, self.b_prime, 1.0),
        ]
    }
}

/// E(α, β) = P(α,β) + P(α⊥,β⊥) − P(α,β⊥) − P(α⊥,β).
pub fn correlation_e(rho: &DensityMatrix4, alpha: f64, beta: f64) -> f64 {
    let ap = alpha + 90.0;
    let bp = beta + 90.0;
    coincidence_probability(rho, alpha, beta) + coincidence_probability(rho, ap, bp)
        - coincidence_probability(rho, alpha, bp)
        - coincidence_probability(rho, ap, beta)
}

/// S = E(a,b) − E(a,b′) + E(a′,b) + E(a′,b′).
pub fn chsh_s(rho: &DensityMatrix4, s: &ChshSettings) -> f64 {
    s.terms()
        .iter()
        .map(|&(x, y, sign)| sign * correlation_e(rho, x, y))
        .sum()
}

/// S(θ) for the model state of decoherence parameter `p` (φ = 0).
pub fn chsh_scan(p: f64, thetas: &[f64]) -> Result<Vec<(f64, f64)>> {
    if let Some(bad) = thetas.iter().find(|t| !t.is_finite()) {
        return Err(Error::domain(format!("non-finite scan angle {bad}")));
    }
    let rho = model_state(p, 0.0)?;
    Ok(thetas
        .par_iter()
        .map(|&t| (t, chsh_s(&rho, &ChshSettings::theta_scheme(t))))
        .collect())
}

/// Number of standard deviations by which `s` exceeds the local bound 2.
pub fn violation_significance(s: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::domain(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    Ok((s - 2.0) / sigma)
}
