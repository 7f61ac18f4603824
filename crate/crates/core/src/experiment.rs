//! Synthetic coincidence counts.
//!
//! Each acquisition draws from a single ChaCha8 stream seeded by the plan, so
//! identical plans give identical counts. Poisson variates come from
//! `rand_distr`, which multiplies uniforms for small means and uses rejection
//! sampling for large ones.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::bell::ChshSettings;
use crate::error::{Error, Result};
use crate::projectors::Projector;
use crate::state::DensityMatrix4;
use crate::tomography::CountRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AcquisitionMode {
    Tomography,
    VisibilityScan,
    Bell,
}

/// One measurement configuration: a tomography label or a pair of linear
/// polarizer angles (deg).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Setting {
    Label(String),
    Angles { xi_s: f64, xi_i: f64 },
}

impl Setting {
    pub fn label(&self) -> String {
        match self {
            Setting::Label(l) => l.clone(),
            Setting::Angles { xi_s, xi_i } => format!("{xi_s}/{xi_i}"),
        }
    }

    pub fn projector(&self) -> Result<Projector> {
        match self {
            Setting::Label(l) => Projector::from_label(l),
            Setting::Angles { xi_s, xi_i } => Ok(Projector::linear(*xi_s, *xi_i)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcquisitionPlan {
    pub mode: AcquisitionMode,
    pub settings: Vec<Setting>,
    /// N₀: mean number of events per setting for a unit-probability projector.
    pub mean_events: f64,
    pub seed: u64,
    /// Mean accidental counts added to every setting.
    #[serde(default)]
    pub background: f64,
}

impl AcquisitionPlan {
    pub fn tomography(set: &[Projector], mean_events: f64, seed: u64) -> Self {
        Self {
            mode: AcquisitionMode::Tomography,
            settings: set
                .iter()
                .map(|p| Setting::Label(p.label().to_string()))
                .collect(),
            mean_events,
            seed,
            background: 0.0,
        }
    }

    /// Signal polarizer at each of `xi_s`, idler fixed at `xi_i`.
    pub fn visibility_scan(xi_s: &[f64], xi_i: f64, mean_events: f64, seed: u64) -> Self {
        Self {
            mode: AcquisitionMode::VisibilityScan,
            settings: xi_s
                .iter()
                .map(|&s| Setting::Angles { xi_s: s, xi_i })
                .collect(),
            mean_events,
            seed,
            background: 0.0,
        }
    }

    /// The sixteen angle pairs of a CHSH measurement, grouped by correlation
    /// term as (α,β), (α⊥,β⊥), (α,β⊥), (α⊥,β).
    pub fn bell(settings: &ChshSettings, mean_events: f64, seed: u64) -> Self {
        let pairs = settings
            .terms()
            .into_iter()
            .flat_map(|(a, b, _)| [(a, b), (a + 90.0, b + 90.0), (a, b + 90.0), (a + 90.0, b)]);
        Self {
            mode: AcquisitionMode::Bell,
            settings: pairs
                .map(|(xi_s, xi_i)| Setting::Angles { xi_s, xi_i })
                .collect(),
            mean_events,
            seed,
            background: 0.0,
        }
    }

    pub fn with_background(mut self, background: f64) -> Self {
        self.background = background;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mean_events > 0.0 && self.mean_events.is_finite()) {
            return Err(Error::domain(format!(
                "mean events {} must be positive",
                self.mean_events
            )));
        }
        if self.settings.is_empty() {
            return Err(Error::domain("acquisition plan has no settings"));
        }
        if !(self.background >= 0.0 && self.background.is_finite()) {
            return Err(Error::domain("background must be nonnegative"));
        }
        Ok(())
    }
}

fn poisson<R: rand::Rng>(mean: f64, rng: &mut R) -> Result<u64> {
    if mean <= 0.0 {
        return Ok(0);
    }
    let d = Poisson::new(mean).map_err(|e| Error::domain(format!("poisson mean {mean}: {e}")))?;
    Ok(d.sample(rng) as u64)
}

/// Draws count ~ Poisson(N₀·Tr[ρP] + background) for every setting.
pub fn simulate_counts(rho: &DensityMatrix4, plan: &AcquisitionPlan) -> Result<Vec<CountRecord>> {
    plan.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    plan.settings
        .iter()
        .map(|s| {
            let p = s.projector()?;
            let mean = plan.mean_events * p.probability(rho.matrix()).max(0.0) + plan.background;
            Ok(CountRecord::new(s.label(), poisson(mean, &mut rng)?))
        })
        .collect()
}

/// Result of fitting n(ξ) = A·cos²(ξ − 45°) + B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VisibilityFit {
    pub amplitude: f64,
    pub offset: f64,
    /// A/(A + 2B).
    pub visibility: f64,
    pub visibility_err: f64,
    pub chi2: f64,
}

/// Poisson-weighted least squares on a polarizer scan with the idler at 45°.
pub fn fit_visibility(xi_s: &[f64], counts: &[f64]) -> Result<VisibilityFit> {
    if xi_s.len() != counts.len() {
        return Err(Error::domain("angle and count lists differ in length"));
    }
    if xi_s.len() < 3 {
        return Err(Error::domain("need at least three scan points"));
    }
    let (mut s_xx, mut s_x1, mut s_11, mut s_xy, mut s_1y) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let basis: Vec<f64> = xi_s
        .iter()
        .map(|x| (x - 45.0).to_radians().cos().powi(2))
        .collect();
    for (&x, &y) in basis.iter().zip(counts) {
        let w = 1.0 / y.max(1.0);
        s_xx += w * x * x;
        s_x1 += w * x;
        s_11 += w;
        s_xy += w * x * y;
        s_1y += w * y;
    }
    let det = s_xx * s_11 - s_x1 * s_x1;
    if !(det.abs() > 1e-12 * s_xx * s_11) {
        return Err(Error::domain("scan angles do not constrain the fit"));
    }
    let a = (s_11 * s_xy - s_x1 * s_1y) / det;
    let b = (s_xx * s_1y - s_x1 * s_xy) / det;
    let (var_a, var_b, cov) = (s_11 / det, s_xx / det, -s_x1 / det);
    let den = a + 2.0 * b;
    if !(den > 0.0) {
        return Err(Error::domain("fitted curve has no positive mean"));
    }
    let (da, db) = (2.0 * b / (den * den), -2.0 * a / (den * den));
    let var_v = da * da * var_a + db * db * var_b + 2.0 * da * db * cov;
    let chi2 = basis
        .iter()
        .zip(counts)
        .map(|(&x, &y)| (y - a * x - b).powi(2) / y.max(1.0))
        .sum();
    Ok(VisibilityFit {
        amplitude: a,
        offset: b,
        visibility: a / den,
        visibility_err: var_v.max(0.0).sqrt(),
        chi2,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BellMeasurement {
    pub theta: f64,
    pub s: f64,
    pub sigma: f64,
    pub correlations: [f64; 4],
    pub correlation_errors: [f64; 4],
    pub counts: Vec<CountRecord>,
}

/// Simulated CHSH measurement in the θ-scheme with Poisson error
/// propagation through each E = (N₁ + N₂ − N₃ − N₄)/ΣN.
pub fn bell_acquisition(
    rho: &DensityMatrix4,
    theta: f64,
    mean_events: f64,
    seed: u64,
) -> Result<BellMeasurement> {
    let settings = ChshSettings::theta_scheme(theta);
    let plan = AcquisitionPlan::bell(&settings, mean_events, seed);
    let counts = simulate_counts(rho, &plan)?;
    let mut e = [0.0; 4];
    let mut err = [0.0; 4];
    for (k, group) in counts.chunks(4).enumerate() {
        let n: Vec<f64> = group.iter().map(|r| r.count as f64).collect();
        let total: f64 = n.iter().sum();
        if !(total > 0.0) {
            return Err(Error::domain(format!("no counts for correlation term {k}")));
        }
        let signs = [1.0, 1.0, -1.0, -1.0];
        let ek = signs.iter().zip(&n).map(|(s, c)| s * c).sum::<f64>() / total;
        let var = signs
            .iter()
            .zip(&n)
            .map(|(s, c)| c * (s - ek).powi(2))
            .sum::<f64>()
            / (total * total);
        e[k] = ek;
        err[k] = var.sqrt();
    }
    let signs: Vec<f64> = settings.terms().iter().map(|t| t.2).collect();
    let s = signs.iter().zip(&e).map(|(sg, ek)| sg * ek).sum();
    let sigma = err.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(BellMeasurement {
        theta,
        s,
        sigma,
        correlations: e,
        correlation_errors: err,
        counts,
    })
}

/// N₀ for which the counts over `set` average `mean_count` per setting.
pub fn events_for_mean_count(
    rho: &DensityMatrix4,
    set: &[Projector],
    mean_count: f64,
) -> Result<f64> {
    if !(mean_count > 0.0) {
        return Err(Error::domain("mean count must be positive"));
    }
    let total: f64 = set.iter().map(|p| p.probability(rho.matrix())).sum();
    if !(total > 0.0) {
        return Err(Error::domain("state gives no counts on the projector set"));
    }
    Ok(mean_count * set.len() as f64 / total)
}

/// N₀ for which the expected σ_S equals `sigma`: σ_S² = Σ_k (1 − E_k²)/N₀,
/// since the four settings of each term form a complete basis.
pub fn events_for_sigma(rho: &DensityMatrix4, theta: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::domain("target sigma must be positive"));
    }
    let settings = ChshSettings::theta_scheme(theta);
    let sum: f64 = settings
        .terms()
        .iter()
        .map(|&(a, b, _)| 1.0 - crate::bell::correlation_e(rho, a, b).powi(2))
        .sum();
    Ok(sum / (sigma * sigma))
}
