//! Birefringent dispersion of BBO, the longitudinal phase mismatch of the
//! down-conversion process and the resulting signal spectra.
//!
//! Wavelengths are vacuum wavelengths in metres at the public boundary; the
//! Sellmeier formula itself is evaluated in micrometres.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::source::SourceConfig;
use crate::units::{angular_frequency, bandwidth_to_omega, wavelength, SPEED_OF_LIGHT, UM};
use std::f64::consts::PI;

/// Number of samples in every tabulated [`Spectrum`] produced by
/// [`effective_spectrum`].
pub const SPECTRUM_POINTS: usize = 2048;

/// Minimum number of samples accepted by [`Spectrum::new`].
pub const MIN_SPECTRUM_POINTS: usize = 256;

/// Span of the spectral grid, in units of the single-count FWHM.
const SPAN_IN_WIDTHS: f64 = 6.0;

/// Two-pole Sellmeier formula `n² = a + b/(λ² − c) − d·λ²`, λ in µm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Sellmeier {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Sellmeier {
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub fn from_coefficients(coefficients: &[f64]) -> Result<Self> {
        match coefficients {
            [a, b, c, d] if coefficients.iter().all(|v| v.is_finite()) => {
                Ok(Self::new(*a, *b, *c, *d))
            }
            _ => Err(Error::Config(format!(
                "sellmeier needs four finite coefficients, got {coefficients:?}"
            ))),
        }
    }

    fn index_squared(&self, lambda_um: f64) -> f64 {
        let l2 = lambda_um * lambda_um;
        self.a + self.b / (l2 - self.c) - self.d * l2
    }

    pub fn index(&self, lambda_um: f64) -> f64 {
        self.index_squared(lambda_um).sqrt()
    }

    /// dn/dλ in 1/µm.
    pub fn index_slope(&self, lambda_um: f64) -> f64 {
        let l2 = lambda_um * lambda_um;
        let dn2 =
            -2.0 * self.b * lambda_um / ((l2 - self.c) * (l2 - self.c)) - 2.0 * self.d * lambda_um;
        dn2 / (2.0 * self.index(lambda_um))
    }
}

impl TryFrom<Vec<f64>> for Sellmeier {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::from_coefficients(&v)
    }
}

impl From<Sellmeier> for Vec<f64> {
    fn from(s: Sellmeier) -> Self {
        vec![s.a, s.b, s.c, s.d]
    }
}

/// Polarization branch inside the crystal. The extraordinary branch is the
/// e-wave at the crystal cut angle, not the principal index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Ordinary,
    Extraordinary,
}

/// Reference refractive and group indices at the pump (405 nm) and
/// down-converted (810 nm) wavelengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceTable {
    pub pump_index_o: f64,
    pub pump_index_e: f64,
    pub signal_index_o: f64,
    pub signal_index_e: f64,
    pub pump_group_index_o: f64,
    pub pump_group_index_e: f64,
    pub signal_group_index_o: f64,
    pub signal_group_index_e: f64,
}

impl ReferenceTable {
    pub const BBO: Self = Self {
        pump_index_o: 1.691719,
        pump_index_e: 1.659273,
        signal_index_o: 1.659984,
        signal_index_e: 1.632171,
        pump_group_index_o: 1.77878,
        pump_group_index_e: 1.73901,
        signal_group_index_o: 1.68376,
        signal_group_index_e: 1.65483,
    };
}

impl Default for ReferenceTable {
    fn default() -> Self {
        Self::BBO
    }
}

/// Dispersion model of a uniaxial crystal cut at a fixed angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialModel {
    pub ordinary: Sellmeier,
    /// Principal extraordinary index.
    pub extraordinary: Sellmeier,
    /// Angle between the optic axis and the pump direction (deg).
    pub cut_angle_deg: f64,
    /// Reference pump wavelength (m).
    pub pump_reference: f64,
    /// Reference down-converted wavelength (m).
    pub signal_reference: f64,
    /// Wavelength range (m) in which the Sellmeier fit is trusted.
    pub validity: (f64, f64),
    pub reference_table: ReferenceTable,
}

impl MaterialModel {
    /// β-barium borate with the Eimerl et al. Sellmeier coefficients, cut for
    /// degenerate 405 → 810 nm down-conversion at a 1.8° internal angle.
    pub fn bbo() -> Self {
        let mut model = Self {
            ordinary: Sellmeier::new(2.7359, 0.01878, 0.01822, 0.01354),
            extraordinary: Sellmeier::new(2.3753, 0.01224, 0.01667, 0.01516),
            cut_angle_deg: 0.0,
            pump_reference: 405e-9,
            signal_reference: 810e-9,
            validity: (0.30 * UM, 1.40 * UM),
            reference_table: ReferenceTable::BBO,
        };
        model.cut_angle_deg = model
            .phase_matching_cut(405e-9, 1.8f64.to_radians())
            .expect("BBO phase-matches 405 nm at 1.8°")
            .to_degrees();
        model
    }

    fn check_range(&self, lambda: f64) -> Result<f64> {
        let (lo, hi) = self.validity;
        if !(lambda >= lo && lambda <= hi) {
            return Err(Error::domain(format!(
                "wavelength {:.1} nm outside dispersion model range [{:.0}, {:.0}] nm",
                lambda * 1e9,
                lo * 1e9,
                hi * 1e9
            )));
        }
        Ok(lambda / UM)
    }

    /// Index and dn/dλ (1/µm) of the e-wave at polar angle `theta`.
    fn angled(&self, lambda_um: f64, theta: f64) -> (f64, f64) {
        let (no, ne) = (
            self.ordinary.index(lambda_um),
            self.extraordinary.index(lambda_um),
        );
        let (dno, dne) = (
            self.ordinary.index_slope(lambda_um),
            self.extraordinary.index_slope(lambda_um),
        );
        let (c2, s2) = (theta.cos().powi(2), theta.sin().powi(2));
        let inv = c2 / (no * no) + s2 / (ne * ne);
        let n = inv.powf(-0.5);
        let dinv = -2.0 * c2 * dno / no.powi(3) - 2.0 * s2 * dne / ne.powi(3);
        (n, -0.5 * n.powi(3) * dinv)
    }

    fn index_and_slope(&self, lambda: f64, branch: Branch) -> Result<(f64, f64)> {
        let l = self.check_range(lambda)?;
        Ok(match branch {
            Branch::Ordinary => (self.ordinary.index(l), self.ordinary.index_slope(l)),
            Branch::Extraordinary => self.angled(l, self.cut_angle_deg.to_radians()),
        })
    }

    pub fn index(&self, lambda: f64, branch: Branch) -> Result<f64> {
        Ok(self.index_and_slope(lambda, branch)?.0)
    }

    /// Group index n − λ·dn/dλ.
    pub fn group_index(&self, lambda: f64, branch: Branch) -> Result<f64> {
        let (n, dn) = self.index_and_slope(lambda, branch)?;
        Ok(n - (lambda / UM) * dn)
    }

    /// Wavenumber (rad/m) at angular frequency `omega`.
    pub fn wavenumber_at(&self, omega: f64, branch: Branch) -> Result<f64> {
        if !(omega > 0.0) {
            return Err(Error::domain(format!(
                "non-positive angular frequency {omega}"
            )));
        }
        Ok(self.index(wavelength(omega), branch)? * omega / SPEED_OF_LIGHT)
    }

    /// Cut angle (rad) for which an e-polarized pump at `pump_wavelength`
    /// phase-matches degenerate o-polarized pairs emitted at `internal_angle`.
    pub fn phase_matching_cut(&self, pump_wavelength: f64, internal_angle: f64) -> Result<f64> {
        let lp = self.check_range(pump_wavelength)?;
        let ls = self.check_range(2.0 * pump_wavelength)?;
        let target = self.ordinary.index(ls) * internal_angle.cos();
        let no = self.ordinary.index(lp);
        let ne = self.extraordinary.index(lp);
        let s2 = (target.powi(-2) - no.powi(-2)) / (ne.powi(-2) - no.powi(-2));
        if !(0.0..=1.0).contains(&s2) {
            return Err(Error::domain(
                "no Type-I phase-matching angle for this geometry",
            ));
        }
        Ok(s2.sqrt().asin())
    }

    /// Largest absolute deviation between the model and the eight entries of
    /// the reference table.
    pub fn reference_deviation(&self) -> Result<f64> {
        let t = &self.reference_table;
        let (p, s) = (self.pump_reference, self.signal_reference);
        let pairs = [
            (self.index(p, Branch::Ordinary)?, t.pump_index_o),
            (self.index(p, Branch::Extraordinary)?, t.pump_index_e),
            (self.index(s, Branch::Ordinary)?, t.signal_index_o),
            (self.index(s, Branch::Extraordinary)?, t.signal_index_e),
            (self.group_index(p, Branch::Ordinary)?, t.pump_group_index_o),
            (
                self.group_index(p, Branch::Extraordinary)?,
                t.pump_group_index_e,
            ),
            (
                self.group_index(s, Branch::Ordinary)?,
                t.signal_group_index_o,
            ),
            (
                self.group_index(s, Branch::Extraordinary)?,
                t.signal_group_index_e,
            ),
        ];
        Ok(pairs.iter().map(|(m, r)| (m - r).abs()).fold(0.0, f64::max))
    }
}

impl Default for MaterialModel {
    fn default() -> Self {
        Self::bbo()
    }
}

/// k = 2π·n(λ)/λ in rad/m.
pub fn wavenumber(material: &MaterialModel, lambda: f64, branch: Branch) -> Result<f64> {
    Ok(2.0 * PI * material.index(lambda, branch)? / lambda)
}

/// Δk_∥ = k_p − k_s cosθ_s − k_i cosθ_i for signal frequency `omega_s`.
///
/// The pump is held at its centre frequency and the signal at the reference
/// internal angle; the idler angle follows from exact transverse momentum
/// conservation.
pub fn longitudinal_mismatch(cfg: &SourceConfig, omega_s: f64) -> Result<f64> {
    let m = &cfg.material;
    let omega_p = angular_frequency(cfg.pump_wavelength);
    let omega_i = omega_p - omega_s;
    if !(omega_s > 0.0 && omega_i > 0.0) {
        return Err(Error::domain(format!(
            "signal frequency {omega_s:.4e} rad/s outside (0, ω_p)"
        )));
    }
    let theta_s = cfg.internal_angle_deg.to_radians();
    let k_p = m.wavenumber_at(omega_p, Branch::Extraordinary)?;
    let k_s = m.wavenumber_at(omega_s, Branch::Ordinary)?;
    let k_i = m.wavenumber_at(omega_i, Branch::Ordinary)?;
    let sin_i = k_s * theta_s.sin() / k_i;
    if sin_i.abs() > 1.0 {
        return Err(Error::domain(
            "no real idler angle for this signal frequency",
        ));
    }
    let cos_i = (1.0 - sin_i * sin_i).sqrt();
    Ok(k_p - k_s * theta_s.cos() - k_i * cos_i)
}

/// sin(x)/x with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-6 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Longitudinal mismatch function f = sinc(Δk_∥·L/2).
pub fn mismatch_function(cfg: &SourceConfig, omega_s: f64) -> Result<f64> {
    if cfg.crystal_length == 0.0 {
        return Ok(1.0);
    }
    let dk = longitudinal_mismatch(cfg, omega_s)?;
    Ok(sinc(dk * cfg.crystal_length / 2.0))
}

/// Transverse mismatch factor F = exp(−w²Δk_⊥²/4) for a Gaussian pump of
/// waist `waist`.
pub fn transverse_profile(waist: f64, dk_perp: f64) -> f64 {
    (-(waist * dk_perp).powi(2) / 4.0).exp()
}

/// Full internal-angle width (rad) of |F|² at 1/e, for a photon of
/// wavenumber `k` emitted near `angle`.
pub fn transverse_angular_width(waist: f64, k: f64, angle: f64) -> f64 {
    2.0 * std::f64::consts::SQRT_2 / (waist * k * angle.cos())
}

/// Tabulated spectral weight on a uniform grid of angular-frequency offsets
/// from `carrier`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    carrier: f64,
    offsets: Vec<f64>,
    weights: Vec<f64>,
}

impl Spectrum {
    pub fn new(carrier: f64, offsets: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if offsets.len() != weights.len() {
            return Err(Error::domain(
                "spectrum offsets and weights differ in length",
            ));
        }
        if offsets.len() < MIN_SPECTRUM_POINTS {
            return Err(Error::domain(format!(
                "spectrum needs at least {MIN_SPECTRUM_POINTS} points, got {}",
                offsets.len()
            )));
        }
        if !(carrier > 0.0) {
            return Err(Error::domain("carrier frequency must be positive"));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::domain("spectral weights must be nonnegative"));
        }
        let step = offsets[1] - offsets[0];
        let uniform = offsets.windows(2).all(|w| {
            let d = w[1] - w[0];
            d > 0.0 && (d - step).abs() <= 1e-9 * step
        });
        if !uniform {
            return Err(Error::domain(
                "spectrum grid must be uniform and strictly increasing",
            ));
        }
        Ok(Self {
            carrier,
            offsets,
            weights,
        })
    }

    /// Builds a spectrum by sampling `weight` on `n` uniform points in
    /// `[-half_span, half_span]`.
    pub fn sample(
        carrier: f64,
        half_span: f64,
        n: usize,
        mut weight: impl FnMut(f64) -> f64,
    ) -> Result<Self> {
        let step = 2.0 * half_span / (n - 1) as f64;
        let offsets: Vec<f64> = (0..n).map(|i| -half_span + step * i as f64).collect();
        let weights = offsets.iter().map(|&o| weight(o)).collect();
        Self::new(carrier, offsets, weights)
    }

    pub fn carrier(&self) -> f64 {
        self.carrier
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn step(&self) -> f64 {
        self.offsets[1] - self.offsets[0]
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn peak(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }

    /// Trapezoidal integral of the weights over Ω.
    pub fn integral(&self) -> f64 {
        let w = &self.weights;
        let inner: f64 = w[1..w.len() - 1].iter().sum();
        self.step() * (inner + 0.5 * (w[0] + w[w.len() - 1]))
    }

    fn normalized(mut self) -> Self {
        let peak = self.peak();
        if peak > 0.0 {
            self.weights.iter_mut().for_each(|w| *w /= peak);
        }
        self
    }

    /// Offsets (rad/s) of the two half-maximum crossings around the peak.
    pub fn half_maximum_crossings(&self) -> Result<(f64, f64)> {
        let w = &self.weights;
        let (imax, &peak) = w
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .ok_or_else(|| Error::domain("empty spectrum"))?;
        let half = 0.5 * peak;
        let interp = |i: usize, j: usize| {
            let (x0, x1, y0, y1) = (self.offsets[i], self.offsets[j], w[i], w[j]);
            x0 + (half - y0) * (x1 - x0) / (y1 - y0)
        };
        let left = (0..imax)
            .rev()
            .find(|&i| w[i] < half)
            .map(|i| interp(i, i + 1))
            .ok_or_else(|| {
                Error::domain("spectrum does not fall to half maximum on the low side")
            })?;
        let right = (imax + 1..w.len())
            .find(|&i| w[i] < half)
            .map(|i| interp(i - 1, i))
            .ok_or_else(|| {
                Error::domain("spectrum does not fall to half maximum on the high side")
            })?;
        Ok((left, right))
    }

    /// Full width at half maximum in angular frequency (rad/s).
    pub fn fwhm(&self) -> Result<f64> {
        let (l, r) = self.half_maximum_crossings()?;
        Ok(r - l)
    }

    /// Full width at half maximum in vacuum wavelength (m).
    pub fn fwhm_wavelength(&self) -> Result<f64> {
        let (l, r) = self.half_maximum_crossings()?;
        Ok(wavelength(self.carrier + l) - wavelength(self.carrier + r))
    }
}

/// Which detection scheme the spectrum describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumMode {
    /// Signal single counts: |f|².
    Single,
    /// Signal–idler coincidences: |f·R|².
    Coincidence,
}

/// Largest detuning (rad/s) for which both signal and idler wavelengths stay
/// inside the dispersion model's validity range.
fn band_half_width(cfg: &SourceConfig) -> f64 {
    let center = angular_frequency(cfg.pump_wavelength) / 2.0;
    let (lo, hi) = cfg.material.validity;
    let below = center - angular_frequency(hi);
    let above = angular_frequency(lo) - center;
    0.98 * below.min(above)
}

fn single_weight(cfg: &SourceConfig, offset: f64) -> Result<f64> {
    let center = angular_frequency(cfg.pump_wavelength) / 2.0;
    Ok(mismatch_function(cfg, center + offset)?.powi(2))
}

/// Detuning on one side of the carrier where |f|² first drops to ½, or
/// `limit` when it never does inside the band.
fn half_width_on_side(cfg: &SourceConfig, sign: f64, limit: f64) -> Result<f64> {
    const STEPS: usize = 4096;
    let dx = limit / STEPS as f64;
    let mut prev = 0.0;
    for i in 1..=STEPS {
        let x = dx * i as f64;
        if single_weight(cfg, sign * x)? < 0.5 {
            let (mut lo, mut hi) = (prev, x);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if single_weight(cfg, sign * mid)? < 0.5 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(0.5 * (lo + hi));
        }
        prev = x;
    }
    Ok(limit)
}

/// Spectral weight of the down-converted signal, tabulated on
/// [`SPECTRUM_POINTS`] uniform points and normalised to unit peak.
///
/// The grid spans ±6 single-count FWHMs, clipped to the band where the
/// dispersion model is valid. In coincidence mode the single-count weight is
/// multiplied by a Gaussian acceptance filter |R|² whose power FWHM is
/// `cfg.coincidence_width`.
pub fn effective_spectrum(cfg: &SourceConfig, mode: SpectrumMode) -> Result<Spectrum> {
    let band = band_half_width(cfg);
    let half_span = if cfg.crystal_length == 0.0 {
        band
    } else {
        let width = half_width_on_side(cfg, -1.0, band)? + half_width_on_side(cfg, 1.0, band)?;
        (SPAN_IN_WIDTHS * width).min(band)
    };
    let carrier = angular_frequency(cfg.pump_wavelength) / 2.0;
    let filter_width = cfg.coincidence_width;
    let mut failure = None;
    let spectrum = Spectrum::sample(carrier, half_span, SPECTRUM_POINTS, |offset| {
        let single = match single_weight(cfg, offset) {
            Ok(w) => w,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        };
        match mode {
            SpectrumMode::Single => single,
            SpectrumMode::Coincidence => single * acceptance_filter(offset, filter_width),
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(spectrum.normalized())
}

/// Unit-peak Gaussian |R(Ω)|² with power FWHM `fwhm` (rad/s).
pub fn acceptance_filter(offset: f64, fwhm: f64) -> f64 {
    (-4.0 * std::f64::consts::LN_2 * (offset / fwhm).powi(2)).exp()
}

/// Converts a spectral FWHM given in wavelength around `center` to rad/s.
pub fn coincidence_width_from_wavelength(delta_lambda: f64, center: f64) -> f64 {
    bandwidth_to_omega(delta_lambda, center)
}
