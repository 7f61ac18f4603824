//! Geometry of the crossed-crystal source: group delays accumulated by the
//! HH and VV pair amplitudes, and the decoherence parameter they imply for a
//! pump of finite coherence time.

use serde::{Deserialize, Serialize};

use crate::dispersion::{coincidence_width_from_wavelength, MaterialModel, ReferenceTable};
use crate::error::{Error, Result};
use crate::units::{FS, MM, NM, SPEED_OF_LIGHT};

/// Group velocities (m/s) of the pump and down-converted beams.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupVelocities {
    pub pump_o: f64,
    pub pump_e: f64,
    pub signal_o: f64,
    pub signal_e: f64,
}

impl GroupVelocities {
    pub fn from_table(table: &ReferenceTable) -> Self {
        Self {
            pump_o: SPEED_OF_LIGHT / table.pump_group_index_o,
            pump_e: SPEED_OF_LIGHT / table.pump_group_index_e,
            signal_o: SPEED_OF_LIGHT / table.signal_group_index_o,
            signal_e: SPEED_OF_LIGHT / table.signal_group_index_e,
        }
    }

    fn all(&self) -> [f64; 4] {
        [self.pump_o, self.pump_e, self.signal_o, self.signal_e]
    }
}

/// Orientation of the pump pre-compensation crystal relative to the setting
/// that cancels the source delay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    /// 0°: the retarder delay subtracts from the source delay.
    Compensating,
    /// 90°: the retarder delay adds to the source delay.
    Enhancing,
}

impl Orientation {
    pub fn from_degrees(deg: f64) -> Result<Self> {
        let r = deg.rem_euclid(180.0);
        if r.abs() < 1e-9 || (r - 180.0).abs() < 1e-9 {
            Ok(Self::Compensating)
        } else if (r - 90.0).abs() < 1e-9 {
            Ok(Self::Enhancing)
        } else {
            Err(Error::Config(format!(
                "compensation orientation must be 0° or 90°, got {deg}°"
            )))
        }
    }

    pub fn degrees(self) -> f64 {
        match self {
            Self::Compensating => 0.0,
            Self::Enhancing => 90.0,
        }
    }
}

/// A birefringent crystal placed in the pump beam ahead of the source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Compensation {
    /// Length of the retarder (m).
    pub length: f64,
    pub orientation: Orientation,
}

/// Pump, crystal and material parameters of the source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceConfig {
    /// Length of each of the two crystals (m).
    pub crystal_length: f64,
    /// Pump coherence time (s).
    pub coherence_time: f64,
    /// Pump vacuum wavelength (m).
    pub pump_wavelength: f64,
    /// Internal ray angles φ₁, φ₂, φ₃ (deg).
    pub phi_deg: [f64; 3],
    /// External emission cone half-angle (deg).
    pub external_angle_deg: f64,
    /// Internal emission angle Θ_s = Θ_i (deg).
    pub internal_angle_deg: f64,
    /// Pump beam waist (m).
    pub beam_waist: f64,
    pub group_velocities: GroupVelocities,
    /// Power FWHM (rad/s) of the coincidence acceptance filter.
    pub coincidence_width: f64,
    pub compensation: Option<Compensation>,
    pub material: MaterialModel,
}

impl SourceConfig {
    /// The apparatus described for the laser-diode experiment: 544 fs pump
    /// coherence, 405 nm, 3° cone, 27 nm coincidence bandwidth.
    pub fn laser_diode() -> Self {
        let material = MaterialModel::bbo();
        Self {
            crystal_length: 0.5 * MM,
            coherence_time: 544.0 * FS,
            pump_wavelength: 405.0 * NM,
            phi_deg: [1.807, 1.84, 1.806],
            external_angle_deg: 3.0,
            internal_angle_deg: 1.8,
            beam_waist: 2.0 * MM,
            group_velocities: GroupVelocities::from_table(&material.reference_table),
            coincidence_width: coincidence_width_from_wavelength(27.0 * NM, 810.0 * NM),
            compensation: None,
            material,
        }
    }

    pub fn with_crystal_length(mut self, length: f64) -> Self {
        self.crystal_length = length;
        self
    }

    pub fn with_coherence_time(mut self, tau_c: f64) -> Self {
        self.coherence_time = tau_c;
        self
    }

    pub fn with_compensation(mut self, compensation: Option<Compensation>) -> Self {
        self.compensation = compensation;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.crystal_length >= 0.0 && self.crystal_length.is_finite()) {
            return Err(Error::Config(format!(
                "crystal length {} must be ≥ 0",
                self.crystal_length
            )));
        }
        if !(self.coherence_time > 0.0) {
            return Err(Error::Config("coherence time must be positive".into()));
        }
        if !(self.pump_wavelength > 0.0) {
            return Err(Error::Config("pump wavelength must be positive".into()));
        }
        if !(self.beam_waist > 0.0) {
            return Err(Error::Config("beam waist must be positive".into()));
        }
        if !(self.coincidence_width > 0.0) {
            return Err(Error::Config(
                "coincidence spectral width must be positive".into(),
            ));
        }
        for v in self.group_velocities.all() {
            if !(v < SPEED_OF_LIGHT && v > SPEED_OF_LIGHT / 3.0) {
                return Err(Error::Config(format!(
                    "group velocity {v} m/s outside (c/3, c)"
                )));
            }
        }
        if let Some(c) = &self.compensation {
            if !(c.length >= 0.0) {
                return Err(Error::Config("compensation length must be ≥ 0".into()));
            }
        }
        Ok(())
    }

    fn cos_phi(&self) -> [f64; 3] {
        self.phi_deg.map(|d| d.to_radians().cos())
    }
}

impl Default for SourceConfig {
    fn default() -> Self {
        Self::laser_diode()
    }
}

/// Delay bookkeeping for one source configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayReport {
    pub tau_h: f64,
    pub tau_v: f64,
    /// |τ_H − τ_V| before any compensation (s).
    pub delta_tau: f64,
    /// Delay difference after the compensation crystal (s).
    pub delta_tau_effective: f64,
    /// p for generation at the crystal midpoints.
    pub p_mid: f64,
    /// p averaged over uniformly distributed generation points.
    pub p_z: f64,
}

/// Propagation times (τ_H, τ_V) of the HH and VV amplitudes, assuming
/// generation at the middle of each crystal.
pub fn propagation_delays(cfg: &SourceConfig) -> (f64, f64) {
    let v = &cfg.group_velocities;
    let [c1, c2, c3] = cfg.cos_phi();
    let half = cfg.crystal_length / 2.0;
    let tau_h = (1.0 / v.pump_o + 1.0 / v.pump_e + 1.0 / (v.signal_o * c3)) * half;
    let tau_v = (1.0 / (v.signal_o * c1) + 2.0 / (v.signal_e * c2)) * half;
    (tau_h, tau_v)
}

/// Group delay imposed by the pump retarder, L_pre·|1/V_p^o − 1/V_p^e|.
pub fn retarder_delay(cfg: &SourceConfig) -> f64 {
    let v = &cfg.group_velocities;
    cfg.compensation
        .map(|c| c.length * (1.0 / v.pump_o - 1.0 / v.pump_e).abs())
        .unwrap_or(0.0)
}

fn apply_compensation(cfg: &SourceConfig, delta: f64) -> f64 {
    match cfg.compensation {
        None => delta,
        Some(c) => {
            let pre = retarder_delay(cfg);
            match c.orientation {
                Orientation::Compensating => (delta - pre).abs(),
                Orientation::Enhancing => delta + pre,
            }
        }
    }
}

/// Effective HH–VV delay difference after the optional pump retarder.
pub fn compensated_delay(cfg: &SourceConfig) -> f64 {
    let (h, v) = propagation_delays(cfg);
    apply_compensation(cfg, (h - v).abs())
}

/// p = exp(−Δτ_eff/τ_c).
pub fn decoherence_parameter(cfg: &SourceConfig) -> f64 {
    (-compensated_delay(cfg) / cfg.coherence_time).exp()
}

/// Delay difference τ_H(z₁,z₂) − τ_V(z₁,z₂) for pairs generated at depths
/// z₁ (first crystal) and z₂ (second crystal).
pub fn positional_delay(cfg: &SourceConfig, z1: f64, z2: f64) -> f64 {
    let v = &cfg.group_velocities;
    let [c1, c2, c3] = cfg.cos_phi();
    let l = cfg.crystal_length;
    let tau_h = (l - z1) / v.pump_o + z2 / v.pump_e + (l - z2) / (v.signal_o * c3);
    let tau_v = (l - z1) / (v.signal_o * c1) + l / (v.signal_e * c2);
    tau_h - tau_v
}

/// Mean of exp(−|Δτ(z₁,z₂)|/τ_c) over uniformly distributed generation
/// points, by the midpoint rule on an `n_grid` × `n_grid` lattice.
pub fn position_averaged_p(cfg: &SourceConfig, n_grid: usize) -> Result<f64> {
    if n_grid < 32 {
        return Err(Error::domain(format!(
            "position average needs n_grid ≥ 32, got {n_grid}"
        )));
    }
    let l = cfg.crystal_length;
    if l == 0.0 {
        return Ok(1.0);
    }
    let h = l / n_grid as f64;
    let mut sum = 0.0;
    for i in 0..n_grid {
        let z1 = (i as f64 + 0.5) * h;
        for j in 0..n_grid {
            let z2 = (j as f64 + 0.5) * h;
            let delta = apply_compensation(cfg, positional_delay(cfg, z1, z2).abs());
            sum += (-delta / cfg.coherence_time).exp();
        }
    }
    Ok(sum / (n_grid * n_grid) as f64)
}

pub const DEFAULT_POSITION_GRID: usize = 128;

/// Full delay report for `cfg`.
pub fn delay_report(cfg: &SourceConfig) -> Result<DelayReport> {
    let (tau_h, tau_v) = propagation_delays(cfg);
    Ok(DelayReport {
        tau_h,
        tau_v,
        delta_tau: (tau_h - tau_v).abs(),
        delta_tau_effective: compensated_delay(cfg),
        p_mid: decoherence_parameter(cfg),
        p_z: position_averaged_p(cfg, DEFAULT_POSITION_GRID)?,
    })
}
