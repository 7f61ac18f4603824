//! Run configuration read from TOML.
//!
//! Every key is optional; missing keys fall back to the apparatus defaults.
//!
//! ```toml
//! [crystal]
//! length_mm = 0.5
//! scan_lengths_mm = [0.5, 1.0, 3.0]
//!
//! [pump]
//! wavelength_nm = 405.0
//! coherence_time_fs = 544.0
//!
//! [angles]
//! phi1_deg = 1.807
//! phi2_deg = 1.84
//! phi3_deg = 1.806
//!
//! [compensation]
//! length_mm = 3.0
//! orientation_deg = 0.0
//!
//! [material]
//! sellmeier.o = [2.7359, 0.01878, 0.01822, 0.01354]
//! sellmeier.e = [2.3753, 0.01224, 0.01667, 0.01516]
//! ```

use serde::{Deserialize, Serialize};

use crate::dispersion::{coincidence_width_from_wavelength, ReferenceTable, Sellmeier};
use crate::error::{Error, Result};
use crate::source::{Compensation, GroupVelocities, Orientation, SourceConfig};
use crate::tomography::{MleOptions, OptimizerKind};
use crate::units::{FS, MM, NM};

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    #[serde(default)]
    crystal: CrystalSection,
    #[serde(default)]
    pump: PumpSection,
    #[serde(default)]
    angles: AnglesSection,
    compensation: Option<CompensationSection>,
    #[serde(default)]
    material: MaterialSection,
    #[serde(default)]
    detection: DetectionSection,
    #[serde(default)]
    tomography: TomographySection,
    #[serde(default)]
    simulation: SimulationSection,
    #[serde(default)]
    bell: BellSection,
    #[serde(default)]
    interference: InterferenceSection,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct CrystalSection {
    length_mm: Option<f64>,
    scan_lengths_mm: Option<Vec<f64>>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct PumpSection {
    wavelength_nm: Option<f64>,
    coherence_time_fs: Option<f64>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnglesSection {
    phi1_deg: Option<f64>,
    phi2_deg: Option<f64>,
    phi3_deg: Option<f64>,
    internal_deg: Option<f64>,
    external_deg: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct CompensationSection {
    length_mm: f64,
    #[serde(default)]
    orientation_deg: f64,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SellmeierSection {
    o: Option<Sellmeier>,
    e: Option<Sellmeier>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialSection {
    #[serde(default)]
    sellmeier: SellmeierSection,
    reference_table: Option<ReferenceTable>,
    cut_angle_deg: Option<f64>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct DetectionSection {
    coincidence_bandwidth_nm: Option<f64>,
    beam_waist_mm: Option<f64>,
}

/// Tomography settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TomographySection {
    pub optimizer: OptimizerKind,
    pub max_restarts: usize,
    /// Counts CSV to reconstruct; when absent, counts are simulated.
    pub counts: Option<String>,
}

impl Default for TomographySection {
    fn default() -> Self {
        Self {
            optimizer: OptimizerKind::Simplex,
            max_restarts: 10,
            counts: None,
        }
    }
}

/// Count-simulation settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationSection {
    /// Mean events per setting for a unit-probability projector.
    pub mean_events: f64,
    pub background: f64,
    /// Decoherence parameter of the simulated state; derived from the source
    /// geometry when absent.
    pub p: Option<f64>,
    /// Relative phase φ (rad) on the HH–VV coherence.
    pub phase_rad: f64,
}

impl Default for SimulationSection {
    fn default() -> Self {
        Self {
            mean_events: 1e4,
            background: 0.0,
            p: None,
            phase_rad: 0.0,
        }
    }
}

/// Bell-test settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BellSection {
    /// Decoherence parameters of the model curves.
    pub curve_p: Vec<f64>,
    pub theta_step_deg: f64,
    /// State used for the simulated measurement points.
    pub measured_p: f64,
    pub measured_theta_deg: Vec<f64>,
    /// Target standard deviation of S for the simulated points.
    pub target_sigma: f64,
}

impl Default for BellSection {
    fn default() -> Self {
        Self {
            curve_p: vec![1.0, 0.7, 0.5],
            theta_step_deg: 0.5,
            measured_p: 0.77,
            measured_theta_deg: vec![16.0, 24.0, 40.0],
            target_sigma: 0.025,
        }
    }
}

/// Fringe-scan settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InterferenceSection {
    pub tau_points: usize,
    pub tau_half_span_fs: f64,
    pub length_mm: f64,
}

impl Default for InterferenceSection {
    fn default() -> Self {
        Self {
            tau_points: 8192,
            tau_half_span_fs: 300.0,
            length_mm: 3.0,
        }
    }
}

/// Fully resolved configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub source: SourceConfig,
    /// Crystal lengths (m) used by scans and reports.
    pub scan_lengths: Vec<f64>,
    pub tomography: TomographySection,
    pub simulation: SimulationSection,
    pub bell: BellSection,
    pub interference: InterferenceSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::from_toml_str("").expect("empty configuration is valid")
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Config(format!("{name} must be positive, got {v}")))
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let doc: Document = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut src = SourceConfig::laser_diode();

        if let Some(l) = doc.crystal.length_mm {
            src.crystal_length = l * MM;
        }
        if let Some(w) = doc.pump.wavelength_nm {
            src.pump_wavelength = positive("pump.wavelength_nm", w)? * NM;
        }
        if let Some(t) = doc.pump.coherence_time_fs {
            src.coherence_time = positive("pump.coherence_time_fs", t)? * FS;
        }
        let a = &doc.angles;
        for (slot, value) in src
            .phi_deg
            .iter_mut()
            .zip([a.phi1_deg, a.phi2_deg, a.phi3_deg])
        {
            if let Some(v) = value {
                *slot = v;
            }
        }
        if let Some(v) = a.internal_deg {
            src.internal_angle_deg = v;
        }
        if let Some(v) = a.external_deg {
            src.external_angle_deg = v;
        }
        if let Some(c) = &doc.compensation {
            src.compensation = Some(Compensation {
                length: c.length_mm * MM,
                orientation: Orientation::from_degrees(c.orientation_deg)
                    .map_err(|e| Error::Config(e.to_string()))?,
            });
        }

        let m = &doc.material;
        if let Some(o) = m.sellmeier.o {
            src.material.ordinary = o;
        }
        if let Some(e) = m.sellmeier.e {
            src.material.extraordinary = e;
        }
        if let Some(t) = m.reference_table {
            src.material.reference_table = t;
            src.group_velocities = GroupVelocities::from_table(&t);
        }
        let geometry_changed = m.sellmeier.o.is_some()
            || m.sellmeier.e.is_some()
            || doc.pump.wavelength_nm.is_some()
            || a.internal_deg.is_some();
        src.material.cut_angle_deg = match m.cut_angle_deg {
            Some(c) => c,
            None if !geometry_changed => src.material.cut_angle_deg,
            None => src
                .material
                .phase_matching_cut(src.pump_wavelength, src.internal_angle_deg.to_radians())
                .map_err(|e| Error::Config(e.to_string()))?
                .to_degrees(),
        };

        if let Some(bw) = doc.detection.coincidence_bandwidth_nm {
            src.coincidence_width = coincidence_width_from_wavelength(
                positive("detection.coincidence_bandwidth_nm", bw)? * NM,
                2.0 * src.pump_wavelength,
            );
        }
        if let Some(w) = doc.detection.beam_waist_mm {
            src.beam_waist = positive("detection.beam_waist_mm", w)? * MM;
        }
        src.validate()?;

        let scan_lengths = doc
            .crystal
            .scan_lengths_mm
            .unwrap_or_else(|| vec![0.5, 1.0, 3.0])
            .into_iter()
            .map(|l| {
                if l >= 0.0 && l.is_finite() {
                    Ok(l * MM)
                } else {
                    Err(Error::Config(format!("scan length {l} mm must be ≥ 0")))
                }
            })
            .collect::<Result<Vec<_>>>()?;

        positive("simulation.mean_events", doc.simulation.mean_events)?;
        if !(doc.simulation.background >= 0.0) {
            return Err(Error::Config("simulation.background must be ≥ 0".into()));
        }
        if let Some(p) = doc.simulation.p {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("simulation.p = {p} outside [0, 1]")));
            }
        }
        positive("bell.theta_step_deg", doc.bell.theta_step_deg)?;
        positive("bell.target_sigma", doc.bell.target_sigma)?;
        if doc.interference.tau_points < 2 {
            return Err(Error::Config("interference.tau_points must be ≥ 2".into()));
        }
        positive(
            "interference.tau_half_span_fs",
            doc.interference.tau_half_span_fs,
        )?;

        Ok(Self {
            source: src,
            scan_lengths,
            tomography: doc.tomography,
            simulation: doc.simulation,
            bell: doc.bell,
            interference: doc.interference,
        })
    }

    pub fn mle_options(&self, seed: u64) -> MleOptions {
        let mut opts = MleOptions::default()
            .with_optimizer(self.tomography.optimizer)
            .with_seed(seed);
        opts.max_restarts = self.tomography.max_restarts;
        opts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_is_laser_diode_default() {
        let cfg = RunConfig::from_toml_str("").unwrap();
        assert_eq!(cfg.source, SourceConfig::laser_diode());
        assert_eq!(cfg.scan_lengths, vec![0.5 * MM, 1.0 * MM, 3.0 * MM]);
    }

    #[test]
    fn overrides_apply() {
        let text = r#"
            [crystal]
            length_mm = 3.0
            [pump]
            coherence_time_fs = 600
            [angles]
            phi2_deg = 2.0
            [compensation]
            length_mm = 3.0
            orientation_deg = 90
            [tomography]
            optimizer = "annealing"
        "#;
        let cfg = RunConfig::from_toml_str(text).unwrap();
        assert_eq!(cfg.source.crystal_length, 3.0 * MM);
        assert!((cfg.source.coherence_time - 600.0 * FS).abs() < 1e-27);
        assert_eq!(cfg.source.phi_deg, [1.807, 2.0, 1.806]);
        let c = cfg.source.compensation.unwrap();
        assert_eq!(c.orientation, Orientation::Enhancing);
        assert_eq!(cfg.tomography.optimizer, OptimizerKind::Annealing);
    }

    #[test]
    fn material_override() {
        let text = r#"
            [material]
            sellmeier.o = [2.7359, 0.01878, 0.01822, 0.01354]
            sellmeier.e = [2.3753, 0.01224, 0.01667, 0.01516]
        "#;
        let cfg = RunConfig::from_toml_str(text).unwrap();
        assert!(
            (cfg.source.material.cut_angle_deg
                - SourceConfig::laser_diode().material.cut_angle_deg)
                .abs()
                < 1e-12
        );
        assert!(RunConfig::from_toml_str("[material]\nsellmeier.o = [1.0, 2.0]\n").is_err());
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(
            RunConfig::from_toml_str("[crystal]\nlenght_mm = 1\n"),
            Err(Error::Config(_))
        ));
        assert!(RunConfig::from_toml_str("[pump]\ncoherence_time_fs = -1\n").is_err());
        assert!(
            RunConfig::from_toml_str("[compensation]\nlength_mm = 1\norientation_deg = 45\n")
                .is_err()
        );
        assert!(RunConfig::from_toml_str("[simulation]\np = 1.5\n").is_err());
        assert!(RunConfig::from_toml_str("not toml at all [").is_err());
    }
}
