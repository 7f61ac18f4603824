//! Physics and data analysis for a two-crystal Type-I down-conversion source
//! pumped by a short-coherence CW laser.
//!
//! The crate is organised along the measurement chain:
//!
//! * [`dispersion`]: BBO refractive indices, phase mismatch and spectra.
//! * [`source`]: propagation delays through the crystal pair and the
//!   decoherence parameter `p`.
//! * [`state`]: the 4×4 polarization density matrix and polarizer statistics.
//! * [`bell`]: CHSH correlation functions and the `S` parameter.
//! * [`projectors`]: the 16 tomographic projectors and their dual basis.
//! * [`tomography`]: linear inversion and maximum-likelihood reconstruction.
//! * [`experiment`]: seeded Poisson count synthesis.
//! * [`interference`]: single-count and coincidence fringe envelopes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bell;
pub mod config;
pub mod dispersion;
pub mod error;
pub mod experiment;
pub mod interference;
pub mod io;
pub mod linalg;
pub mod projectors;
pub mod source;
pub mod state;
pub mod tomography;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use bell::{chsh_s, chsh_scan, correlation_e, violation_significance, ChshSettings};
pub use dispersion::{
    effective_spectrum, longitudinal_mismatch, mismatch_function, transverse_profile, wavenumber,
    Branch, MaterialModel, ReferenceTable, Sellmeier, Spectrum, SpectrumMode,
};
pub use experiment::{
    bell_acquisition, events_for_mean_count, events_for_sigma, fit_visibility, simulate_counts,
    AcquisitionMode, AcquisitionPlan, BellMeasurement, Setting, VisibilityFit,
};
pub use interference::{envelope_width, fringe_pattern, FringePattern};
pub use projectors::{dual_basis, standard_set, DualBasis, Projector};
pub use source::{
    compensated_delay, decoherence_parameter, delay_report, position_averaged_p,
    propagation_delays, Compensation, DelayReport, GroupVelocities, Orientation, SourceConfig,
};
pub use state::{
    coincidence_probability, model_state, purity, visibility, DensityMatrix4, PolarizationKet,
};
pub use tomography::{
    linear_inversion, log_likelihood, mle_reconstruct, rho_from_t, CountRecord, Diagnostics,
    LinearEstimate, MleOptions, OptimizerKind, Reconstruction, TomographyData, TriangularParam,
};
