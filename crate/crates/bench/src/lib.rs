//! Shared inputs for the benchmarks.

use twocrystal_core::experiment::{simulate_counts, AcquisitionPlan};
use twocrystal_core::{model_state, standard_set, SourceConfig, TomographyData};

/// Poisson counts for the 16 standard settings drawn from a model state.
pub fn tomography_fixture(p: f64, mean_events: f64, seed: u64) -> TomographyData {
    let set = standard_set();
    let rho = model_state(p, 0.0).expect("valid p");
    let records = simulate_counts(&rho, &AcquisitionPlan::tomography(&set, mean_events, seed))
        .expect("valid plan");
    TomographyData::new(&records, &set).expect("complete records")
}

pub fn source_fixture(length_mm: f64) -> SourceConfig {
    SourceConfig::laser_diode().with_crystal_length(length_mm * twocrystal_core::units::MM)
}
