use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix4};
use crate::projectors::DualBasis;

use super::data::TomographyData;

/// Labels whose counts sum to the normalisation N̂.
pub const NORMALISATION_LABELS: [&str; 4] = ["HH", "HV", "VH", "VV"];

/// Eigenvalues above −tolerance count as nonnegative.
pub const PSD_TOLERANCE: f64 = 1e-12;

/// Unconstrained linear-inversion estimate.
#[derive(Debug, Clone)]
pub struct LinearEstimate {
    pub matrix: CMatrix4,
    pub min_eigenvalue: f64,
    /// True when the estimate is positive semidefinite.
    pub physical: bool,
}

/// ρ = Σ_μ (n_μ/N̂) Γ_μ with N̂ = n_HH + n_HV + n_VH + n_VV.
pub fn linear_inversion(data: &TomographyData, dual: &DualBasis) -> Result<LinearEstimate> {
    if dual
        .labels()
        .iter()
        .map(String::as_str)
        .ne(data.projectors().iter().map(|p| p.label()))
    {
        return Err(Error::domain(
            "dual basis does not match the projector set of the data",
        ));
    }
    let mut missing = Vec::new();
    let mut norm = 0.0;
    for l in NORMALISATION_LABELS {
        match data.count(l) {
            Some(c) => norm += c,
            None => missing.push(l.to_string()),
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingLabels(missing));
    }
    if !(norm > 0.0) {
        return Err(Error::domain("no counts in the H/V basis to normalise by"));
    }
    let freqs: Vec<f64> = data.counts().iter().map(|c| c / norm).collect();
    let m = dual.reconstruct(&freqs)?;
    let m = (m + m.adjoint()).scale(0.5);
    let min = linalg::hermitian_eigenvalues(&m)[0];
    Ok(LinearEstimate {
        matrix: m,
        min_eigenvalue: min,
        physical: min >= -PSD_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{simulate_counts, AcquisitionPlan};
    use crate::projectors::{dual_basis, standard_set};
    use crate::state::{model_state, DensityMatrix4};

    fn exact(rho: &DensityMatrix4) -> TomographyData {
        let set = standard_set();
        let w = set
            .iter()
            .map(|p| 1e4 * p.probability(rho.matrix()))
            .collect();
        TomographyData::from_weights(&set, w).unwrap()
    }

    #[test]
    fn exact_bell_state() {
        let dual = dual_basis(&standard_set()).unwrap();
        let bell = DensityMatrix4::bell_phi_plus();
        let est = linear_inversion(&exact(&bell), &dual).unwrap();
        assert!(linalg::frobenius(&(est.matrix - bell.matrix())) < 1e-10);
    }

    #[test]
    fn exact_mixture() {
        let dual = dual_basis(&standard_set()).unwrap();
        let rho = model_state(0.15, 0.0).unwrap();
        let est = linear_inversion(&exact(&rho), &dual).unwrap();
        assert!(linalg::frobenius(&(est.matrix - rho.matrix())) < 1e-10);
        assert!(est.physical);
    }

    #[test]
    fn noisy_pure_state_can_be_unphysical() {
        let set = standard_set();
        let dual = dual_basis(&set).unwrap();
        let bell = DensityMatrix4::bell_phi_plus();
        let unphysical = (0..50u64)
            .filter(|&seed| {
                let plan = AcquisitionPlan::tomography(&set, 1e3, seed);
                let recs = simulate_counts(&bell, &plan).unwrap();
                let data = TomographyData::new(&recs, &set).unwrap();
                !linear_inversion(&data, &dual).unwrap().physical
            })
            .count();
        assert!(unphysical > 0);
    }
}
