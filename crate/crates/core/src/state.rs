//! Two-photon polarization states over the ordered basis (HH, HV, VH, VV),
//! signal first.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix4, CVector4, ZERO};

pub const BASIS_LABELS: [&str; 4] = ["HH", "HV", "VH", "VV"];

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;

/// Single-photon polarization α_H|H⟩ + α_V|V⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationKet {
    h: Complex64,
    v: Complex64,
}

impl PolarizationKet {
    pub fn new(h: Complex64, v: Complex64) -> Result<Self> {
        let norm = (h.norm_sqr() + v.norm_sqr()).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::domain(
                "polarization ket must have nonzero finite norm",
            ));
        }
        Ok(Self {
            h: h / norm,
            v: v / norm,
        })
    }

    /// Linear polarization at `deg` counter-clockwise from horizontal.
    pub fn linear(deg: f64) -> Self {
        let (s, c) = deg.to_radians().sin_cos();
        Self {
            h: Complex64::new(c, 0.0),
            v: Complex64::new(s, 0.0),
        }
    }

    pub fn horizontal() -> Self {
        Self::linear(0.0)
    }

    pub fn vertical() -> Self {
        Self::linear(90.0)
    }

    pub fn diagonal() -> Self {
        Self::linear(45.0)
    }

    pub fn antidiagonal() -> Self {
        Self::linear(135.0)
    }

    /// (|H⟩ − i|V⟩)/√2.
    pub fn right_circular() -> Self {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            h: Complex64::new(a, 0.0),
            v: Complex64::new(0.0, -a),
        }
    }

    /// (|H⟩ + i|V⟩)/√2.
    pub fn left_circular() -> Self {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            h: Complex64::new(a, 0.0),
            v: Complex64::new(0.0, a),
        }
    }

    pub fn h(&self) -> Complex64 {
        self.h
    }

    pub fn v(&self) -> Complex64 {
        self.v
    }

    /// Signal ⊗ idler product vector in the (HH, HV, VH, VV) basis.
    pub fn tensor(&self, idler: &PolarizationKet) -> CVector4 {
        CVector4::new(
            self.h * idler.h,
            self.h * idler.v,
            self.v * idler.h,
            self.v * idler.v,
        )
    }
}

/// A validated two-photon polarization density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix4 {
    m: CMatrix4,
}

impl DensityMatrix4 {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn from_matrix(m: CMatrix4) -> Result<Self> {
        let herm = linalg::hermiticity_defect(&m);
        if herm > HERMITIAN_TOL {
            return Err(Error::domain(format!(
                "matrix not Hermitian (defect {herm:.3e})"
            )));
        }
        let tr = linalg::trace(&m).re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::domain(format!("trace {tr} differs from 1")));
        }
        let min = linalg::hermitian_eigenvalues(&m)[0];
        if min < -PSD_TOL {
            return Err(Error::domain(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self { m })
    }

    /// Pure state |ψ⟩⟨ψ| from unnormalised amplitudes.
    pub fn pure(psi: CVector4) -> Result<Self> {
        let n = psi.norm();
        if !(n > 0.0) {
            return Err(Error::domain("zero state vector"));
        }
        let psi = psi.unscale(n);
        Self::from_matrix(linalg::outer(&psi, &psi))
    }

    /// (|HH⟩ + |VV⟩)/√2.
    pub fn bell_phi_plus() -> Self {
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::pure(CVector4::new(a, ZERO, ZERO, a)).expect("Bell state is valid")
    }

    pub fn maximally_mixed() -> Self {
        Self {
            m: CMatrix4::identity().scale(0.25),
        }
    }

    pub fn matrix(&self) -> &CMatrix4 {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix4 {
        self.m
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.m[(row, col)]
    }

    /// ⟨ψ|ρ|ψ⟩ for a (normalised) two-photon vector.
    pub fn expectation(&self, psi: &CVector4) -> f64 {
        (psi.adjoint() * self.m * psi)[(0, 0)].re
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        linalg::hermitian_eigenvalues(&self.m)
    }

    /// Frobenius distance ‖ρ − σ‖_F.
    pub fn distance(&self, other: &DensityMatrix4) -> f64 {
        linalg::frobenius(&(self.m - other.m))
    }

    /// p·ρ + (1 − p)·σ.
    pub fn mix(&self, other: &DensityMatrix4, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(format!("mixing weight {p} outside [0, 1]")));
        }
        Ok(Self {
            m: self.m.scale(p) + other.m.scale(1.0 - p),
        })
    }

    pub fn to_document(&self) -> DensityDocument {
        DensityDocument {
            basis: BASIS_LABELS.iter().map(|s| s.to_string()).collect(),
            rows: (0..4)
                .map(|i| {
                    (0..4)
                        .map(|j| [self.m[(i, j)].re, self.m[(i, j)].im])
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_document(doc: &DensityDocument) -> Result<Self> {
        if doc.basis.iter().map(String::as_str).ne(BASIS_LABELS) {
            return Err(Error::Parse(format!("unexpected basis {:?}", doc.basis)));
        }
        if doc.rows.len() != 4 || doc.rows.iter().any(|r| r.len() != 4) {
            return Err(Error::Parse("density matrix must be 4×4".into()));
        }
        let m = CMatrix4::from_fn(|i, j| Complex64::new(doc.rows[i][j][0], doc.rows[i][j][1]));
        Self::from_matrix(m)
    }
}

impl fmt::Display for DensityMatrix4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "      {:>17} {:>17} {:>17} {:>17}",
            "HH", "HV", "VH", "VV"
        )?;
        for (i, label) in BASIS_LABELS.iter().enumerate() {
            write!(f, "{label:>4}  ")?;
            for j in 0..4 {
                let z = self.m[(i, j)];
                write!(f, " {:>+7.4}{:>+7.4}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Serialised form of a density matrix: row-major `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityDocument {
    pub basis: Vec<String>,
    pub rows: Vec<Vec<[f64; 2]>>,
}

/// ρ = p·|Φ⁺⟩⟨Φ⁺| + (1 − p)·ρ_m with relative phase `phi` (rad) on the
/// HH–VV coherence.
pub fn model_state(p: f64, phi: f64) -> Result<DensityMatrix4> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!(
            "decoherence parameter {p} outside [0, 1]"
        )));
    }
    let mut m = CMatrix4::zeros();
    m[(0, 0)] = Complex64::new(0.5, 0.0);
    m[(3, 3)] = Complex64::new(0.5, 0.0);
    let corner = Complex64::from_polar(0.5 * p, -phi);
    m[(0, 3)] = corner;
    m[(3, 0)] = corner.conj();
    Ok(DensityMatrix4 { m })
}

/// Coincidence probability with linear polarizers at `xi_s`, `xi_i` (deg).
pub fn coincidence_probability(rho: &DensityMatrix4, xi_s: f64, xi_i: f64) -> f64 {
    let psi = PolarizationKet::linear(xi_s).tensor(&PolarizationKet::linear(xi_i));
    rho.expectation(&psi)
}

/// Contrast of the coincidence rate versus signal polarizer angle with the
/// idler polarizer at 45°.
pub fn visibility(rho: &DensityMatrix4) -> Result<f64> {
    let max = coincidence_probability(rho, 45.0, 45.0);
    let min = coincidence_probability(rho, 135.0, 45.0);
    let den = max + min;
    if !(den > 0.0) {
        return Err(Error::domain(
            "visibility undefined: no coincidences at 45°/135°",
        ));
    }
    Ok((max - min) / den)
}

/// Tr ρ².
pub fn purity(rho: &DensityMatrix4) -> f64 {
    linalg::trace_product(rho.matrix(), rho.matrix()).re
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_limit_is_bell_state() {
        let rho = model_state(1.0, 0.0).unwrap();
        assert!(rho.distance(&DensityMatrix4::bell_phi_plus()) < 1e-15);
        assert!((purity(&rho) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mixed_limit() {
        let rho = model_state(0.0, 0.0).unwrap();
        assert_eq!(rho.get(0, 3), ZERO);
        assert!((purity(&rho) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn corners_hold_half_p() {
        let rho = model_state(0.77, 0.0).unwrap();
        assert!((rho.get(0, 3).re - 0.385).abs() < 1e-15);
        assert!((rho.get(3, 0).re - 0.385).abs() < 1e-15);
    }

    #[test]
    fn phase_rotates_corner_only() {
        let rho = model_state(0.6, 0.7).unwrap();
        assert!((rho.get(0, 3).norm() - 0.3).abs() < 1e-15);
        assert!((rho.get(0, 3).arg() + 0.7).abs() < 1e-15);
        assert_eq!(rho.get(3, 0), rho.get(0, 3).conj());
    }

    #[test]
    fn model_state_is_decomposition() {
        let p = 0.42;
        let mixture = model_state(0.0, 0.0).unwrap();
        let expected = DensityMatrix4::bell_phi_plus().mix(&mixture, p).unwrap();
        assert!(model_state(p, 0.0).unwrap().distance(&expected) < 1e-15);
    }

    #[test]
    fn out_of_range_p_rejected() {
        assert!(model_state(1.01, 0.0).is_err());
        assert!(model_state(-0.1, 0.0).is_err());
    }

    #[test]
    fn coincidence_probability_examples() {
        let bell = model_state(1.0, 0.0).unwrap();
        assert!((coincidence_probability(&bell, 45.0, 45.0) - 0.5).abs() < 1e-15);
        assert!(coincidence_probability(&bell, 135.0, 45.0).abs() < 1e-15);
        let rho = model_state(0.77, 0.0).unwrap();
        assert!((coincidence_probability(&rho, 135.0, 45.0) - 0.0575).abs() < 1e-15);
    }

    #[test]
    fn probability_follows_closed_form_at_45() {
        let p = 0.63;
        let rho = model_state(p, 0.0).unwrap();
        for k in 0..=36 {
            let xi = 5.0 * k as f64;
            let closed = 0.5 * p * (xi - 45.0f64).to_radians().cos().powi(2) + 0.25 * (1.0 - p);
            assert!((coincidence_probability(&rho, xi, 45.0) - closed).abs() < 1e-14);
        }
    }

    #[test]
    fn visibility_equals_p() {
        assert!((visibility(&model_state(1.0, 0.0).unwrap()).unwrap() - 1.0).abs() < 1e-15);
        let rho = model_state(0.528, 0.0).unwrap();
        let max = coincidence_probability(&rho, 45.0, 45.0);
        let min = coincidence_probability(&rho, 135.0, 45.0);
        assert!(((max - min) / (max + min) - 0.528).abs() < 1e-12);
        assert!((visibility(&rho).unwrap() - 0.528).abs() < 1e-12);
    }

    #[test]
    fn visibility_undefined_when_idler_orthogonal_to_45() {
        let psi = PolarizationKet::horizontal().tensor(&PolarizationKet::antidiagonal());
        let rho = DensityMatrix4::pure(psi).unwrap();
        assert!(visibility(&rho).is_err());
    }

    #[test]
    fn purity_of_model_state() {
        for p in [0.0, 0.3, 0.77, 1.0] {
            let rho = model_state(p, 0.0).unwrap();
            let direct = (rho.matrix() * rho.matrix()).trace().re;
            assert!((purity(&rho) - (1.0 + p * p) / 2.0).abs() < 1e-15);
            assert!((purity(&rho) - direct).abs() < 1e-15);
        }
        assert!((purity(&model_state(0.77, 0.0).unwrap()) - 0.79645).abs() < 1e-12);
    }

    #[test]
    fn four_setting_completeness() {
        let rho = model_state(0.35, 0.4).unwrap();
        let total: f64 = [(45.0, 45.0), (45.0, 135.0), (135.0, 45.0), (135.0, 135.0)]
            .iter()
            .map(|&(s, i)| coincidence_probability(&rho, s, i))
            .sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn constructor_validation() {
        let mut m = CMatrix4::identity().scale(0.25);
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(DensityMatrix4::from_matrix(m).is_err());
        let m = CMatrix4::identity().scale(0.3);
        assert!(DensityMatrix4::from_matrix(m).is_err());
        let mut m = CMatrix4::identity().scale(0.5);
        m[(0, 0)] = Complex64::new(-0.5, 0.0);
        assert!(DensityMatrix4::from_matrix(m).is_err());
    }

    #[test]
    fn document_round_trip_is_exact() {
        let rho = model_state(0.7311, 0.123).unwrap();
        let json = serde_json::to_string(&rho.to_document()).unwrap();
        let doc: DensityDocument = serde_json::from_str(&json).unwrap();
        let back = DensityMatrix4::from_document(&doc).unwrap();
        assert_eq!(back, rho);
    }

    #[test]
    fn circular_kets_are_orthogonal() {
        let r = PolarizationKet::right_circular();
        let l = PolarizationKet::left_circular();
        let overlap = r.h().conj() * l.h() + r.v().conj() * l.v();
        assert!(overlap.norm() < 1e-15);
    }
}
