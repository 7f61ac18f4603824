//! Two-qubit product projectors for tomography and their dual basis.

use std::fmt::Write as _;

use nalgebra::{DMatrix, SMatrix};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix4};
use crate::state::PolarizationKet;

/// Labels of the standard 16-setting product set, in acquisition order.
pub const STANDARD_LABELS: [&str; 16] = [
    "HH", "HV", "VV", "VH", "RH", "RV", "DV", "DH", "DR", "DD", "RD", "HD", "VD", "VL", "HL", "RL",
];

/// Relative singular-value floor below which a projector set is rejected.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    label: String,
    signal: PolarizationKet,
    idler: PolarizationKet,
    matrix: CMatrix4,
}

/// Single-photon ket for one of H, V, D (45°), A (135°), R, L.
pub fn ket_for(symbol: char) -> Result<PolarizationKet> {
    Ok(match symbol {
        'H' => PolarizationKet::horizontal(),
        'V' => PolarizationKet::vertical(),
        'D' => PolarizationKet::diagonal(),
        'A' => PolarizationKet::antidiagonal(),
        'R' => PolarizationKet::right_circular(),
        'L' => PolarizationKet::left_circular(),
        other => return Err(Error::UnknownLabel(other.to_string())),
    })
}

impl Projector {
    pub fn new(label: impl Into<String>, signal: PolarizationKet, idler: PolarizationKet) -> Self {
        let v = signal.tensor(&idler);
        Self {
            label: label.into(),
            signal,
            idler,
            matrix: linalg::outer(&v, &v),
        }
    }

    /// Builds a projector from a two-letter label such as `"DR"`.
    pub fn from_label(label: &str) -> Result<Self> {
        let mut chars = label.chars();
        match (chars.next(), chars.next(), chars.next()) {
            (Some(s), Some(i), None) => Ok(Self::new(label, ket_for(s)?, ket_for(i)?)),
            _ => Err(Error::UnknownLabel(label.to_string())),
        }
    }

    /// Product projector for linear polarizers at `xi_s`, `xi_i` (deg).
    pub fn linear(xi_s: f64, xi_i: f64) -> Self {
        Self::new(
            format!("{xi_s}/{xi_i}"),
            PolarizationKet::linear(xi_s),
            PolarizationKet::linear(xi_i),
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn signal(&self) -> &PolarizationKet {
        &self.signal
    }

    pub fn idler(&self) -> &PolarizationKet {
        &self.idler
    }

    pub fn matrix(&self) -> &CMatrix4 {
        &self.matrix
    }

    /// Tr[ρ P].
    pub fn probability(&self, rho: &CMatrix4) -> f64 {
        linalg::trace_product(rho, &self.matrix).re
    }
}

pub fn standard_set() -> Vec<Projector> {
    STANDARD_LABELS
        .iter()
        .map(|l| Projector::from_label(l).expect("standard labels are valid"))
        .collect()
}

/// Text table of the set: label followed by signal and idler amplitudes.
pub fn describe(set: &[Projector]) -> String {
    let mut out =
        String::from("label  signal(H)        signal(V)        idler(H)         idler(V)\n");
    for p in set {
        let amps = [p.signal.h(), p.signal.v(), p.idler.h(), p.idler.v()];
        let _ = write!(out, "{:<6}", p.label);
        for a in amps {
            let _ = write!(out, " {:+.6}{:+.6}i", a.re, a.im);
        }
        out.push('\n');
    }
    out
}

/// Operators Γ_ν with Tr[P_μ Γ_ν] = δ_μν.
#[derive(Debug, Clone)]
pub struct DualBasis {
    labels: Vec<String>,
    gammas: Vec<CMatrix4>,
}

impl DualBasis {
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn gammas(&self) -> &[CMatrix4] {
        &self.gammas
    }

    /// Σ_μ p_μ Γ_μ, with `probabilities` in the order of the projector set.
    pub fn reconstruct(&self, probabilities: &[f64]) -> Result<CMatrix4> {
        if probabilities.len() != self.gammas.len() {
            return Err(Error::domain(format!(
                "expected {} probabilities, got {}",
                self.gammas.len(),
                probabilities.len()
            )));
        }
        Ok(self
            .gammas
            .iter()
            .zip(probabilities)
            .fold(CMatrix4::zeros(), |acc, (g, &p)| acc + g.scale(p)))
    }
}

/// Gram matrix G_μν = Tr[P_μ P_ν].
pub fn gram_matrix(set: &[Projector]) -> DMatrix<f64> {
    let n = set.len();
    DMatrix::from_fn(n, n, |i, j| {
        linalg::trace_product(&set[i].matrix, &set[j].matrix).re
    })
}

pub fn dual_basis(set: &[Projector]) -> Result<DualBasis> {
    if set.len() != 16 {
        return Err(Error::NotInformationallyComplete);
    }
    let g: SMatrix<f64, 16, 16> =
        SMatrix::from_fn(|i, j| linalg::trace_product(&set[i].matrix, &set[j].matrix).re);
    let sv = g.singular_values();
    let max = sv.max();
    if !(sv.min() > RANK_TOLERANCE * max) {
        return Err(Error::NotInformationallyComplete);
    }
    let inv = g.try_inverse().ok_or(Error::NotInformationallyComplete)?;
    let gammas = (0..16)
        .map(|nu| {
            (0..16).fold(CMatrix4::zeros(), |acc, mu| {
                acc + set[mu].matrix.scale(inv[(nu, mu)])
            })
        })
        .collect();
    Ok(DualBasis {
        labels: set.iter().map(|p| p.label.clone()).collect(),
        gammas,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{model_state, DensityMatrix4};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn projectors_are_rank_one_and_hermitian() {
        for p in standard_set() {
            let m = p.matrix();
            assert!(linalg::frobenius(&(m * m - m)) < 1e-12, "{}", p.label());
            assert!(close(linalg::trace(m).re, 1.0, 1e-12));
            assert!(linalg::hermiticity_defect(m) < 1e-15);
        }
    }

    #[test]
    fn projectors_are_products() {
        for p in standard_set() {
            let ev = linalg::hermitian_eigenvalues(&linalg::partial_transpose_idler(p.matrix()));
            assert!(
                ev[0] > -1e-12,
                "{} has negative partial transpose",
                p.label()
            );
            assert!(close(ev[3], 1.0, 1e-12));
            assert!(ev[2].abs() < 1e-12);
        }
    }

    #[test]
    fn example_probabilities() {
        let bell = DensityMatrix4::bell_phi_plus();
        let hh = Projector::from_label("HH").unwrap();
        assert!(close(hh.probability(bell.matrix()), 0.5, 1e-15));
        let rho = model_state(0.77, 0.0).unwrap();
        let dd = Projector::from_label("DD").unwrap();
        assert!(close(dd.probability(rho.matrix()), 0.25 * 1.77, 1e-15));
    }

    #[test]
    fn gram_matrix_is_nonsingular() {
        let g = gram_matrix(&standard_set());
        let det = g.determinant();
        assert!(det.abs() > 1e-8, "det = {det}");
    }

    #[test]
    fn duality_holds() {
        let set = standard_set();
        let dual = dual_basis(&set).unwrap();
        for (mu, p) in set.iter().enumerate() {
            for (nu, g) in dual.gammas().iter().enumerate() {
                let v = linalg::trace_product(p.matrix(), g);
                let target = if mu == nu { 1.0 } else { 0.0 };
                assert!(close(v.re, target, 1e-10) && v.im.abs() < 1e-10);
            }
        }
        for g in dual.gammas() {
            assert!(linalg::hermiticity_defect(g) < 1e-10);
        }
    }

    #[test]
    fn bell_state_reconstruction() {
        let set = standard_set();
        let dual = dual_basis(&set).unwrap();
        let bell = DensityMatrix4::bell_phi_plus();
        let probs: Vec<f64> = set.iter().map(|p| p.probability(bell.matrix())).collect();
        let rec = dual.reconstruct(&probs).unwrap();
        assert!(linalg::frobenius(&(rec - bell.matrix())) < 1e-10);
        assert!(dual.reconstruct(&probs[..15]).is_err());
    }

    #[test]
    fn duplicated_projector_rejected() {
        let mut set = standard_set();
        set[15] = set[0].clone();
        assert!(matches!(
            dual_basis(&set),
            Err(Error::NotInformationallyComplete)
        ));
        assert!(matches!(
            dual_basis(&set[..15]),
            Err(Error::NotInformationallyComplete)
        ));
    }

    #[test]
    fn labels_parse() {
        assert!(Projector::from_label("HX").is_err());
        assert!(Projector::from_label("HHH").is_err());
        assert!(Projector::from_label("A").is_err());
        let table = describe(&standard_set());
        assert_eq!(table.lines().count(), 17);
    }
}
