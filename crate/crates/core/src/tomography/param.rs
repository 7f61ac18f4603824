use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix4, CVector4};
use crate::state::DensityMatrix4;

/// Positions of the six complex sub-diagonal entries, in parameter order.
const OFF_DIAGONAL: [(usize, usize); 6] = [(1, 0), (2, 0), (2, 1), (3, 0), (3, 1), (3, 2)];

/// Sixteen reals encoding a lower-triangular T with real diagonal:
/// `t[0..4]` is the diagonal, then (re, im) pairs for the entries below it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangularParam {
    pub t: [f64; 16],
}

impl TriangularParam {
    pub const LEN: usize = 16;

    pub fn new(t: [f64; 16]) -> Self {
        Self { t }
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        let t: [f64; 16] = v
            .try_into()
            .map_err(|_| Error::domain(format!("expected 16 parameters, got {}", v.len())))?;
        Ok(Self { t })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.t
    }

    pub fn matrix(&self) -> CMatrix4 {
        let mut m = CMatrix4::zeros();
        for i in 0..4 {
            m[(i, i)] = Complex64::new(self.t[i], 0.0);
        }
        for (k, &(r, c)) in OFF_DIAGONAL.iter().enumerate() {
            m[(r, c)] = Complex64::new(self.t[4 + 2 * k], self.t[5 + 2 * k]);
        }
        m
    }

    /// Inverse of [`TriangularParam::matrix`]. Entries above the diagonal and
    /// imaginary parts of the diagonal are ignored.
    pub fn from_matrix(m: &CMatrix4) -> Self {
        let mut t = [0.0; 16];
        for i in 0..4 {
            t[i] = m[(i, i)].re;
        }
        for (k, &(r, c)) in OFF_DIAGONAL.iter().enumerate() {
            t[4 + 2 * k] = m[(r, c)].re;
            t[5 + 2 * k] = m[(r, c)].im;
        }
        Self { t }
    }

    /// T with T†T = ρ for a positive definite ρ.
    pub fn from_density(rho: &CMatrix4) -> Result<Self> {
        // With J the exchange matrix, JρJ = LL† gives ρ = (JLJ)(JLJ)†, so
        // T = (JLJ)† is lower triangular.
        let j = CMatrix4::from_fn(|r, c| {
            if r + c == 3 {
                linalg::ONE
            } else {
                linalg::ZERO
            }
        });
        let l = linalg::cholesky_lower(&(j * rho * j))
            .ok_or_else(|| Error::domain("matrix is not positive definite"))?;
        Ok(Self::from_matrix(&(j * l * j).adjoint()))
    }

    /// Tr(T†T), the squared Frobenius norm of T.
    pub fn norm_sqr(&self) -> f64 {
        self.t.iter().map(|x| x * x).sum()
    }

    /// ‖T v‖² = ⟨v|T†T|v⟩.
    pub fn quadratic_form(&self, v: &CVector4) -> f64 {
        let t = &self.t;
        let c = |k: usize| Complex64::new(t[4 + 2 * k], t[5 + 2 * k]);
        let r0 = v[0] * t[0];
        let r1 = c(0) * v[0] + v[1] * t[1];
        let r2 = c(1) * v[0] + c(2) * v[1] + v[2] * t[2];
        let r3 = c(3) * v[0] + c(4) * v[1] + c(5) * v[2] + v[3] * t[3];
        r0.norm_sqr() + r1.norm_sqr() + r2.norm_sqr() + r3.norm_sqr()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut t = self.t;
        t.iter_mut().for_each(|x| *x *= factor);
        Self { t }
    }
}

/// ρ = T†T / Tr(T†T).
pub fn rho_from_t(param: &TriangularParam) -> Result<DensityMatrix4> {
    let norm = param.norm_sqr();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::DegenerateParametrization);
    }
    let t = param.matrix();
    let a = t.adjoint() * t;
    let h = (a + a.adjoint()).unscale(2.0 * norm);
    DensityMatrix4::from_matrix(h)
}
