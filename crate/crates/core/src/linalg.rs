//! Small dense complex linear algebra over the two-photon polarization space.

use nalgebra::{Matrix4, SymmetricEigen, Vector4};
use num_complex::Complex64;

pub type CMatrix4 = Matrix4<Complex64>;
pub type CVector4 = Vector4<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn trace(m: &CMatrix4) -> Complex64 {
    (0..4).map(|i| m[(i, i)]).sum()
}

/// Tr(AB) without forming the product.
pub fn trace_product(a: &CMatrix4, b: &CMatrix4) -> Complex64 {
    let mut acc = ZERO;
    for i in 0..4 {
        for k in 0..4 {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn frobenius(m: &CMatrix4) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &CMatrix4) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entry of |M − M†|.
pub fn hermiticity_defect(m: &CMatrix4) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix4) -> [f64; 4] {
    let h = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(h);
    let mut vals = [0.0; 4];
    for (v, e) in vals.iter_mut().zip(eig.eigenvalues.iter()) {
        *v = *e;
    }
    vals.sort_by(f64::total_cmp);
    vals
}

/// Projects a Hermitian matrix onto the unit-trace PSD cone by clipping
/// eigenvalues below `floor` and renormalising.
pub fn clip_to_density(m: &CMatrix4, floor: f64) -> CMatrix4 {
    let h = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(h);
    let vecs = eig.eigenvectors;
    let mut out = CMatrix4::zeros();
    for (j, &lam) in eig.eigenvalues.iter().enumerate() {
        let lam = lam.max(floor);
        let v = vecs.column(j);
        out += (v * v.adjoint()).scale(lam);
    }
    let tr = trace(&out).re;
    out.unscale(tr)
}

/// Outer product |a⟩⟨b|.
pub fn outer(a: &CVector4, b: &CVector4) -> CMatrix4 {
    a * b.adjoint()
}

/// Lower Cholesky factor `L` with `A = L L†` for a Hermitian positive
/// definite `A`. Returns `None` when a pivot is not strictly positive.
pub fn cholesky_lower(a: &CMatrix4) -> Option<CMatrix4> {
    let mut l = CMatrix4::zeros();
    for j in 0..4 {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) {
            return None;
        }
        let d = d.sqrt();
        l[(j, j)] = Complex64::new(d, 0.0);
        for i in (j + 1)..4 {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / d;
        }
    }
    Some(l)
}

/// Partial transpose over the second (idler) qubit.
pub fn partial_transpose_idler(m: &CMatrix4) -> CMatrix4 {
    CMatrix4::from_fn(|r, c| {
        let (s1, i1) = (r / 2, r % 2);
        let (s2, i2) = (c / 2, c % 2);
        m[(2 * s1 + i2, 2 * s2 + i1)]
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cholesky_reproduces_matrix() {
        let b = CMatrix4::from_fn(|i, j| c((i + 2 * j) as f64 * 0.1, (i as f64 - j as f64) * 0.2));
        let a = b * b.adjoint() + CMatrix4::identity();
        let l = cholesky_lower(&a).unwrap();
        for i in 0..4 {
            for j in (i + 1)..4 {
                assert_eq!(l[(i, j)], ZERO);
            }
            assert_eq!(l[(i, i)].im, 0.0);
        }
        assert!(frobenius(&(l * l.adjoint() - a)) < 1e-12);
    }

    #[test]
    fn cholesky_rejects_singular() {
        let mut a = CMatrix4::identity();
        a[(2, 2)] = ZERO;
        assert!(cholesky_lower(&a).is_none());
    }

    #[test]
    fn clipping_restores_positivity() {
        let mut m = CMatrix4::identity().scale(0.3);
        m[(3, 3)] = c(-0.1, 0.0);
        let r = clip_to_density(&m, 1e-6);
        let ev = hermitian_eigenvalues(&r);
        assert!(ev[0] > 0.0);
        assert!((trace(&r).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_transpose_of_bell_state_is_not_positive() {
        let a = c(0.5, 0.0);
        let mut bell = CMatrix4::zeros();
        bell[(0, 0)] = a;
        bell[(0, 3)] = a;
        bell[(3, 0)] = a;
        bell[(3, 3)] = a;
        let ev = hermitian_eigenvalues(&partial_transpose_idler(&bell));
        assert!((ev[0] + 0.5).abs() < 1e-12);
        assert_eq!(
            partial_transpose_idler(&partial_transpose_idler(&bell)),
            bell
        );
    }
}
