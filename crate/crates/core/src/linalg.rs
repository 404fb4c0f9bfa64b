//! Dense complex linear algebra helpers on top of `nalgebra`.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Kronecker product with the first factor most significant.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMat::zeros(ar * br, ac * bc);
    for j in 0..ac {
        for i in 0..ar {
            let x = a[(i, j)];
            if x == ZERO {
                continue;
            }
            for q in 0..bc {
                for p in 0..br {
                    out[(i * br + p, j * bc + q)] = x * b[(p, q)];
                }
            }
        }
    }
    out
}

pub fn kron_vec(a: &CVec, b: &CVec) -> CVec {
    let mut out = CVec::zeros(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i * b.len() + j] = x * y;
        }
    }
    out
}

/// `‖X − X†‖_F`.
pub fn hermiticity_residual(m: &CMat) -> f64 {
    (m - m.adjoint()).norm()
}

pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()).map(|z| z * 0.5)
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = hermitize(m).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

pub fn min_eigenvalue(m: &CMat) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(0.0)
}

pub fn max_eigenvalue(m: &CMat) -> f64 {
    hermitian_eigenvalues(m).last().copied().unwrap_or(0.0)
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    m.clone().svd(false, false).singular_values.iter().copied().collect()
}

/// Largest singular value.
pub fn op_norm(m: &CMat) -> f64 {
    singular_values(m).into_iter().fold(0.0, f64::max)
}

/// Schatten-1 norm via a full SVD.
pub fn trace_norm(m: &CMat) -> f64 {
    singular_values(m).into_iter().sum()
}

pub fn trace(m: &CMat) -> C64 {
    m.diagonal().iter().sum()
}

/// Orthonormal basis of the column span, visiting columns left to right.
///
/// A column is kept when its component orthogonal to the vectors found so far
/// has norm above `threshold`. Two passes of modified Gram-Schmidt are used.
pub fn column_span(m: &CMat, threshold: f64) -> Vec<CVec> {
    let mut basis: Vec<CVec> = Vec::new();
    for j in 0..m.ncols() {
        let mut v: CVec = m.column(j).into_owned();
        for _ in 0..2 {
            for b in &basis {
                let overlap = b.dotc(&v);
                v -= b * overlap;
            }
        }
        let norm = v.norm();
        if norm > threshold {
            basis.push(v / real(norm));
        }
    }
    basis
}

/// Complex Ginibre matrix with `E|z|² = 1`.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re * s, im * s)
    })
}

/// Haar-random isometry `C^cols → C^rows` (`rows ≥ cols`): Ginibre, thin QR and
/// the phase correction `Q · diag(r_ii / |r_ii|)`.
pub fn haar_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let g = ginibre(rows, cols, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..cols {
        let rjj = r[(j, j)];
        let n = rjj.norm();
        let phase = if n > 0.0 { rjj / real(n) } else { ONE };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    haar_isometry(d, d, rng)
}

/// Maximum absolute entry of `a − b`.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kron_matches_block_layout() {
        let a = CMat::from_row_slice(2, 2, &[ONE, real(2.0), real(3.0), real(4.0)]);
        let b = CMat::identity(2, 2);
        let k = kron(&a, &b);
        assert_eq!(k[(0, 2)], real(2.0));
        assert_eq!(k[(1, 3)], real(2.0));
        assert_eq!(k[(2, 0)], real(3.0));
        assert_eq!(k[(0, 1)], ZERO);
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in 1..6 {
            let u = haar_unitary(d, &mut rng);
            let err = max_abs_diff(&(u.adjoint() * &u), &CMat::identity(d, d));
            assert!(err < 1e-13, "d={d} err={err}");
        }
        let v = haar_isometry(6, 2, &mut rng);
        let err = max_abs_diff(&(v.adjoint() * &v), &CMat::identity(2, 2));
        assert!(err < 1e-13);
    }

    #[test]
    fn norms_of_diagonal_matrix() {
        let m = CMat::from_diagonal(&CVec::from_vec(alloc::vec![real(-3.0), real(1.0)]));
        assert!((trace_norm(&m) - 4.0).abs() < 1e-12);
        assert!((op_norm(&m) - 3.0).abs() < 1e-12);
        assert!((min_eigenvalue(&m) + 3.0).abs() < 1e-12);
        assert!((max_eigenvalue(&m) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn column_span_drops_dependent_columns() {
        let m = CMat::from_row_slice(2, 3, &[ONE, real(2.0), ZERO, ONE, real(2.0), ONE]);
        let span = column_span(&m, 1e-9);
        assert_eq!(span.len(), 2);
    }
}
