//! Complex dense linear algebra helpers on top of `nalgebra`.

use alloc::vec::Vec;

pub use nalgebra::Complex;
use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen, SVD};

use crate::error::{Error, Result};

pub type Complex64 = Complex<f64>;
pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

const LN_2: f64 = core::f64::consts::LN_2;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex::new(re, im)
}

#[inline]
pub fn real(re: f64) -> Complex64 {
    Complex::new(re, 0.0)
}

/// `I + scale * m` for a square `m`.
pub fn identity_plus(m: &CMatrix, scale: f64) -> CMatrix {
    let n = m.nrows();
    let mut out = m.map(|z| z * scale);
    for i in 0..n {
        out[(i, i)] += real(1.0);
    }
    out
}

/// Hermitian part `(m + mᴴ)/2`; removes rounding asymmetry before a
/// factorisation that assumes Hermitian input.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).map(|z| z * 0.5)
}

/// Cholesky factorisation that also rejects indefinite complex input.
///
/// `nalgebra` takes the complex square root of each pivot, so a negative
/// pivot yields an imaginary diagonal instead of a failure.
pub fn checked_cholesky(m: &CMatrix) -> Option<Cholesky<Complex64, nalgebra::Dyn>> {
    let chol = Cholesky::new(hermitian_part(m))?;
    let l = chol.l_dirty();
    let ok = (0..l.nrows()).all(|i| {
        let d = l[(i, i)];
        d.re > 0.0 && d.re.is_finite() && d.im.abs() <= 1e-12 * d.re
    });
    ok.then_some(chol)
}

/// `log2 det(m)` for a Hermitian positive definite matrix, via Cholesky.
pub fn log2_det_hpd(m: &CMatrix) -> Result<f64> {
    if m.nrows() == 0 {
        return Ok(0.0);
    }
    let chol = checked_cholesky(m)
        .ok_or_else(|| Error::input("matrix is not Hermitian positive definite"))?;
    let l = chol.l_dirty();
    let mut acc = 0.0;
    for i in 0..l.nrows() {
        acc += libm::log(l[(i, i)].re);
    }
    Ok(2.0 * acc / LN_2)
}

/// `log2 |det(m)|` for a general square matrix, via LU.
pub fn log2_abs_det(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let lu = m.clone().lu();
    let u = lu.u();
    let mut acc = 0.0;
    for i in 0..u.nrows() {
        acc += libm::log(u[(i, i)].norm());
    }
    acc / LN_2
}

/// Inverse of a Hermitian positive definite matrix, via Cholesky.
pub fn hpd_inverse(m: &CMatrix) -> Option<CMatrix> {
    checked_cholesky(m).map(|c| c.inverse())
}

/// Lower Cholesky factor of a Hermitian positive definite matrix.
pub fn cholesky_lower(m: &CMatrix) -> Option<CMatrix> {
    checked_cholesky(m).map(|c| c.unpack())
}

/// Singular value decomposition with singular values sorted in descending
/// order.
///
/// `left` is `rows × rows` (a full unitary basis of the column space and its
/// complement), `values` has `min(rows, cols)` entries.
pub struct SortedSvd {
    pub left: CMatrix,
    pub values: Vec<f64>,
}

pub fn svd_full_left(h: &CMatrix) -> SortedSvd {
    let (n, k) = h.shape();
    let x = n.min(k);
    if n == 0 {
        return SortedSvd {
            left: CMatrix::zeros(0, 0),
            values: Vec::new(),
        };
    }
    // Zero-padding to at least square makes the thin left factor a full basis.
    let padded = if k < n {
        let mut p = CMatrix::zeros(n, n);
        p.view_mut((0, 0), (n, k)).copy_from(h);
        p
    } else {
        h.clone()
    };
    let svd = SVD::new(padded, true, false);
    let u = svd.u.expect("left singular vectors requested");
    let sv = svd.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]).then(a.cmp(&b)));
    let mut left = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().take(n).enumerate() {
        left.set_column(dst, &u.column(src));
    }
    let values = order.iter().take(x).map(|&i| sv[i]).collect();
    SortedSvd { left, values }
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues descending.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut vecs = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    (order.iter().map(|&i| eig.eigenvalues[i]).collect(), vecs)
}

/// Relative Frobenius distance `‖a − b‖ / max(‖b‖, tiny)`.
pub fn rel_frobenius(a: &CMatrix, b: &CMatrix) -> f64 {
    let denom = b.norm().max(f64::MIN_POSITIVE);
    (a - b).norm() / denom
}

/// Block-diagonal assembly of square blocks.
pub fn block_diag(blocks: &[CMatrix]) -> CMatrix {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        let d = b.nrows();
        out.view_mut((off, off), (d, d)).copy_from(b);
        off += d;
    }
    out
}

/// Vertical stacking of blocks with a shared column count.
pub fn vstack(blocks: &[CMatrix]) -> Result<CMatrix> {
    let cols = blocks.first().map_or(0, |b| b.ncols());
    if blocks.iter().any(|b| b.ncols() != cols) {
        return Err(Error::dim("stacked blocks must share a column count"));
    }
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let mut off = 0;
    for b in blocks {
        out.view_mut((off, 0), (b.nrows(), cols)).copy_from(b);
        off += b.nrows();
    }
    Ok(out)
}
