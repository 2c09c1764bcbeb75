//! Dense complex linear-algebra helpers shared by every module.
//!
//! Vectors obtained from matrices are always column-major (`vec` stacks
//! columns), which is also nalgebra's storage order.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;
pub type RMat = DMatrix<f64>;

pub const J: C64 = Complex { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(r: usize, c: usize) -> CMat {
    CMat::zeros(r, c)
}

/// `a ⊗ b`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Outer product `a bᴴ`.
pub fn outer(a: &CVec, b: &CVec) -> CMat {
    a * b.adjoint()
}

/// Column-major vectorization.
pub fn vec_of(m: &CMat) -> CVec {
    CVec::from_column_slice(m.as_slice())
}

pub fn unvec(v: &CVec, rows: usize, cols: usize) -> Result<CMat> {
    if v.len() != rows * cols {
        return Err(Error::DimensionMismatch(format!(
            "cannot reshape length {} into {rows}x{cols}",
            v.len()
        )));
    }
    Ok(CMat::from_column_slice(rows, cols, v.as_slice()))
}

/// `(m + mᴴ)/2`.
pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Real part of `tr(a b)`, computed without forming the product.
pub fn trace_prod(a: &CMat, b: &CMat) -> f64 {
    debug_assert_eq!(a.ncols(), b.nrows());
    debug_assert_eq!(a.nrows(), b.ncols());
    let mut acc = 0.0;
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += (a[(i, k)] * b[(k, i)]).re;
        }
    }
    acc
}

/// `xᴴ a x` (real part).
pub fn quad_form(a: &CMat, x: &CVec) -> f64 {
    x.dotc(&(a * x)).re
}

pub fn trace_re(m: &CMat) -> f64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)].re).sum()
}

/// Largest deviation from Hermitian symmetry.
pub fn hermitian_defect(m: &CMat) -> f64 {
    (m - m.adjoint()).camax()
}

/// Hermitian eigendecomposition with eigenvalues sorted in descending order.
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

pub fn herm_eig(m: &CMat) -> HermEig {
    let n = m.nrows();
    let eig = hermitize(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    HermEig { values, vectors }
}

pub fn herm_eigenvalues(m: &CMat) -> Vec<f64> {
    let mut v: Vec<f64> = hermitize(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

pub fn lambda_min(m: &CMat) -> f64 {
    herm_eigenvalues(m).last().copied().unwrap_or(0.0)
}

pub fn lambda_max(m: &CMat) -> f64 {
    herm_eigenvalues(m).first().copied().unwrap_or(0.0)
}

/// PSD square root; eigenvalues below zero are clipped.
pub fn psd_sqrt(m: &CMat) -> CMat {
    let eig = herm_eig(m);
    let n = m.nrows();
    let mut scaled = eig.vectors.clone();
    for j in 0..n {
        let s = eig.values[j].max(0.0).sqrt();
        scaled.column_mut(j).scale_mut(s);
    }
    &scaled * eig.vectors.adjoint()
}

/// Inverse of a Hermitian positive-definite matrix via Cholesky.
pub fn inv_pd(m: &CMat) -> Result<CMat> {
    let chol = hermitize(m)
        .cholesky()
        .ok_or_else(|| Error::NumericalFailure("matrix is not positive definite".into()))?;
    Ok(hermitize(&chol.inverse()))
}

/// `log det` of a Hermitian positive-definite matrix.
pub fn logdet_pd(m: &CMat) -> Result<f64> {
    let chol = hermitize(m)
        .cholesky()
        .ok_or_else(|| Error::NumericalFailure("matrix is not positive definite".into()))?;
    let l = chol.l_dirty();
    Ok((0..m.nrows()).map(|i| 2.0 * l[(i, i)].re.ln()).sum())
}

/// Number of eigenvalues above `rel * λ_max`.
pub fn numerical_rank(m: &CMat, rel: f64) -> usize {
    let vals = herm_eigenvalues(m);
    let top = vals.first().copied().unwrap_or(0.0);
    if top <= 0.0 {
        return 0;
    }
    vals.iter().filter(|&&v| v > rel * top).count()
}

/// Scales `w` to unit norm and rotates it so its largest-magnitude entry is
/// real and nonnegative. Zero vectors are returned unchanged.
pub fn normalize_phase(w: &CVec) -> CVec {
    let norm = w.norm();
    if norm == 0.0 {
        return w.clone();
    }
    let (idx, _) = w
        .iter()
        .enumerate()
        .fold((0, -1.0), |(bi, bm), (i, z)| if z.norm() > bm { (i, z.norm()) } else { (bi, bm) });
    let phase = w[idx] / w[idx].norm();
    w.map(|z| z * phase.conj() / norm)
}

/// Rotates `s` so its largest-magnitude entry is real and nonnegative,
/// keeping its norm.
pub fn normalize_phase_keep_norm(s: &CVec) -> CVec {
    let n = s.norm();
    normalize_phase(s).scale(n)
}

/// Real symmetric embedding `[Re −Im; Im Re]` of a complex matrix.
pub fn realify(a: &CMat) -> RMat {
    let (r, cl) = a.shape();
    let mut out = RMat::zeros(2 * r, 2 * cl);
    for i in 0..r {
        for j in 0..cl {
            let z = a[(i, j)];
            out[(i, j)] = z.re;
            out[(i, j + cl)] = -z.im;
            out[(i + r, j)] = z.im;
            out[(i + r, j + cl)] = z.re;
        }
    }
    out
}

/// Inverse of [`realify`] for a (possibly slightly unstructured) symmetric
/// embedding, averaging the redundant blocks.
pub fn unrealify(x: &RMat) -> CMat {
    let n = x.nrows() / 2;
    CMat::from_fn(n, n, |i, j| {
        c(
            0.5 * (x[(i, j)] + x[(i + n, j + n)]),
            0.5 * (x[(i + n, j)] - x[(i, j + n)]),
        )
    })
}

/// Principal eigenpair of a Hermitian matrix.
pub fn principal(m: &CMat) -> (f64, CVec) {
    let eig = herm_eig(m);
    (eig.values[0], eig.vectors.column(0).into_owned())
}

/// Diagonal block `[r0..r0+n, c0..c0+n]` copied out.
pub fn block(m: &CMat, r0: usize, c0: usize, nr: usize, nc: usize) -> CMat {
    m.view((r0, c0), (nr, nc)).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize) -> CMat {
        CMat::from_fn(n, n, |i, j| c((i as f64 + 0.3 * j as f64).sin(), (2.0 * i as f64 - j as f64).cos()))
    }

    #[test]
    fn vec_is_column_major() {
        let m = CMat::from_row_slice(2, 2, &[cr(1.0), cr(2.0), cr(3.0), cr(4.0)]);
        let v = vec_of(&m);
        assert_eq!(v[1], cr(3.0));
        assert_eq!(unvec(&v, 2, 2).unwrap(), m);
    }

    #[test]
    fn realify_preserves_trace_pairing() {
        let a = hermitize(&sample(4));
        let b = {
            let x = sample(4);
            &x * x.adjoint()
        };
        let lhs = (realify(&a) * realify(&b)).trace();
        assert!((lhs - 2.0 * trace_prod(&a, &b)).abs() < 1e-10);
        assert!((unrealify(&realify(&b)) - &b).camax() < 1e-14);
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let x = sample(5);
        let p = &x * x.adjoint();
        let r = psd_sqrt(&p);
        assert!((&r * &r - &p).camax() < 1e-10);
    }

    #[test]
    fn logdet_matches_eigenvalues() {
        let x = sample(4);
        let p = &x * x.adjoint() + identity(4);
        let direct: f64 = herm_eigenvalues(&p).iter().map(|v| v.ln()).sum();
        assert!((logdet_pd(&p).unwrap() - direct).abs() < 1e-10);
    }

    #[test]
    fn phase_normalization() {
        let w = CVec::from_vec(vec![c(0.0, 1.0), c(0.0, -3.0)]);
        let n = normalize_phase(&w);
        assert!((n.norm() - 1.0).abs() < 1e-15);
        assert!(n[1].im.abs() < 1e-15 && n[1].re > 0.0);
    }
}
