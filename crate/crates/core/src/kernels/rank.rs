//! Rank reduction of PSD solutions along directions that keep selected
//! trace constraints fixed.

use crate::error::{Error, Result};
use crate::linalg::{c, herm_eig, trace_prod, CMat, RMat};

use super::sdp::{Sense, TraceConstraint};

/// Eigenvalues below `DEFAULT_RANK_TOL · λ_max` count as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct RankReduction {
    pub s: CMat,
    pub rank_before: usize,
    pub steps: usize,
}

/// Numerical rank with the given relative threshold.
pub fn numerical_rank(s: &CMat, rel: f64) -> usize {
    crate::linalg::numerical_rank(s, rel)
}

/// `(U, r)` with `S ≈ U Uᴴ` keeping the `r` significant eigenpairs.
fn factor(s: &CMat, rel: f64) -> (CMat, usize) {
    let eig = herm_eig(s);
    let top = eig.values.first().copied().unwrap_or(0.0).max(0.0);
    let r = eig.values.iter().filter(|&&v| v > rel * top && v > 0.0).count();
    let mut u = CMat::zeros(s.nrows(), r);
    for j in 0..r {
        u.set_column(j, &(eig.vectors.column(j) * c(eig.values[j].sqrt(), 0.0)));
    }
    (u, r)
}

/// Coordinates of `tr(M Λ)` for Hermitian `Λ` in the basis of diagonal
/// units, symmetric pairs and antisymmetric imaginary pairs.
fn coefficient_row(m: &CMat) -> Vec<f64> {
    let r = m.nrows();
    let mut row = Vec::with_capacity(r * r);
    for i in 0..r {
        row.push(m[(i, i)].re);
    }
    for i in 0..r {
        for j in i + 1..r {
            row.push(2.0 * m[(i, j)].re);
            row.push(2.0 * m[(i, j)].im);
        }
    }
    row
}

fn hermitian_from(coords: &[f64], r: usize) -> CMat {
    let mut l = CMat::zeros(r, r);
    for i in 0..r {
        l[(i, i)] = c(coords[i], 0.0);
    }
    let mut idx = r;
    for i in 0..r {
        for j in i + 1..r {
            let (a, b) = (coords[idx], coords[idx + 1]);
            idx += 2;
            l[(i, j)] = c(a, b);
            l[(j, i)] = c(a, -b);
        }
    }
    l
}

/// A nonzero Hermitian `Λ` with `tr(Uᴴ A_m U Λ) = 0` for all `m`, if any.
fn null_direction(u: &CMat, mats: &[&CMat]) -> Option<CMat> {
    let r = u.ncols();
    let dim = r * r;
    let rows: Vec<Vec<f64>> = mats.iter().map(|a| coefficient_row(&(u.adjoint() * *a * u))).collect();
    let m = RMat::from_fn(rows.len(), dim, |i, j| rows[i][j]);
    let gram = m.transpose() * &m;
    let scale = gram.diagonal().amax().max(1e-300);
    let eig = gram.symmetric_eigen();
    let (k, &lmin) = eig.eigenvalues.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1))?;
    if dim <= rows.len() && lmin > 1e-14 * scale {
        return None;
    }
    let coords: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
    Some(hermitian_from(&coords, r))
}

/// Reduces `S` to rank one while keeping `tr(A S)` fixed for every `A` in
/// `active`.
pub fn rank_reduction(s: &CMat, active: &[CMat]) -> Result<CMat> {
    Ok(rank_reduction_guarded(s, active, &[], DEFAULT_RANK_TOL)?.s)
}

/// Rank reduction that keeps every matrix in `preserve` fixed, plus every
/// constraint in `guards` that is active; inactive guards are kept
/// satisfied by shortening the step to their boundary.
pub fn rank_reduction_guarded(
    s: &CMat,
    preserve: &[CMat],
    guards: &[TraceConstraint],
    rank_tol: f64,
) -> Result<RankReduction> {
    if preserve.is_empty() && guards.is_empty() {
        return Err(Error::InvalidConfig("rank reduction needs at least one constraint".into()));
    }
    let n = s.nrows();
    let mut cur = crate::linalg::hermitize(s);
    let rank_before = factor(&cur, rank_tol).1;
    let mut steps = 0;
    for _ in 0..4 * n + 4 {
        let (u, r) = factor(&cur, rank_tol);
        if r <= 1 {
            return Ok(RankReduction { s: &u * u.adjoint(), rank_before, steps });
        }
        let vals: Vec<f64> = guards.iter().map(|g| trace_prod(&g.a, &cur)).collect();
        let mut mats: Vec<&CMat> = preserve.iter().collect();
        let mut inactive = Vec::new();
        for (g, &v) in guards.iter().zip(&vals) {
            let active = g.sense == Sense::Eq || (v - g.b).abs() <= 1e-9 * (1.0 + g.b.abs());
            if active {
                mats.push(&g.a);
            } else {
                inactive.push((g, v));
            }
        }
        let Some(mut lam) = null_direction(&u, &mats) else {
            return Err(Error::NoNullspace { rank: r, constraints: mats.len() });
        };
        let eig = herm_eig(&lam);
        let (dmax, dmin) = (eig.values[0], *eig.values.last().unwrap());
        let mut delta = if dmax.abs() >= dmin.abs() { dmax } else { dmin };
        if delta < 0.0 {
            lam = -lam;
            delta = -delta;
        }
        let dir = &u * &lam * u.adjoint();
        let mut alpha: f64 = 1.0;
        for (g, v) in &inactive {
            let slope = -trace_prod(&g.a, &dir) / delta;
            let room = g.b - v;
            match g.sense {
                Sense::Le if slope > 0.0 => alpha = alpha.min(room / slope),
                Sense::Ge if slope < 0.0 => alpha = alpha.min(room / slope),
                _ => {}
            }
        }
        let alpha = alpha.max(0.0);
        let step = CMat::identity(r, r) - lam * c(alpha / delta, 0.0);
        cur = crate::linalg::hermitize(&(&u * step * u.adjoint()));
        steps += 1;
    }
    Err(Error::NumericalFailure("rank reduction did not terminate".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cr, outer, CVec};

    #[test]
    fn rank_one_is_unchanged() {
        let v = CVec::from_vec(vec![c(1.0, 1.0), c(0.0, -2.0), cr(0.5)]);
        let s = outer(&v, &v);
        let out = rank_reduction(&s, &[CMat::identity(3, 3)]).unwrap();
        assert!((out - s).camax() < 1e-12);
    }

    #[test]
    fn rank_two_with_trace() {
        let s = CMat::from_diagonal(&CVec::from_vec(vec![cr(0.5), cr(0.5), cr(0.0), cr(0.0)]));
        let out = rank_reduction(&s, &[CMat::identity(4, 4)]).unwrap();
        assert_eq!(numerical_rank(&out, DEFAULT_RANK_TOL), 1);
        assert!((crate::linalg::trace_re(&out) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn three_constraints_preserved() {
        let n = 6;
        let mk = |k: f64| crate::linalg::hermitize(&CMat::from_fn(n, n, |i, j| c((k + i as f64 * j as f64).sin(), (k * i as f64 - j as f64).cos())));
        let a: Vec<CMat> = (0..3).map(|k| mk(k as f64 + 0.5) + CMat::identity(n, n) * cr(3.0)).collect();
        let x = CMat::from_fn(n, 4, |i, j| c((i + 2 * j) as f64 * 0.37, (i as f64 - j as f64).sin()));
        let s = &x * x.adjoint();
        let out = rank_reduction(&s, &a).unwrap();
        assert_eq!(numerical_rank(&out, DEFAULT_RANK_TOL), 1);
        for m in &a {
            let before = trace_prod(m, &s);
            assert!((trace_prod(m, &out) - before).abs() < 1e-8 * before.abs() + 1e-10);
        }
        assert!(crate::linalg::lambda_min(&out) > -1e-10);
    }

    #[test]
    fn no_nullspace_for_full_constraint_set() {
        let s = CMat::identity(2, 2);
        let mats = vec![
            CMat::from_diagonal(&CVec::from_vec(vec![cr(1.0), cr(0.0)])),
            CMat::from_diagonal(&CVec::from_vec(vec![cr(0.0), cr(1.0)])),
            CMat::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(1.0), cr(0.0)]),
            CMat::from_row_slice(2, 2, &[cr(0.0), c(0.0, -1.0), c(0.0, 1.0), cr(0.0)]),
        ];
        assert!(matches!(rank_reduction(&s, &mats), Err(Error::NoNullspace { .. })));
    }

    #[test]
    fn inactive_guard_is_respected() {
        let s = CMat::from_diagonal(&CVec::from_vec(vec![cr(0.5), cr(0.5)]));
        let e1 = CMat::from_diagonal(&CVec::from_vec(vec![cr(1.0), cr(0.0)]));
        let guard = TraceConstraint::new(e1.clone(), Sense::Le, 0.6);
        let out = rank_reduction_guarded(&s, &[CMat::identity(2, 2)], &[guard], DEFAULT_RANK_TOL).unwrap();
        assert!(trace_prod(&e1, &out.s) <= 0.6 + 1e-12);
        assert_eq!(numerical_rank(&out.s, DEFAULT_RANK_TOL), 1);
    }
}
