//! Primal-dual interior-point solver for small dense SDPs.
//!
//! The core works on real block-diagonal problems in standard form
//!
//! ```text
//! min ⟨C, X⟩  s.t.  ⟨A_i, X⟩ = b_i,  X = diag(X_1, …, X_p) ⪰ 0
//! ```
//!
//! with Nesterov–Todd scaling and Mehrotra predictor-corrector steps.
//! [`SdpProblem`] is the complex Hermitian front end used by the design
//! code; it is realified and lowered onto the block form, with inequality
//! slacks carried as 1×1 blocks.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_defect, realify, unrealify, CMat, RMat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct TraceConstraint {
    pub a: CMat,
    pub sense: Sense,
    pub b: f64,
}

impl TraceConstraint {
    pub fn new(a: CMat, sense: Sense, b: f64) -> Self {
        Self { a, sense, b }
    }
}

/// Optimize `tr(C S)` over Hermitian `S ⪰ 0` subject to trace constraints.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub n: usize,
    pub objective: CMat,
    pub maximize: bool,
    pub constraints: Vec<TraceConstraint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KktResiduals {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
}

impl KktResiduals {
    pub fn max(&self) -> f64 {
        self.primal.max(self.dual).max(self.gap)
    }
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub s: CMat,
    /// One multiplier per constraint, in the sign convention of the
    /// standard-form dual (`C − Σ yᵢAᵢ ⪰ 0` for minimization).
    pub y: Vec<f64>,
    pub obj: f64,
    pub kkt_residuals: KktResiduals,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct SdpSettings {
    /// Target for all three relative KKT residuals.
    pub tol: f64,
    /// Residual level still accepted when progress stalls.
    pub accept_tol: f64,
    pub max_iter: usize,
}

impl Default for SdpSettings {
    fn default() -> Self {
        Self { tol: 1e-10, accept_tol: 1e-7, max_iter: 100 }
    }
}

/// Real block-diagonal SDP in standard form. `a[i][k]` is constraint `i`
/// restricted to block `k`; `None` means zero.
#[derive(Debug, Clone)]
pub struct BlockSdp {
    pub sizes: Vec<usize>,
    pub c: Vec<RMat>,
    pub a: Vec<Vec<Option<RMat>>>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct BlockSolution {
    pub x: Vec<RMat>,
    pub z: Vec<RMat>,
    pub y: Vec<f64>,
    pub primal_obj: f64,
    pub dual_obj: f64,
    pub residuals: KktResiduals,
    pub iterations: usize,
}

fn ip(a: &RMat, b: &RMat) -> f64 {
    a.dot(b)
}

fn sym(m: &RMat) -> RMat {
    (m + m.transpose()) * 0.5
}

impl BlockSdp {
    pub fn new(sizes: Vec<usize>) -> Self {
        let c = sizes.iter().map(|&n| RMat::zeros(n, n)).collect();
        Self { sizes, c, a: Vec::new(), b: Vec::new() }
    }

    pub fn m(&self) -> usize {
        self.b.len()
    }

    pub fn add_constraint(&mut self, blocks: Vec<(usize, RMat)>, b: f64) {
        let mut row = vec![None; self.sizes.len()];
        for (k, m) in blocks {
            row[k] = Some(m);
        }
        self.a.push(row);
        self.b.push(b);
    }

    fn apply_a(&self, x: &[RMat]) -> DVector<f64> {
        DVector::from_iterator(
            self.m(),
            self.a.iter().map(|row| {
                row.iter().zip(x).map(|(a, xk)| a.as_ref().map_or(0.0, |a| ip(a, xk))).sum::<f64>()
            }),
        )
    }

    fn apply_at(&self, y: &DVector<f64>) -> Vec<RMat> {
        let mut out: Vec<RMat> = self.sizes.iter().map(|&n| RMat::zeros(n, n)).collect();
        for (row, &yi) in self.a.iter().zip(y.iter()) {
            for (o, a) in out.iter_mut().zip(row) {
                if let Some(a) = a {
                    *o += a * yi;
                }
            }
        }
        out
    }

    fn c_dot(&self, x: &[RMat]) -> f64 {
        self.c.iter().zip(x).map(|(c, x)| ip(c, x)).sum()
    }

    fn validate(&self) -> Result<()> {
        if self.c.len() != self.sizes.len() {
            return Err(Error::DimensionMismatch("objective block count".into()));
        }
        for (k, (&n, c)) in self.sizes.iter().zip(&self.c).enumerate() {
            if c.shape() != (n, n) {
                return Err(Error::DimensionMismatch(format!("objective block {k}")));
            }
        }
        for (i, row) in self.a.iter().enumerate() {
            if row.len() != self.sizes.len() {
                return Err(Error::DimensionMismatch(format!("constraint {i} block count")));
            }
            for (k, a) in row.iter().enumerate() {
                if let Some(a) = a {
                    if a.shape() != (self.sizes[k], self.sizes[k]) {
                        return Err(Error::DimensionMismatch(format!("constraint {i} block {k}")));
                    }
                }
            }
        }
        if self.m() == 0 {
            return Err(Error::InvalidConfig("SDP without constraints".into()));
        }
        Ok(())
    }

    /// KKT residuals of a candidate triple against this problem's data.
    pub fn residuals(&self, x: &[RMat], y: &[f64], z: &[RMat]) -> KktResiduals {
        let yv = DVector::from_column_slice(y);
        let b = DVector::from_column_slice(&self.b);
        let rp = (&b - self.apply_a(x)).norm();
        let aty = self.apply_at(&yv);
        let mut rd2 = 0.0;
        let mut cnorm2 = 0.0;
        for k in 0..self.sizes.len() {
            rd2 += (&self.c[k] - &aty[k] - &z[k]).norm_squared();
            cnorm2 += self.c[k].norm_squared();
        }
        let pobj = self.c_dot(x);
        let dobj = b.dot(&yv);
        KktResiduals {
            primal: rp / (1.0 + b.norm()),
            dual: rd2.sqrt() / (1.0 + cnorm2.sqrt()),
            gap: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
        }
    }
}

/// Nesterov–Todd scaling of one block: `W = G Gᵀ` with `Gᵀ Z G = G⁻¹ X G⁻ᵀ = diag(λ)`.
struct NtBlock {
    g: RMat,
    w: RMat,
    lambda: Vec<f64>,
}

fn chol_lower(m: &RMat) -> Option<RMat> {
    sym(m).cholesky().map(|c| c.unpack())
}

fn nt_block(x: &RMat, z: &RMat) -> Option<NtBlock> {
    let l = chol_lower(x)?;
    let r = chol_lower(z)?;
    let svd = (r.transpose() * &l).svd(true, true);
    let v = svd.v_t?.transpose();
    let d = svd.singular_values;
    if d.iter().any(|&s| !(s > 0.0)) {
        return None;
    }
    let mut g = &l * v;
    for (j, &s) in d.iter().enumerate() {
        g.column_mut(j).scale_mut(1.0 / s.sqrt());
    }
    let w = &g * g.transpose();
    Some(NtBlock { g, w, lambda: d.iter().copied().collect() })
}

/// Largest step `α ≤ 1/γ` such that `diag(λ) + α D ⪰ 0`, using the scaled
/// direction `D`.
fn max_step(lambda: &[f64], d: &RMat) -> f64 {
    let n = lambda.len();
    let s = RMat::from_fn(n, n, |i, j| d[(i, j)] / (lambda[i] * lambda[j]).sqrt());
    let lmin = sym(&s).symmetric_eigenvalues().min();
    if lmin >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lmin
    }
}

/// Solves `Λ∘H = R`, i.e. `H_ij = 2 R_ij / (λ_i + λ_j)`.
fn lyap(lambda: &[f64], r: &RMat) -> RMat {
    let n = lambda.len();
    RMat::from_fn(n, n, |i, j| 2.0 * r[(i, j)] / (lambda[i] + lambda[j]))
}

struct Direction {
    dx: Vec<RMat>,
    dy: DVector<f64>,
    dz: Vec<RMat>,
    dxs: Vec<RMat>,
    dzs: Vec<RMat>,
}

fn solve_schur(m: &DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    if let Some(ch) = m.clone().cholesky() {
        return Some(ch.solve(rhs));
    }
    let scale = m.diagonal().amax().max(1e-300);
    let reg = m + DMatrix::identity(m.nrows(), m.nrows()) * (1e-14 * scale);
    if let Some(ch) = reg.clone().cholesky() {
        return Some(ch.solve(rhs));
    }
    reg.lu().solve(rhs)
}

fn direction(
    p: &BlockSdp,
    nt: &[NtBlock],
    schur: &DMatrix<f64>,
    rp: &DVector<f64>,
    rd: &[RMat],
    rc: &[RMat],
) -> Option<Direction> {
    let h: Vec<RMat> = nt.iter().zip(rc).map(|(b, r)| lyap(&b.lambda, r)).collect();
    let ghg: Vec<RMat> = nt.iter().zip(&h).map(|(b, h)| &b.g * h * b.g.transpose()).collect();
    let wrw: Vec<RMat> = nt.iter().zip(rd).map(|(b, r)| &b.w * r * &b.w).collect();
    let rhs = rp - p.apply_a(&ghg) + p.apply_a(&wrw);
    let dy = solve_schur(schur, &rhs)?;
    let aty = p.apply_at(&dy);
    let dz: Vec<RMat> = rd.iter().zip(&aty).map(|(r, a)| sym(&(r - a))).collect();
    let dzs: Vec<RMat> = nt.iter().zip(&dz).map(|(b, dz)| sym(&(b.g.transpose() * dz * &b.g))).collect();
    let dxs: Vec<RMat> = h.iter().zip(&dzs).map(|(h, dz)| sym(&(h - dz))).collect();
    let dx: Vec<RMat> = nt.iter().zip(&dxs).map(|(b, d)| sym(&(&b.g * d * b.g.transpose()))).collect();
    if dy.iter().any(|v| !v.is_finite()) {
        return None;
    }
    Some(Direction { dx, dy, dz, dxs, dzs })
}

fn step_lengths(nt: &[NtBlock], dir: &Direction) -> (f64, f64) {
    let mut ap = f64::INFINITY;
    let mut ad = f64::INFINITY;
    for (b, (dx, dz)) in nt.iter().zip(dir.dxs.iter().zip(&dir.dzs)) {
        ap = ap.min(max_step(&b.lambda, dx));
        ad = ad.min(max_step(&b.lambda, dz));
    }
    (ap, ad)
}

/// Solves a real block SDP.
pub fn solve_block_sdp(orig: &BlockSdp, settings: &SdpSettings) -> Result<BlockSolution> {
    orig.validate()?;
    let nblk = orig.sizes.len();
    let n_total: usize = orig.sizes.iter().sum();

    // Row and objective normalization.
    let mut p = orig.clone();
    let mut row_scale = vec![1.0; p.m()];
    for (i, row) in p.a.iter_mut().enumerate() {
        let nrm: f64 = row.iter().flatten().map(|a| a.norm_squared()).sum::<f64>().sqrt();
        if nrm == 0.0 {
            return Err(Error::InvalidConfig(format!("constraint {i} is identically zero")));
        }
        row_scale[i] = nrm;
        for a in row.iter_mut().flatten() {
            *a /= nrm;
        }
        p.b[i] /= nrm;
    }
    let cnorm: f64 = p.c.iter().map(|c| c.norm_squared()).sum::<f64>().sqrt();
    let c_scale = cnorm.max(1.0);
    for c in p.c.iter_mut() {
        *c /= c_scale;
    }
    let b = DVector::from_column_slice(&p.b);
    let bnorm = b.norm();

    // Starting point.
    let nf = n_total as f64;
    let xi = (10.0f64).max(nf.sqrt()).max(nf * p.b.iter().map(|bi| 1.0 + bi.abs()).fold(0.0, f64::max) / 2.0);
    let zeta = (10.0f64).max(nf.sqrt()).max(1.0 + c_scale.recip() * cnorm);
    let mut x: Vec<RMat> = p.sizes.iter().map(|&n| RMat::identity(n, n) * xi).collect();
    let mut z: Vec<RMat> = p.sizes.iter().map(|&n| RMat::identity(n, n) * zeta).collect();
    let mut y = DVector::zeros(p.m());

    let mut best: Option<(f64, Vec<RMat>, DVector<f64>, Vec<RMat>)> = None;
    let mut stalls = 0;
    let mut iterations = 0;

    for it in 0..settings.max_iter {
        iterations = it;
        let res = p.residuals(&x, y.as_slice(), &z);
        let worst = res.max();
        if best.as_ref().map_or(true, |(w, ..)| worst < *w) {
            best = Some((worst, x.clone(), y.clone(), z.clone()));
        }
        if worst < settings.tol {
            break;
        }

        // Infeasibility certificates (scaled data).
        let by = b.dot(&y);
        let aty = p.apply_at(&y);
        let ray_d: f64 = aty.iter().zip(&z).map(|(a, z)| (a + z).norm_squared()).sum::<f64>().sqrt();
        if by > 0.0 && by > 1e8 * ray_d.max(1e-300) && by > 1e6 {
            return Err(Error::Infeasible("primal infeasibility certificate".into()));
        }
        let cx = -p.c_dot(&x);
        let ax = p.apply_a(&x).norm();
        if cx > 1e8 * ax.max(1e-300) && cx > 1e6 {
            return Err(Error::Infeasible("dual infeasibility certificate (unbounded)".into()));
        }

        let nt: Vec<NtBlock> = match x.iter().zip(&z).map(|(x, z)| nt_block(x, z)).collect::<Option<Vec<_>>>() {
            Some(v) => v,
            None => break,
        };
        let mu = x.iter().zip(&z).map(|(x, z)| ip(x, z)).sum::<f64>() / nf;

        let m = p.m();
        let wa: Vec<Vec<Option<RMat>>> = p
            .a
            .iter()
            .map(|row| row.iter().zip(&nt).map(|(a, b)| a.as_ref().map(|a| &b.w * a * &b.w)).collect())
            .collect();
        let mut schur = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..=i {
                let mut acc = 0.0;
                for k in 0..nblk {
                    if let (Some(ai), Some(waj)) = (&p.a[i][k], &wa[j][k]) {
                        acc += ip(ai, waj);
                    }
                }
                schur[(i, j)] = acc;
                schur[(j, i)] = acc;
            }
        }

        let rp = &b - p.apply_a(&x);
        let aty = p.apply_at(&y);
        let rd: Vec<RMat> = (0..nblk).map(|k| sym(&(&p.c[k] - &aty[k] - &z[k]))).collect();

        // Predictor.
        let rc_aff: Vec<RMat> = nt
            .iter()
            .map(|blk| RMat::from_diagonal(&DVector::from_iterator(blk.lambda.len(), blk.lambda.iter().map(|l| -l * l))))
            .collect();
        let Some(aff) = direction(&p, &nt, &schur, &rp, &rd, &rc_aff) else { break };
        let (ap, ad) = step_lengths(&nt, &aff);
        let (ap, ad) = (ap.min(1.0), ad.min(1.0));
        let mut mu_aff = 0.0;
        for k in 0..nblk {
            let xa = &x[k] + &aff.dx[k] * ap;
            let za = &z[k] + &aff.dz[k] * ad;
            mu_aff += ip(&xa, &za);
        }
        mu_aff /= nf;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // Corrector.
        let rc: Vec<RMat> = nt
            .iter()
            .zip(aff.dxs.iter().zip(&aff.dzs))
            .map(|(blk, (dx, dz))| {
                let n = blk.lambda.len();
                let mut r = RMat::identity(n, n) * (sigma * mu);
                for i in 0..n {
                    r[(i, i)] -= blk.lambda[i] * blk.lambda[i];
                }
                r - sym(&(dx * dz))
            })
            .collect();
        let Some(dir) = direction(&p, &nt, &schur, &rp, &rd, &rc) else { break };
        let (ap, ad) = step_lengths(&nt, &dir);
        let gamma = 0.98;
        let ap = (gamma * ap).min(1.0);
        let ad = (gamma * ad).min(1.0);
        if ap < 1e-10 && ad < 1e-10 {
            stalls += 1;
            if stalls >= 3 {
                break;
            }
        } else {
            stalls = 0;
        }
        for k in 0..nblk {
            x[k] = sym(&(&x[k] + &dir.dx[k] * ap));
            z[k] = sym(&(&z[k] + &dir.dz[k] * ad));
        }
        y += &dir.dy * ad;
        iterations = it + 1;
    }

    let res_now = p.residuals(&x, y.as_slice(), &z);
    let (x, y, z) = match best {
        Some((w, bx, by, bz)) if w < res_now.max() => (bx, by, bz),
        _ => (x, y, z),
    };

    // Undo scaling: y_orig = y / row_scale * c_scale, Z_orig = Z * c_scale.
    let y_orig: Vec<f64> = y.iter().zip(&row_scale).map(|(yi, s)| yi / s * c_scale).collect();
    let z_orig: Vec<RMat> = z.iter().map(|z| z * c_scale).collect();
    let residuals = orig.residuals(&x, &y_orig, &z_orig);
    let pobj = orig.c_dot(&x);
    let dobj: f64 = orig.b.iter().zip(&y_orig).map(|(b, y)| b * y).sum();
    let _ = bnorm;
    if residuals.max() > settings.accept_tol {
        return Err(Error::NumericalFailure(format!(
            "IPM stopped after {iterations} iterations with residuals {residuals:?}"
        )));
    }
    Ok(BlockSolution { x, z: z_orig, y: y_orig, primal_obj: pobj, dual_obj: dobj, residuals, iterations })
}

/// Realified Hermitian matrix scaled so that `⟨half_realify(A), X̂⟩ = tr(A S)`.
pub(crate) fn half_realify(a: &CMat) -> RMat {
    realify(a) * 0.5
}

/// Hermitian matrix recovered from the realified block.
pub(crate) fn extract_hermitian(x: &RMat) -> CMat {
    unrealify(x)
}

fn check_hermitian(what: &str, a: &CMat, n: usize) -> Result<()> {
    if a.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!("{what} is {}x{}, expected {n}x{n}", a.nrows(), a.ncols())));
    }
    let scale = a.camax().max(1.0);
    if hermitian_defect(a) > 1e-10 * scale {
        return Err(Error::InvalidConfig(format!("{what} is not Hermitian")));
    }
    Ok(())
}

impl SdpProblem {
    pub fn validate(&self) -> Result<()> {
        check_hermitian("objective", &self.objective, self.n)?;
        for (i, c) in self.constraints.iter().enumerate() {
            check_hermitian(&format!("constraint {i}"), &c.a, self.n)?;
            if !c.b.is_finite() {
                return Err(Error::InvalidConfig(format!("constraint {i} has non-finite bound")));
            }
        }
        Ok(())
    }

    /// Lowers to the real block form. Block 0 is the realified variable;
    /// every inequality gets its own 1×1 slack block.
    pub fn to_block(&self) -> BlockSdp {
        let n2 = 2 * self.n;
        let n_ineq = self.constraints.iter().filter(|c| c.sense != Sense::Eq).count();
        let mut sizes = vec![n2];
        sizes.extend(std::iter::repeat(1).take(n_ineq));
        let mut p = BlockSdp::new(sizes);
        let sign = if self.maximize { -1.0 } else { 1.0 };
        p.c[0] = half_realify(&self.objective) * sign;
        let mut slack = 1;
        for c in &self.constraints {
            let mut blocks = vec![(0, half_realify(&c.a))];
            match c.sense {
                Sense::Eq => {}
                Sense::Le => {
                    blocks.push((slack, RMat::from_element(1, 1, 1.0)));
                    slack += 1;
                }
                Sense::Ge => {
                    blocks.push((slack, RMat::from_element(1, 1, -1.0)));
                    slack += 1;
                }
            }
            p.add_constraint(blocks, c.b);
        }
        p
    }

    /// Objective value `tr(C S)` of a candidate.
    pub fn value(&self, s: &CMat) -> f64 {
        crate::linalg::trace_prod(&self.objective, s)
    }
}

/// Solves a complex Hermitian SDP.
pub fn solve_sdp(p: &SdpProblem, settings: &SdpSettings) -> Result<SdpSolution> {
    p.validate()?;
    let block = p.to_block();
    let sol = solve_block_sdp(&block, settings)?;
    let s = crate::linalg::hermitize(&extract_hermitian(&sol.x[0]));
    Ok(SdpSolution {
        obj: p.value(&s),
        s,
        y: sol.y,
        kkt_residuals: sol.residuals,
        iterations: sol.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, cr, herm_eig, lambda_min, outer, CVec};

    fn herm(n: usize, seed: f64) -> CMat {
        let m = CMat::from_fn(n, n, |i, j| c((seed + i as f64 * 1.3 + j as f64 * 0.7).sin(), (seed * 2.0 + i as f64 - 0.4 * j as f64).cos()));
        crate::linalg::hermitize(&m)
    }

    #[test]
    fn max_eigenvalue_instance() {
        let cm = herm(5, 0.3);
        let p = SdpProblem {
            n: 5,
            objective: cm.clone(),
            maximize: true,
            constraints: vec![TraceConstraint::new(CMat::identity(5, 5), Sense::Le, 1.0)],
        };
        let sol = solve_sdp(&p, &SdpSettings::default()).unwrap();
        let eig = herm_eig(&cm);
        assert!((sol.obj - eig.values[0].max(0.0)).abs() < 1e-8, "{} vs {}", sol.obj, eig.values[0]);
        let u = eig.vectors.column(0).into_owned();
        assert!((&sol.s - outer(&u, &u)).camax() < 1e-4);
        assert!(sol.kkt_residuals.max() < 1e-7);
    }

    #[test]
    fn negative_definite_objective_gives_zero() {
        let p = SdpProblem {
            n: 3,
            objective: CMat::identity(3, 3) * cr(-1.0),
            maximize: true,
            constraints: vec![TraceConstraint::new(CMat::identity(3, 3), Sense::Le, 1.0)],
        };
        let sol = solve_sdp(&p, &SdpSettings::default()).unwrap();
        assert!(sol.obj.abs() < 1e-8);
    }

    #[test]
    fn min_trace_rank_one() {
        let q = CVec::from_vec(vec![c(1.0, 0.5), c(-0.3, 2.0), c(0.0, -1.0), cr(0.7)]);
        let qn2 = q.norm_squared();
        let p = SdpProblem {
            n: 4,
            objective: CMat::identity(4, 4),
            maximize: false,
            constraints: vec![TraceConstraint::new(outer(&q, &q), Sense::Ge, 1.0)],
        };
        let sol = solve_sdp(&p, &SdpSettings::default()).unwrap();
        assert!((sol.obj - 1.0 / qn2).abs() < 1e-8);
        let expect = outer(&q, &q) * cr(1.0 / (qn2 * qn2));
        assert!((&sol.s - expect).camax() < 1e-7);
        assert!(lambda_min(&sol.s) > -1e-9);
    }

    #[test]
    fn infeasible_is_reported() {
        let p = SdpProblem {
            n: 2,
            objective: CMat::identity(2, 2),
            maximize: false,
            constraints: vec![
                TraceConstraint::new(CMat::identity(2, 2), Sense::Le, 1.0),
                TraceConstraint::new(CMat::identity(2, 2), Sense::Ge, 2.0),
            ],
        };
        assert!(matches!(solve_sdp(&p, &SdpSettings::default()), Err(Error::Infeasible(_))));
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut a = CMat::identity(2, 2);
        a[(0, 1)] = cr(1.0);
        let p = SdpProblem {
            n: 2,
            objective: a,
            maximize: false,
            constraints: vec![TraceConstraint::new(CMat::identity(2, 2), Sense::Le, 1.0)],
        };
        assert!(solve_sdp(&p, &SdpSettings::default()).is_err());
    }
}
