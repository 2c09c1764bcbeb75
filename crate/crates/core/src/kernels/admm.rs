//! ADMM for the convex QCQP
//!
//! ```text
//! min vᴴΠv  s.t.  ‖v‖² ≤ P_B,  vᴴΓ̄₂₂v − 2Re(Γ̄₁₂v) ≤ −M̄I
//! ```
//!
//! split into a ball projection, a projection onto the quadratic set and a
//! linear solve for the consensus variable.

use crate::comm::PrecoderSurrogate;
use crate::error::{Error, Result};
use crate::linalg::{c, herm_eig, hermitize, CMat, CVec};

use super::roots::bisection_root;
use super::sdp::{solve_sdp, SdpProblem, SdpSettings, Sense, TraceConstraint};

#[derive(Debug, Clone, Copy)]
pub struct AdmmSettings {
    pub rho_bar: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Residual balancing of the penalty.
    pub adaptive: bool,
}

impl Default for AdmmSettings {
    fn default() -> Self {
        Self { rho_bar: 100.0, tol: 1e-6, max_iter: 5000, adaptive: true }
    }
}

#[derive(Debug, Clone)]
pub struct AdmmState {
    pub v: CVec,
    pub v1: CVec,
    pub v2: CVec,
    pub c1: CVec,
    pub c2: CVec,
    pub rho_bar: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
}

#[derive(Debug, Clone)]
pub struct AdmmOutput {
    pub state: AdmmState,
    pub iterations: usize,
    /// False when the iteration cap was hit before both residuals fell
    /// below tolerance.
    pub converged: bool,
}

/// Projection onto the ball `‖x‖² ≤ P_B`.
pub fn project_ball(x: &CVec, p_b: f64) -> CVec {
    let n = x.norm();
    let r = p_b.sqrt();
    if n <= r {
        x.clone()
    } else {
        x * c(r / n, 0.0)
    }
}

/// Projection onto `{x : xᴴΓx − 2Re(gᴴx) ≤ −M̄I}` in the eigenbasis of Γ.
pub struct QuadProjector {
    q: CMat,
    mu: Vec<f64>,
    kappa: CVec,
    mi_bar: f64,
}

impl QuadProjector {
    pub fn new(sur: &PrecoderSurrogate) -> Self {
        let eig = herm_eig(&sur.gamma22);
        let mu: Vec<f64> = eig.values.iter().map(|&v| v.max(0.0)).collect();
        let kappa = eig.vectors.adjoint() * &sur.g;
        Self { q: eig.vectors, mu, kappa, mi_bar: sur.mi_bar }
    }

    fn at(&self, t: &CVec, lambda: f64) -> CVec {
        CVec::from_fn(t.len(), |k, _| (t[k] + self.kappa[k] * lambda) / (1.0 + lambda * self.mu[k]))
    }

    fn f(&self, t: &CVec, lambda: f64) -> f64 {
        let x = self.at(t, lambda);
        let mut acc = self.mi_bar;
        for k in 0..x.len() {
            acc += self.mu[k] * x[k].norm_sqr() - 2.0 * (self.kappa[k].conj() * x[k]).re;
        }
        acc
    }

    /// Multiplier `λ̃` of the projection of `x`.
    pub fn multiplier(&self, x: &CVec) -> Result<f64> {
        let t = self.q.adjoint() * x;
        bisection_root(|l| self.f(&t, l), self.mi_bar.abs().max(1.0))
    }

    pub fn project(&self, x: &CVec) -> Result<CVec> {
        let t = self.q.adjoint() * x;
        let lambda = bisection_root(|l| self.f(&t, l), self.mi_bar.abs().max(1.0))?;
        if lambda == 0.0 {
            return Ok(x.clone());
        }
        Ok(&self.q * self.at(&t, lambda))
    }
}

/// Runs ADMM from `v_init`. Hitting the iteration cap is reported through
/// `converged = false`, not as an error.
///
/// The penalty starts at `rho_bar` and, when `adaptive` is set, is doubled
/// or halved whenever one residual exceeds the other tenfold; the scaled
/// duals are rescaled to match.
pub fn admm_qcqp(
    pi: &CMat,
    p_b: f64,
    sur: &PrecoderSurrogate,
    v_init: &CVec,
    settings: &AdmmSettings,
) -> Result<AdmmOutput> {
    let n = v_init.len();
    if pi.shape() != (n, n) || sur.gamma22.shape() != (n, n) || sur.g.len() != n {
        return Err(Error::DimensionMismatch("ADMM inputs differ in size".into()));
    }
    if !(p_b > 0.0) || !(settings.rho_bar > 0.0) {
        return Err(Error::InvalidConfig("ADMM needs P_B > 0 and rho > 0".into()));
    }
    let mut rho = settings.rho_bar;
    let proj = QuadProjector::new(sur);
    let eig = herm_eig(&hermitize(pi));
    let mu: Vec<f64> = eig.values.iter().map(|&v| v.max(0.0)).collect();
    // (Π + ρI)⁻¹ (ρ/2) x in the eigenbasis of Π.
    let consensus = |x: &CVec, rho: f64| -> CVec {
        let t = eig.vectors.adjoint() * x;
        let t = CVec::from_fn(n, |k, _| t[k] * (0.5 * rho / (mu[k] + rho)));
        &eig.vectors * t
    };

    let zero = CVec::zeros(n);
    let mut st = AdmmState {
        v: v_init.clone(),
        v1: v_init.clone(),
        v2: v_init.clone(),
        c1: zero.clone(),
        c2: zero,
        rho_bar: rho,
        primal_residual: f64::INFINITY,
        dual_residual: f64::INFINITY,
    };
    let mut iterations = 0;
    let mut converged = false;
    for it in 1..=settings.max_iter {
        iterations = it;
        st.v1 = project_ball(&(&st.v - &st.c1), p_b);
        st.v2 = proj.project(&(&st.v - &st.c2))?;
        let prev = st.v.clone();
        st.v = consensus(&(&st.v1 + &st.c1 + &st.v2 + &st.c2), rho);
        st.c1 += &st.v1 - &st.v;
        st.c2 += &st.v2 - &st.v;
        st.primal_residual = (&st.v1 - &st.v).norm().max((&st.v2 - &st.v).norm());
        st.dual_residual = rho * (&st.v - &prev).norm();
        if st.primal_residual < settings.tol && st.dual_residual < settings.tol {
            converged = true;
            break;
        }
        if settings.adaptive && it % 10 == 0 {
            let factor = if st.primal_residual > 10.0 * st.dual_residual {
                2.0
            } else if st.dual_residual > 10.0 * st.primal_residual {
                0.5
            } else {
                1.0
            };
            if factor != 1.0 {
                rho *= factor;
                st.c1 /= c(factor, 0.0);
                st.c2 /= c(factor, 0.0);
            }
        }
    }
    st.rho_bar = rho;
    Ok(AdmmOutput { state: st, iterations, converged })
}

/// Reference solution of the same QCQP through the interior-point solver,
/// using the lifted variable `[[vvᴴ, v], [vᴴ, 1]]`. Returns `(v, objective)`.
pub fn qcqp_via_sdp(pi: &CMat, p_b: f64, sur: &PrecoderSurrogate, settings: &SdpSettings) -> Result<(CVec, f64)> {
    let n = pi.nrows();
    let m = n + 1;
    let embed = |a: &CMat| {
        let mut out = CMat::zeros(m, m);
        out.view_mut((0, 0), (n, n)).copy_from(a);
        out
    };
    let objective = embed(pi);
    let power = embed(&CMat::identity(n, n));
    let mut quad = embed(&sur.gamma22);
    for i in 0..n {
        quad[(i, n)] = -sur.g[i];
        quad[(n, i)] = -sur.g[i].conj();
    }
    let mut corner = CMat::zeros(m, m);
    corner[(n, n)] = c(1.0, 0.0);
    let p = SdpProblem {
        n: m,
        objective,
        maximize: false,
        constraints: vec![
            TraceConstraint::new(power, Sense::Le, p_b),
            TraceConstraint::new(quad, Sense::Le, -sur.mi_bar),
            TraceConstraint::new(corner, Sense::Eq, 1.0),
        ],
    };
    let sol = solve_sdp(&p, settings)?;
    let scale = sol.s[(n, n)];
    let v = CVec::from_fn(n, |i, _| sol.s[(i, n)] / scale);
    let obj = v.dotc(&(pi * &v)).re;
    Ok((v, obj))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cr;

    fn toy() -> (CMat, PrecoderSurrogate) {
        let n = 4;
        let pi = CMat::from_diagonal(&CVec::from_vec(vec![cr(3.0), cr(1.0), cr(0.5), cr(0.0)]));
        let gamma22 = CMat::from_diagonal(&CVec::from_vec(vec![cr(1.0), cr(0.5), cr(0.0), cr(0.2)]));
        let g = CVec::from_vec(vec![cr(0.8), c(0.1, 0.2), cr(0.3), cr(0.0)]);
        let _ = n;
        (pi, PrecoderSurrogate { gamma22, g, mi_bar: 0.2 })
    }

    #[test]
    fn ball_projection_branches() {
        let x = CVec::from_vec(vec![cr(0.3), cr(0.4)]);
        assert_eq!(project_ball(&x, 1.0), x);
        let y = CVec::from_vec(vec![cr(3.0), cr(4.0)]);
        assert!((project_ball(&y, 1.0).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quad_projection_lands_on_boundary() {
        let (_, sur) = toy();
        let proj = QuadProjector::new(&sur);
        let x = CVec::from_vec(vec![cr(-1.0), cr(0.0), cr(0.0), cr(0.5)]);
        assert!(sur.slack(&x) < 0.0);
        let p = proj.project(&x).unwrap();
        assert!(sur.slack(&p).abs() < 1e-8);
        let inside = CVec::from_vec(vec![cr(0.8), cr(0.0), cr(0.0), cr(0.0)]);
        assert!(sur.slack(&inside) >= 0.0);
        assert_eq!(proj.project(&inside).unwrap(), inside);
    }

    #[test]
    fn zero_objective_stays_feasible() {
        let (_, sur) = toy();
        let pi = CMat::zeros(4, 4);
        let v0 = CVec::from_vec(vec![cr(0.8), cr(0.0), cr(0.0), cr(0.0)]);
        let out = admm_qcqp(&pi, 1.0, &sur, &v0, &AdmmSettings::default()).unwrap();
        assert!(out.converged);
        assert!(out.state.v.norm_squared() <= 1.0 + 1e-6);
        assert!(sur.slack(&out.state.v) > -1e-6);
    }

    #[test]
    fn matches_interior_point_reference() {
        let (pi, sur) = toy();
        let v0 = CVec::from_vec(vec![cr(0.8), cr(0.0), cr(0.0), cr(0.0)]);
        let out = admm_qcqp(&pi, 1.0, &sur, &v0, &AdmmSettings::default()).unwrap();
        let admm_obj = out.state.v.dotc(&(&pi * &out.state.v)).re;
        let (_, ref_obj) = qcqp_via_sdp(&pi, 1.0, &sur, &SdpSettings::default()).unwrap();
        assert!((admm_obj - ref_obj).abs() <= 1e-4 * ref_obj.abs().max(1e-6), "{admm_obj} vs {ref_obj}");
    }
}
