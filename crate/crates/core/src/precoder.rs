//! Precoder design: successive convex approximation of the rate constraint,
//! each subproblem solved with ADMM.

use serde::{Deserialize, Serialize};

use crate::comm::{
    precoder_surrogate_from, rate_from, received_signal_cov, unvec_precoder, vec_precoder, CuInterference,
    PrecoderSurrogate,
};
use crate::error::{Error, Result};
use crate::kernels::admm::{admm_qcqp, project_ball, AdmmSettings};
use crate::kernels::roots::bisection_root;
use crate::linalg::{c, herm_eig, CMat, CVec};
use crate::radar::check_len;
use crate::scenario::ScenarioInstance;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct PrecoderDesignParams {
    /// Rate floor in nats per symbol.
    pub mi0: f64,
    pub rho_bar: f64,
    pub sca_tol: f64,
    pub sca_max: usize,
    pub admm_tol: f64,
    pub admm_max: usize,
    /// Rounds of feasibility restoration before giving up.
    pub restore_rounds: usize,
}

impl Default for PrecoderDesignParams {
    fn default() -> Self {
        Self { mi0: 7.0, rho_bar: 100.0, sca_tol: 1e-3, sca_max: 50, admm_tol: 1e-6, admm_max: 5000, restore_rounds: 20 }
    }
}

impl PrecoderDesignParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.mi0 >= 0.0) || !(self.rho_bar > 0.0) || !(self.sca_tol > 0.0) || !(self.admm_tol > 0.0) {
            return Err(Error::InvalidConfig(format!("invalid precoder parameters {self:?}")));
        }
        Ok(())
    }

    fn admm(&self) -> AdmmSettings {
        AdmmSettings { rho_bar: self.rho_bar, tol: self.admm_tol, max_iter: self.admm_max, adaptive: true }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PrecoderIter {
    pub iter: usize,
    pub r_of_v: f64,
    pub rate_nats: f64,
    pub admm_iters: usize,
    pub admm_converged: bool,
}

#[derive(Debug, Clone)]
pub struct PrecoderDesign {
    pub v: CMat,
    pub trace: Vec<PrecoderIter>,
    /// Whether the starting point had to be moved to meet the rate floor.
    pub restored: bool,
    /// Whether the last SCA round was accepted (false means it stopped on
    /// a rejected step rather than on the tolerance).
    pub converged: bool,
}

/// Shared data of one design call.
struct Ctx<'a> {
    inst: &'a ScenarioInstance,
    cu: CuInterference,
    pi: CMat,
    noise: f64,
    p_b: f64,
}

impl Ctx<'_> {
    fn rate(&self, v: &CVec) -> Result<f64> {
        let vm = unvec_precoder(self.inst.dims(), v)?;
        rate_from(&self.cu, &received_signal_cov(self.inst, &vm)?)
    }

    fn objective(&self, v: &CVec) -> f64 {
        v.dotc(&(&self.pi * v)).re + self.noise
    }

    fn surrogate(&self, v: &CVec, mi0: f64) -> Result<PrecoderSurrogate> {
        precoder_surrogate_from(self.inst, &self.cu, v, mi0)
    }
}

/// Maximizer of the surrogate lower bound `2Re(gᴴv) − vᴴΓv` over the ball
/// `‖v‖² ≤ P_B`, i.e. `v = (Γ + λI)⁻¹ g` with the smallest admissible λ.
fn trust_region_step(sur: &PrecoderSurrogate, p_b: f64) -> Result<CVec> {
    let eig = herm_eig(&sur.gamma22);
    let mu: Vec<f64> = eig.values.iter().map(|v| v.max(0.0)).collect();
    let kappa = eig.vectors.adjoint() * &sur.g;
    let norm2 = |l: f64| -> f64 {
        kappa
            .iter()
            .zip(&mu)
            .map(|(k, &m)| {
                let d = m + l;
                if d > 0.0 {
                    k.norm_sqr() / (d * d)
                } else if k.norm_sqr() > 0.0 {
                    f64::MAX
                } else {
                    0.0
                }
            })
            .sum::<f64>()
            .min(f64::MAX)
    };
    let lambda = bisection_root(|l| norm2(l) - p_b, p_b)?;
    let x = CVec::from_fn(kappa.len(), |k, _| {
        let d = mu[k] + lambda;
        if d > 0.0 {
            kappa[k] / d
        } else {
            c(0.0, 0.0)
        }
    });
    Ok(project_ball(&(&eig.vectors * x), p_b))
}

/// Moves `v_init` to a precoder with rate at least `mi0` inside the power
/// ball, for waveform `s`.
pub fn restore_feasibility(inst: &ScenarioInstance, s: &CVec, v_init: &CMat, params: &PrecoderDesignParams) -> Result<CMat> {
    params.validate()?;
    let dims = *inst.dims();
    crate::radar::check_precoder(&dims, v_init)?;
    let ctx = Ctx {
        inst,
        cu: CuInterference::new(inst, s)?,
        pi: CMat::zeros(dims.precoder_len(), dims.precoder_len()),
        noise: 0.0,
        p_b: inst.params().p_b,
    };
    unvec_precoder(&dims, &restore(&ctx, &vec_precoder(v_init), params)?)
}

/// Repeated maximization of the rate's quadratic minorant over the ball.
fn restore(ctx: &Ctx, v: &CVec, params: &PrecoderDesignParams) -> Result<CVec> {
    let mut cur = project_ball(v, ctx.p_b);
    let mut best = ctx.rate(&cur)?;
    for _ in 0..params.restore_rounds {
        if best >= params.mi0 {
            return Ok(cur);
        }
        let sur = ctx.surrogate(&cur, params.mi0)?;
        let next = trust_region_step(&sur, ctx.p_b)?;
        let rate = ctx.rate(&next)?;
        if rate <= best + 1e-12 {
            break;
        }
        cur = next;
        best = rate;
    }
    if best >= params.mi0 {
        Ok(cur)
    } else {
        Err(Error::InfeasibleStart { mi0: params.mi0, best })
    }
}

/// Minimizes `r(V)` subject to the rate floor and power budget, starting
/// from `v_init`.
pub fn design_precoder(
    inst: &ScenarioInstance,
    s: &CVec,
    w: &CVec,
    v_init: &CMat,
    params: &PrecoderDesignParams,
) -> Result<PrecoderDesign> {
    params.validate()?;
    let dims = *inst.dims();
    crate::radar::check_precoder(&dims, v_init)?;
    check_len("filter", w.len(), dims.filter_len())?;
    let p = inst.params();
    let ctx = Ctx {
        inst,
        cu: CuInterference::new(inst, s)?,
        pi: crate::comm::pi_matrix(inst, w)?,
        noise: p.sigma_r_sq * w.norm_squared(),
        p_b: p.p_b,
    };

    let v0 = vec_precoder(v_init);
    let feasible = v0.norm_squared() <= ctx.p_b * (1.0 + 1e-12) && ctx.rate(&v0)? >= params.mi0;
    let (mut vbar, restored) = if feasible { (v0, false) } else { (restore(&ctx, &v0, params)?, true) };

    let mut obj = ctx.objective(&vbar);
    let mut trace = vec![PrecoderIter {
        iter: 0,
        r_of_v: obj,
        rate_nats: ctx.rate(&vbar)?,
        admm_iters: 0,
        admm_converged: true,
    }];
    let mut converged = false;
    let admm = params.admm();
    for iter in 1..=params.sca_max {
        let sur = ctx.surrogate(&vbar, params.mi0)?;
        let out = admm_qcqp(&ctx.pi, ctx.p_b, &sur, &vbar, &admm)?;
        let st = &out.state;
        let cands = [st.v.clone(), st.v1.clone(), st.v2.clone(), project_ball(&st.v2, ctx.p_b)];
        let mut pick: Option<(f64, f64, CVec)> = None;
        for cand in cands {
            if cand.norm_squared() > ctx.p_b * (1.0 + 1e-12) {
                continue;
            }
            let o = ctx.objective(&cand);
            if o > obj + 1e-12 * obj.abs() {
                continue;
            }
            let rate = ctx.rate(&cand)?;
            if rate < params.mi0 {
                continue;
            }
            if pick.as_ref().map_or(true, |(po, ..)| o < *po) {
                pick = Some((o, rate, cand));
            }
        }
        let Some((o, rate, cand)) = pick else {
            break;
        };
        let change = (obj - o).abs();
        vbar = cand;
        obj = o;
        trace.push(PrecoderIter {
            iter,
            r_of_v: obj,
            rate_nats: rate,
            admm_iters: out.iterations,
            admm_converged: out.converged,
        });
        if change < params.sca_tol {
            converged = true;
            break;
        }
    }
    Ok(PrecoderDesign { v: unvec_precoder(&dims, &vbar)?, trace, restored, converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radar::update_receive_filter;
    use crate::scenario::ScenarioConfig;
    use crate::waveform::reference_waveform_lfm;

    fn v0(inst: &ScenarioInstance) -> CMat {
        let d = inst.dims();
        let mut v = CMat::zeros(d.nt, d.d);
        let a = (inst.params().p_b / d.d as f64).sqrt();
        for i in 0..d.d {
            v[(i, i)] = c(a, 0.0);
        }
        v
    }

    #[test]
    fn design_is_feasible_and_monotone() {
        let inst = ScenarioConfig::default().sample(11).unwrap();
        let s = reference_waveform_lfm(inst.dims(), inst.params().p_r);
        let v = v0(&inst);
        let w = update_receive_filter(&inst, &v, &s).unwrap();
        let params = PrecoderDesignParams::default();
        let out = design_precoder(&inst, &s, &w, &v, &params).unwrap();
        for pair in out.trace.windows(2) {
            assert!(pair[1].r_of_v <= pair[0].r_of_v + 1e-9);
        }
        let rate = crate::comm::avg_rate(&inst, &s, &out.v).unwrap();
        assert!(rate >= params.mi0 - 1e-6);
        assert!(crate::linalg::trace_re(&(&out.v * out.v.adjoint())) <= inst.params().p_b + 1e-9);
    }

    #[test]
    fn unreachable_floor_is_reported() {
        let inst = ScenarioConfig::default().sample(12).unwrap();
        let s = reference_waveform_lfm(inst.dims(), inst.params().p_r);
        let v = v0(&inst);
        let w = update_receive_filter(&inst, &v, &s).unwrap();
        let params = PrecoderDesignParams { mi0: 200.0, ..Default::default() };
        assert!(matches!(design_precoder(&inst, &s, &w, &v, &params), Err(Error::InfeasibleStart { .. })));
    }
}
