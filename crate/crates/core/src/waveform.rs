//! Radar waveform design: SCA over the rate minorant with fractional SDP
//! inner solves, under either a similarity or a PAPR constraint.

use serde::{Deserialize, Serialize};

use crate::comm::{avg_rate, waveform_surrogate, WaveformSurrogate};
use crate::error::{Error, Result};
use crate::kernels::rank::{numerical_rank, rank_reduction_guarded, DEFAULT_RANK_TOL};
use crate::kernels::{project_sphere_box, solve_fractional_sdp, solve_sdp, SdpProblem, SdpSettings, Sense, TraceConstraint};
use crate::linalg::{c, identity, normalize_phase_keep_norm, outer, principal, CMat, CVec};
use crate::radar::{check_len, design_matrices, sinr_from_design, to_db, RadarDesignMatrices};
use crate::scenario::{ScenarioInstance, SystemDims};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveformMode {
    Similarity,
    Papr,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct WaveformDesignParams {
    pub epsilon: f64,
    pub eta: f64,
    pub mi0: f64,
    pub sca_tol: f64,
    pub sca_max: usize,
    /// Step halvings toward the previous iterate in PAPR mode.
    pub max_halvings: usize,
}

impl Default for WaveformDesignParams {
    fn default() -> Self {
        Self { epsilon: 0.7, eta: 3.0, mi0: 7.0, sca_tol: 1e-3, sca_max: 50, max_halvings: 10 }
    }
}

impl WaveformDesignParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::InvalidConfig(format!("epsilon = {} must lie in [0, 1]", self.epsilon)));
        }
        if !(self.eta >= 1.0) {
            return Err(Error::InvalidConfig(format!("eta = {} must be at least 1", self.eta)));
        }
        if !(self.sca_tol > 0.0) || !(self.mi0 >= 0.0) {
            return Err(Error::InvalidConfig("sca_tol must be positive and mi0 nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WaveformIter {
    pub iter: usize,
    pub sinr_db: f64,
    pub rate_nats: f64,
    pub rank_before_reduction: usize,
    pub papr: f64,
}

/// A solved inner problem kept for inspection. Fractional problems carry
/// their denominator `(R, c)`.
#[derive(Debug, Clone)]
pub struct SdpRecord {
    pub name: String,
    pub objective: CMat,
    pub maximize: bool,
    pub denominator: Option<(CMat, f64)>,
    pub constraints: Vec<TraceConstraint>,
    pub solution: CMat,
}

#[derive(Debug, Clone)]
pub struct WaveformDesign {
    pub s: CVec,
    pub trace: Vec<WaveformIter>,
    /// Accepted SCA steps.
    pub accepted: usize,
    /// Inner problems of the last SCA round.
    pub records: Vec<SdpRecord>,
}

/// Orthogonal LFM reference `S₀(m,k) = √P_R e^{j2πm(k−1)/M_T} e^{jπ(k−1)²/M_T} / √(M_T K)`,
/// stacked column by column.
pub fn reference_waveform_lfm(dims: &SystemDims, p_r: f64) -> CVec {
    let (mt, k) = (dims.mt, dims.k_pulse);
    let amp = (p_r / (mt * k) as f64).sqrt();
    let pi = std::f64::consts::PI;
    CVec::from_fn(mt * k, |idx, _| {
        let (m, kk) = ((idx % mt + 1) as f64, (idx / mt) as f64);
        let ph = 2.0 * pi * m * kk / mt as f64 + pi * kk * kk / mt as f64;
        c(amp * ph.cos(), amp * ph.sin())
    })
}

pub fn papr(s: &CVec) -> f64 {
    let n = s.len() as f64;
    let peak = s.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    peak * n / s.norm_squared()
}

/// `‖s‖² − |s₀ᴴs|²/P_R`, the squared distance from `s` to the best scaled `s₀`.
pub fn similarity_value(s: &CVec, s0: &CVec, p_r: f64) -> f64 {
    s.norm_squared() - s0.dotc(s).norm_sqr() / p_r
}

fn similarity_matrix(s0: &CVec, p_r: f64) -> CMat {
    identity(s0.len()) - outer(s0, s0).scale(1.0 / p_r)
}

/// Rank-one vector of a PSD matrix: `√λ₁ u₁` with the phase normalized.
fn extract(s: &CMat) -> CVec {
    let (l, u) = principal(s);
    normalize_phase_keep_norm(&(u * c(l.max(0.0).sqrt(), 0.0)))
}

/// Rotates `x` to best align with `reference`.
fn align_phase(x: &CVec, reference: &CVec) -> CVec {
    let ip = x.dotc(reference);
    if ip.norm() == 0.0 {
        return x.clone();
    }
    x * (ip / ip.norm())
}

/// One similarity-mode SCA round: fractional relaxation for the optimal
/// ratio, then the power-minimization problem at that ratio, then rank
/// reduction.
#[derive(Debug, Clone)]
pub struct SimilarityStep {
    pub p_tilde: f64,
    /// Power-minimization solution before rank reduction.
    pub s2: CMat,
    pub rank_before: usize,
    pub reduced: CMat,
    pub constraints: Vec<TraceConstraint>,
    pub records: Vec<SdpRecord>,
}

pub fn similarity_step(
    dm: &RadarDesignMatrices,
    sur: &WaveformSurrogate,
    s0: &CVec,
    p_r: f64,
    epsilon: f64,
    settings: &SdpSettings,
) -> Result<SimilarityStep> {
    let n = s0.len();
    let sim = TraceConstraint::new(similarity_matrix(s0, p_r), Sense::Le, epsilon * p_r);
    let rate = TraceConstraint::new(sur.gamma_hat.clone(), Sense::Le, sur.mi_hat);
    let power = TraceConstraint::new(identity(n), Sense::Le, p_r);
    let extra = vec![power.clone(), rate.clone(), sim.clone()];
    let frac = solve_fractional_sdp(&dm.psi_tilde, &dm.r_tilde, dm.r_of_v, &extra, settings)?;
    let p_tilde = frac.value;
    let mut records = vec![SdpRecord {
        name: "fractional".into(),
        objective: dm.psi_tilde.clone(),
        maximize: true,
        denominator: Some((dm.r_tilde.clone(), dm.r_of_v)),
        constraints: extra,
        solution: frac.s.clone(),
    }];

    let p = p_tilde * (1.0 - 1e-9);
    let ratio = TraceConstraint::new(&dm.r_tilde * c(p, 0.0) - &dm.psi_tilde, Sense::Le, -p * dm.r_of_v);
    let problem = SdpProblem {
        n,
        objective: identity(n),
        maximize: false,
        constraints: vec![ratio.clone(), rate.clone(), sim.clone()],
    };
    // The fractional optimum is feasible for the power problem, so it stands
    // in when the latter cannot be solved to tolerance.
    let s2 = match solve_sdp(&problem, settings) {
        Ok(sol) => sol.s,
        Err(Error::Infeasible(_)) | Err(Error::NumericalFailure(_)) => frac.s.clone(),
        Err(e) => return Err(e),
    };
    records.push(SdpRecord {
        name: "power".into(),
        objective: problem.objective.clone(),
        maximize: false,
        denominator: None,
        constraints: problem.constraints.clone(),
        solution: s2.clone(),
    });

    let rank_before = numerical_rank(&s2, DEFAULT_RANK_TOL);
    let preserve = [identity(n)];
    let guards = [ratio, rate, sim];
    let reduced = match rank_reduction_guarded(&s2, &preserve, &guards, DEFAULT_RANK_TOL) {
        Ok(r) => r.s,
        Err(Error::NoNullspace { .. }) => {
            let mut g = guards.to_vec();
            g.push(power);
            rank_reduction_guarded(&s2, &[], &g, DEFAULT_RANK_TOL)?.s
        }
        Err(e) => return Err(e),
    };
    Ok(SimilarityStep { p_tilde, s2, rank_before, reduced, constraints: guards.to_vec(), records })
}

/// Shared per-call quantities.
struct Ctx<'a> {
    inst: &'a ScenarioInstance,
    v: &'a CMat,
    dm: RadarDesignMatrices,
    p_r: f64,
    params: WaveformDesignParams,
}

impl Ctx<'_> {
    fn sinr(&self, s: &CVec) -> f64 {
        sinr_from_design(&self.dm, s)
    }

    fn rate(&self, s: &CVec) -> Result<f64> {
        avg_rate(self.inst, s, self.v)
    }

    fn row(&self, iter: usize, s: &CVec, rank: usize) -> Result<WaveformIter> {
        Ok(WaveformIter { iter, sinr_db: to_db(self.sinr(s)), rate_nats: self.rate(s)?, rank_before_reduction: rank, papr: papr(s) })
    }

    fn rate_ok(&self, s: &CVec) -> Result<bool> {
        Ok(self.rate(s)? >= self.params.mi0 - 1e-7)
    }
}

fn setup<'a>(
    inst: &'a ScenarioInstance,
    v: &'a CMat,
    w: &CVec,
    s_bar: &CVec,
    params: &WaveformDesignParams,
) -> Result<Ctx<'a>> {
    params.validate()?;
    let dims = inst.dims();
    crate::radar::check_precoder(dims, v)?;
    check_len("filter", w.len(), dims.filter_len())?;
    check_len("waveform", s_bar.len(), dims.waveform_len())?;
    Ok(Ctx { inst, v, dm: design_matrices(inst, w, v)?, p_r: inst.params().p_r, params: *params })
}

/// SCA stopping rule on the SINR in dB.
fn small_change(prev: f64, next: f64, tol: f64) -> bool {
    (to_db(next) - to_db(prev)).abs() < tol
}

/// Degenerate similarity ball: only multiples of `s₀` are admissible, so
/// the largest scale in `(0, 1]` meeting the rate floor is optimal.
fn scaled_reference(ctx: &Ctx, s0: &CVec) -> Result<CVec> {
    if ctx.rate_ok(s0)? {
        return Ok(s0.clone());
    }
    // Rate grows as the waveform shrinks; bisect on the amplitude.
    let (mut lo, mut hi) = (0.0, 1.0);
    if !ctx.rate_ok(&(s0 * c(lo, 0.0)))? {
        return Err(Error::Infeasible("rate floor unreachable even without radar emission".into()));
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ctx.rate_ok(&(s0 * c(mid, 0.0)))? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(s0 * c(lo, 0.0))
}

/// Maximizes SINR under power, rate and similarity constraints, starting
/// from the feasible `s_bar`.
pub fn design_waveform_similarity(
    inst: &ScenarioInstance,
    v: &CMat,
    w: &CVec,
    s_bar: &CVec,
    s0: &CVec,
    params: &WaveformDesignParams,
) -> Result<WaveformDesign> {
    let ctx = setup(inst, v, w, s_bar, params)?;
    check_len("reference waveform", s0.len(), s_bar.len())?;
    let settings = SdpSettings::default();
    let mut cur = s_bar.clone();
    let mut sinr = ctx.sinr(&cur);
    let mut trace = vec![ctx.row(0, &cur, 1)?];
    let mut records = Vec::new();

    if params.epsilon == 0.0 {
        let cand = scaled_reference(&ctx, s0)?;
        let mut accepted = 0;
        if ctx.sinr(&cand) >= sinr {
            cur = cand;
            accepted = 1;
            trace.push(ctx.row(1, &cur, 1)?);
        }
        return Ok(WaveformDesign { s: cur, trace, accepted, records });
    }

    let mut accepted = 0;
    for iter in 1..=params.sca_max {
        let sur = waveform_surrogate(inst, &cur, v, params.mi0)?;
        let step = match similarity_step(&ctx.dm, &sur, s0, ctx.p_r, params.epsilon, &settings) {
            Ok(st) => st,
            Err(e) if accepted > 0 && recoverable(&e) => break,
            Err(e) => return Err(e),
        };
        records = step.records;
        let mut cand = extract(&step.reduced);
        let pw = cand.norm_squared();
        if pw > ctx.p_r {
            cand *= c((ctx.p_r / pw).sqrt(), 0.0);
        }
        let ok = similarity_value(&cand, s0, ctx.p_r) <= params.epsilon * ctx.p_r + 1e-9
            && ctx.rate_ok(&cand)?;
        let next = ctx.sinr(&cand);
        if !ok || next < sinr {
            break;
        }
        let prev = sinr;
        cur = cand;
        sinr = next;
        accepted += 1;
        trace.push(ctx.row(iter, &cur, step.rank_before)?);
        if small_change(prev, sinr, params.sca_tol) {
            break;
        }
    }
    Ok(WaveformDesign { s: cur, trace, accepted, records })
}

fn recoverable(e: &Error) -> bool {
    matches!(
        e,
        Error::Infeasible(_) | Error::NumericalFailure(_) | Error::DegenerateDenominator(_) | Error::NoNullspace { .. }
    )
}

/// Solves the homogenized PAPR-free relaxation and returns the recovered
/// rank-one candidate before projection, its pre-reduction rank and the
/// problem record.
fn papr_relaxation(ctx: &Ctx, sur: &WaveformSurrogate, settings: &SdpSettings) -> Result<(CVec, usize, SdpRecord)> {
    let n = sur.gamma_hat.nrows();
    let p_r = ctx.p_r;
    let r_breve = &ctx.dm.r_tilde + identity(n).scale(ctx.dm.r_of_v / p_r);
    let gamma_t = (&sur.gamma_hat + identity(n)).scale(1.0 / (sur.mi_hat + p_r));
    let rate = TraceConstraint::new(gamma_t, Sense::Le, 1.0);
    let power = TraceConstraint::new(identity(n), Sense::Eq, p_r);
    let extra = vec![rate.clone(), power.clone()];
    let frac = solve_fractional_sdp(&ctx.dm.psi_tilde, &r_breve, 0.0, &extra, settings)?;
    let s = frac.s.clone();
    let rank = numerical_rank(&s, DEFAULT_RANK_TOL);
    let denom = crate::linalg::trace_prod(&r_breve, &s);
    let guards = [rate, power, TraceConstraint::new(r_breve.clone(), Sense::Eq, denom)];
    let reduced = if rank > 1 {
        match rank_reduction_guarded(&s, &[], &guards, DEFAULT_RANK_TOL) {
            Ok(r) => r.s,
            Err(e) if recoverable(&e) => s.clone(),
            Err(e) => return Err(e),
        }
    } else {
        s.clone()
    };
    let record = SdpRecord {
        name: "papr_fractional".into(),
        objective: ctx.dm.psi_tilde.clone(),
        maximize: true,
        denominator: Some((r_breve, 0.0)),
        constraints: extra,
        solution: s,
    };
    Ok((extract(&reduced), rank, record))
}

/// Maximizes SINR under the rate floor, full power and a per-entry
/// magnitude cap, starting from the feasible `s_bar`.
pub fn design_waveform_papr(
    inst: &ScenarioInstance,
    v: &CMat,
    w: &CVec,
    s_bar: &CVec,
    params: &WaveformDesignParams,
) -> Result<WaveformDesign> {
    let ctx = setup(inst, v, w, s_bar, params)?;
    let settings = SdpSettings::default();
    let mut cur = s_bar.clone();
    let mut sinr = ctx.sinr(&cur);
    let mut trace = vec![ctx.row(0, &cur, 1)?];
    let mut records = Vec::new();
    let mut accepted = 0;
    for iter in 1..=params.sca_max {
        let sur = waveform_surrogate(inst, &cur, v, params.mi0)?;
        let (target, rank, record) = match papr_relaxation(&ctx, &sur, &settings) {
            Ok(x) => x,
            Err(e) if accepted > 0 && recoverable(&e) => break,
            Err(e) => return Err(e),
        };
        records = vec![record];
        let target = align_phase(&target, &cur);
        let mut step = 1.0;
        let mut pick = None;
        for _ in 0..=params.max_halvings {
            let point = &cur + (&target - &cur) * c(step, 0.0);
            let (cand, _) = project_sphere_box(&point, ctx.p_r, params.eta)?;
            let next = ctx.sinr(&cand);
            if next >= sinr && ctx.rate_ok(&cand)? {
                pick = Some((cand, next));
                break;
            }
            step *= 0.5;
        }
        let Some((cand, next)) = pick else {
            break;
        };
        let prev = sinr;
        cur = cand;
        sinr = next;
        accepted += 1;
        trace.push(ctx.row(iter, &cur, rank)?);
        if small_change(prev, sinr, params.sca_tol) {
            break;
        }
    }
    Ok(WaveformDesign { s: cur, trace, accepted, records })
}

/// Mode dispatch used by the driver.
pub fn design_waveform(
    mode: WaveformMode,
    inst: &ScenarioInstance,
    v: &CMat,
    w: &CVec,
    s_bar: &CVec,
    s0: &CVec,
    params: &WaveformDesignParams,
) -> Result<WaveformDesign> {
    match mode {
        WaveformMode::Similarity => design_waveform_similarity(inst, v, w, s_bar, s0, params),
        WaveformMode::Papr => design_waveform_papr(inst, v, w, s_bar, params),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::ScenarioConfig;

    #[test]
    fn lfm_reference() {
        let dims = SystemDims::default();
        let s = reference_waveform_lfm(&dims, 10.0);
        assert!((s.norm_squared() - 10.0).abs() < 1e-12);
        let amp = (10.0 / 32.0f64).sqrt();
        assert!(s.iter().all(|z| (z.norm() - amp).abs() < 1e-12));
        // First sample is real; entry (m=1, k=2) sits at index M_T.
        assert!((s[0] - c(amp, 0.0)).norm() < 1e-12);
        let ph = 2.0 * std::f64::consts::PI / 8.0 + std::f64::consts::PI / 8.0;
        assert!((s[8] - c(amp * ph.cos(), amp * ph.sin())).norm() < 1e-12);
        assert!((papr(&s) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn similarity_value_of_reference_is_zero() {
        let dims = SystemDims::default();
        let s0 = reference_waveform_lfm(&dims, 10.0);
        assert!(similarity_value(&s0, &s0, 10.0).abs() < 1e-12);
        assert!(similarity_value(&(&s0 * c(0.0, 1.0)), &s0, 10.0).abs() < 1e-12);
    }

    #[test]
    fn bad_params_rejected() {
        assert!(WaveformDesignParams { epsilon: 1.5, ..Default::default() }.validate().is_err());
        assert!(WaveformDesignParams { eta: 0.5, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn zero_epsilon_returns_scaled_reference() {
        let inst = ScenarioConfig::default().sample(5).unwrap();
        let d = *inst.dims();
        let s0 = reference_waveform_lfm(&d, inst.params().p_r);
        let mut v = CMat::zeros(d.nt, d.d);
        for i in 0..d.d {
            v[(i, i)] = c(0.5, 0.0);
        }
        let w = crate::radar::update_receive_filter(&inst, &v, &s0).unwrap();
        let params = WaveformDesignParams { epsilon: 0.0, mi0: 0.0, ..Default::default() };
        let out = design_waveform_similarity(&inst, &v, &w, &s0, &s0, &params).unwrap();
        assert!(similarity_value(&out.s, &s0, 10.0).abs() < 1e-9);
        assert!((out.s.norm_squared() - 10.0).abs() < 1e-9);
    }
}
