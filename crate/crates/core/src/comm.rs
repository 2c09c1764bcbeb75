//! Communication-side metrics: radar interference at the user, the average
//! rate, its block-matrix reparameterization, and the first-order surrogates
//! used by the precoder and waveform designs.

use crate::error::{Error, Result};
use crate::linalg::{
    hermitize, identity, inv_pd, logdet_pd, outer, psd_sqrt, vec_of, CMat, CVec,
};
use crate::radar::{check_len, check_precoder, filter_blocks};
use crate::scenario::{delayed_sample, steering_vector, ScenarioInstance, SystemDims};

/// `vec(V)`, column-major.
pub fn vec_precoder(v: &CMat) -> CVec {
    vec_of(v)
}

pub fn unvec_precoder(dims: &SystemDims, v: &CVec) -> Result<CMat> {
    crate::linalg::unvec(v, dims.nt, dims.d)
}

/// The distinct user-side interference covariances over one PRI, with the
/// number of instants at which each occurs. Instants that see the same set
/// of active pulse samples share a covariance.
#[derive(Debug, Clone)]
pub struct CuInterference {
    pub covs: Vec<CMat>,
    pub counts: Vec<usize>,
    /// Active pulse sample per radar path for each distinct covariance.
    pub patterns: Vec<Vec<Option<usize>>>,
    pub k_pri: usize,
}

impl CuInterference {
    pub fn new(inst: &ScenarioInstance, s: &CVec) -> Result<Self> {
        let dims = inst.dims();
        check_len("waveform", s.len(), dims.waveform_len())?;
        let mut patterns: Vec<Vec<Option<usize>>> = Vec::new();
        let mut counts = Vec::new();
        for k in 0..dims.k_pri {
            let pat = pattern_at(inst, k);
            match patterns.iter().position(|p| *p == pat) {
                Some(i) => counts[i] += 1,
                None => {
                    patterns.push(pat);
                    counts.push(1);
                }
            }
        }
        let covs = patterns.iter().map(|p| cov_for_pattern(inst, s, p)).collect();
        Ok(Self { covs, counts, patterns, k_pri: dims.k_pri })
    }

    /// Weight `count / K̃` of each distinct covariance.
    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        let kp = self.k_pri as f64;
        self.counts.iter().map(move |&c| c as f64 / kp)
    }
}

fn pattern_at(inst: &ScenarioInstance, k: usize) -> Vec<Option<usize>> {
    let d = inst.dims();
    inst.params().r2c.iter().map(|path| delayed_sample(d.k_pulse, d.k_pri, path.tau, k)).collect()
}

fn cov_for_pattern(inst: &ScenarioInstance, s: &CVec, pat: &[Option<usize>]) -> CMat {
    let d = inst.dims();
    let p = inst.params();
    let mut r = identity(d.nr).scale(p.sigma_c_sq);
    for ((m, a), path) in pat.iter().zip(&inst.channels().r2c_spatial).zip(&p.r2c) {
        if let Some(m) = *m {
            let x = a * s.rows(m * d.mt, d.mt);
            r += outer(&x, &x).scale(path.sigma_sq);
        }
    }
    hermitize(&r)
}

/// `R_c^k(s)` at the one-based instant `k` of the PRI.
pub fn radar_interference_cov_at_k(inst: &ScenarioInstance, s: &CVec, k: usize) -> Result<CMat> {
    let d = inst.dims();
    check_len("waveform", s.len(), d.waveform_len())?;
    if k == 0 || k > d.k_pri {
        return Err(Error::OutOfRange(format!("instant {k} outside 1..={}", d.k_pri)));
    }
    Ok(cov_for_pattern(inst, s, &pattern_at(inst, k - 1)))
}

/// `Σ_l σ²_l G_l V Vᴴ G_lᴴ`.
pub fn received_signal_cov(inst: &ScenarioInstance, v: &CMat) -> Result<CMat> {
    let d = inst.dims();
    check_precoder(d, v)?;
    let mut rv = CMat::zeros(d.nr, d.nr);
    for (g, path) in inst.channels().g_comm.iter().zip(&inst.params().comm) {
        let gv = g * v;
        rv += (&gv * gv.adjoint()).scale(path.sigma_sq);
    }
    Ok(hermitize(&rv))
}

/// Average rate from precomputed interference and received-signal covariances.
pub fn rate_from(cu: &CuInterference, rv: &CMat) -> Result<f64> {
    let mut acc = 0.0;
    for (r, w) in cu.covs.iter().zip(cu.weights()) {
        acc += w * (logdet_pd(&(r + rv))? - logdet_pd(r)?);
    }
    Ok(acc)
}

/// Average rate over the PRI in nats per symbol.
pub fn avg_rate(inst: &ScenarioInstance, s: &CVec, v: &CMat) -> Result<f64> {
    let cu = CuInterference::new(inst, s)?;
    rate_from(&cu, &received_signal_cov(inst, v)?)
}

/// `Δ`, the Hermitian PSD matrix with `(I⊗vᵀ)Δ(I⊗v*) = Σ_l σ²_l G_l VVᴴ G_lᴴ`.
pub fn delta_matrix(inst: &ScenarioInstance) -> CMat {
    let d = inst.dims();
    let blk = d.nt * d.d;
    let n = d.nr * blk;
    let mut delta = CMat::zeros(n, n);
    for path in &inst.params().comm {
        let ar = steering_vector(d.nr, path.doa);
        let at = steering_vector(d.nt, path.dod);
        for q1 in 0..d.nr {
            let a1 = at.map(|z| z * ar[q1]);
            for q2 in 0..d.nr {
                let a2 = at.map(|z| z * ar[q2]);
                // (Δ^l_{q1 q2})ᵀ = ã_{q1} ã_{q2}ᴴ
                let inner = outer(&a1, &a2).scale(path.sigma_sq);
                for dd in 0..d.d {
                    let r0 = q1 * blk + dd * d.nt;
                    let c0 = q2 * blk + dd * d.nt;
                    let mut view = delta.view_mut((r0, c0), (d.nt, d.nt));
                    view += &inner;
                }
            }
        }
    }
    delta
}

/// `I_{N_R} ⊗ x` for a column vector `x`.
fn kron_eye_col(nr: usize, x: &CVec) -> CMat {
    let n = x.len();
    let mut out = CMat::zeros(nr * n, nr);
    for q in 0..nr {
        out.view_mut((q * n, q), (n, 1)).copy_from(x);
    }
    out
}

/// `Δ` together with its PSD square root.
#[derive(Debug, Clone)]
pub struct DeltaFactor {
    pub delta: CMat,
    pub sqrt: CMat,
}

impl DeltaFactor {
    pub fn new(inst: &ScenarioInstance) -> Self {
        let delta = delta_matrix(inst);
        let sqrt = psd_sqrt(&delta);
        Self { delta, sqrt }
    }

    /// `Δ^{1/2}(I⊗v*)`.
    pub fn b_matrix(&self, nr: usize, v: &CVec) -> CMat {
        &self.sqrt * kron_eye_col(nr, &v.conjugate())
    }

    /// `E_k(v)` for a given interference covariance.
    pub fn ek(&self, nr: usize, v: &CVec, rc: &CMat) -> CMat {
        let b = self.b_matrix(nr, v);
        let n = b.nrows();
        let mut e = CMat::zeros(n + nr, n + nr);
        e.view_mut((0, 0), (n, n)).fill_with_identity();
        e.view_mut((0, n), (n, nr)).copy_from(&b);
        e.view_mut((n, 0), (nr, n)).copy_from(&b.adjoint());
        let lower = rc + b.adjoint() * &b;
        e.view_mut((n, n), (nr, nr)).copy_from(&lower);
        e
    }
}

/// `E_k(v)` at the one-based instant `k`.
pub fn ek_matrix(inst: &ScenarioInstance, v: &CVec, s: &CVec, k: usize) -> Result<CMat> {
    let d = inst.dims();
    check_len("precoder", v.len(), d.precoder_len())?;
    let rc = radar_interference_cov_at_k(inst, s, k)?;
    Ok(DeltaFactor::new(inst).ek(d.nr, v, &rc))
}

/// Average rate computed from the block matrices `E_k`:
/// `log det(C E_k⁻¹ Cᴴ) = log det(E_k,22) − log det(E_k)`.
pub fn mi_block_with(inst: &ScenarioInstance, df: &DeltaFactor, v: &CVec, s: &CVec) -> Result<f64> {
    let d = inst.dims();
    check_len("precoder", v.len(), d.precoder_len())?;
    let cu = CuInterference::new(inst, s)?;
    let n = df.delta.nrows();
    let mut acc = 0.0;
    for (rc, w) in cu.covs.iter().zip(cu.weights()) {
        let e = df.ek(d.nr, v, rc);
        let e22 = e.view((n, n), (d.nr, d.nr)).into_owned();
        acc += w * (logdet_pd(&e22)? - logdet_pd(&e)?);
    }
    Ok(acc)
}

pub fn mi_block(inst: &ScenarioInstance, v: &CVec, s: &CVec) -> Result<f64> {
    mi_block_with(inst, &DeltaFactor::new(inst), v, s)
}

/// Convex quadratic restriction of the rate constraint around `v̄`:
/// `vᴴ Γ̄₂₂ v − 2 Re(Γ̄₁₂ v) ≤ −M̄I`, where `Γ̄₁₂ = gᴴ`.
#[derive(Debug, Clone)]
pub struct PrecoderSurrogate {
    pub gamma22: CMat,
    pub g: CVec,
    pub mi_bar: f64,
}

impl PrecoderSurrogate {
    /// `Γ̄₁₂` as a row.
    pub fn gamma12(&self) -> CMat {
        CMat::from_row_slice(1, self.g.len(), self.g.conjugate().as_slice())
    }

    /// Left-hand side `vᴴΓ̄₂₂v − 2Re(gᴴv)`.
    pub fn lhs(&self, v: &CVec) -> f64 {
        v.dotc(&(&self.gamma22 * v)).re - 2.0 * self.g.dotc(v).re
    }

    /// Constraint slack `−M̄I − lhs(v)`; nonnegative when satisfied.
    pub fn slack(&self, v: &CVec) -> f64 {
        -self.mi_bar - self.lhs(v)
    }

    /// Lower bound on the true rate implied at `v`, given the floor the
    /// surrogate was built with.
    pub fn rate_lower_bound(&self, v: &CVec, mi0: f64) -> f64 {
        mi0 + self.slack(v)
    }
}

/// Builds the precoder surrogate from cached interference covariances.
pub fn precoder_surrogate_from(
    inst: &ScenarioInstance,
    cu: &CuInterference,
    v_bar: &CVec,
    mi0: f64,
) -> Result<PrecoderSurrogate> {
    let d = inst.dims();
    check_len("precoder", v_bar.len(), d.precoder_len())?;
    let vb = unvec_precoder(d, v_bar)?;
    let xbar = received_signal_cov(inst, &vb)?;
    let mut z = CMat::zeros(d.nr, d.nr);
    let mut m = CMat::zeros(d.nr, d.nr);
    let mut offset = 0.0;
    for (r, w) in cu.covs.iter().zip(cu.weights()) {
        let ri = inv_pd(r)?;
        let rxi = inv_pd(&(r + &xbar))?;
        let y = &ri - &rxi;
        let ld = logdet_pd(&(r + &xbar))? - logdet_pd(r)?;
        offset += w * (ld + crate::linalg::trace_prod(&y, &xbar) - 2.0 * crate::linalg::trace_prod(&ri, &xbar));
        z += y.scale(w);
        m += ri.scale(w);
    }
    let mut gz = CMat::zeros(d.nt, d.nt);
    let mut gm = CMat::zeros(d.nt, d.nt);
    for (g, path) in inst.channels().g_comm.iter().zip(&inst.params().comm) {
        gz += (g.adjoint() * &z * g).scale(path.sigma_sq);
        gm += (g.adjoint() * &m * g).scale(path.sigma_sq);
    }
    let gamma22 = hermitize(&crate::linalg::kron(&identity(d.d), &gz));
    let g = vec_of(&(&gm * &vb));
    Ok(PrecoderSurrogate { gamma22, g, mi_bar: mi0 - offset })
}

pub fn precoder_surrogate(inst: &ScenarioInstance, v_bar: &CVec, s: &CVec, mi0: f64) -> Result<PrecoderSurrogate> {
    let cu = CuInterference::new(inst, s)?;
    precoder_surrogate_from(inst, &cu, v_bar, mi0)
}

/// Linear restriction of the rate constraint in the waveform covariance
/// around `S̄ = s̄s̄ᴴ`: `tr(Γ̂ S) ≤ M̂I`.
#[derive(Debug, Clone)]
pub struct WaveformSurrogate {
    pub gamma_hat: CMat,
    pub mi_hat: f64,
}

pub fn waveform_surrogate(inst: &ScenarioInstance, s_bar: &CVec, v: &CMat, mi0: f64) -> Result<WaveformSurrogate> {
    let d = inst.dims();
    let cu = CuInterference::new(inst, s_bar)?;
    let rv = received_signal_cov(inst, v)?;
    let n = d.waveform_len();
    let mut gamma = CMat::zeros(n, n);
    let mut rate = 0.0;
    for ((r, w), pat) in cu.covs.iter().zip(cu.weights()).zip(&cu.patterns) {
        let y = inv_pd(r)? - inv_pd(&(r + &rv))?;
        rate += w * (logdet_pd(&(r + &rv))? - logdet_pd(r)?);
        for ((m, a), path) in pat.iter().zip(&inst.channels().r2c_spatial).zip(&inst.params().r2c) {
            if let Some(m) = *m {
                let blk = (a.adjoint() * &y * a).scale(w * path.sigma_sq);
                let mut view = gamma.view_mut((m * d.mt, m * d.mt), (d.mt, d.mt));
                view += &blk;
            }
        }
    }
    let gamma_hat = hermitize(&gamma);
    let mi_hat = rate + s_bar.dotc(&(&gamma_hat * s_bar)).re - mi0;
    Ok(WaveformSurrogate { gamma_hat, mi_hat })
}

/// `Π = I_D ⊗ Σ_g σ²_g T_gᴴ (Σ_i W_ii) T_g`, so that `vᴴΠv = r(V) − σ_r²‖w‖²`.
pub fn pi_matrix(inst: &ScenarioInstance, w: &CVec) -> Result<CMat> {
    let d = inst.dims();
    check_len("filter", w.len(), d.filter_len())?;
    let wsum = filter_blocks(d, w).into_iter().fold(CMat::zeros(d.mr, d.mr), |a, b| a + b);
    let mut inner = CMat::zeros(d.nt, d.nt);
    for (t, path) in inst.channels().t_cr.iter().zip(&inst.params().c2r) {
        inner += (t.adjoint() * &wsum * t).scale(path.sigma_sq);
    }
    Ok(hermitize(&crate::linalg::kron(&identity(d.d), &inner)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, cr, herm_eigenvalues, lambda_min};
    use crate::scenario::ScenarioConfig;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_cvec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> CVec {
        CVec::from_fn(n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale)
    }

    fn setup(seed: u64) -> (ScenarioInstance, CVec, CVec, ChaCha8Rng) {
        let inst = ScenarioConfig::default().sample(seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
        let d = *inst.dims();
        let v = rand_cvec(&mut rng, d.precoder_len(), 0.2);
        let s = rand_cvec(&mut rng, d.waveform_len(), 0.5);
        (inst, v, s, rng)
    }

    #[test]
    fn silent_radar_gives_noise_floor() {
        let (inst, _, s, _) = setup(1);
        let zero = s.map(|_| cr(0.0));
        let r = radar_interference_cov_at_k(&inst, &zero, 5).unwrap();
        assert!((r - identity(4)).camax() < 1e-15);
        assert!(radar_interference_cov_at_k(&inst, &s, 0).is_err());
        let r = radar_interference_cov_at_k(&inst, &s, 7).unwrap();
        assert!(lambda_min(&r) >= 1.0 - 1e-10);
    }

    #[test]
    fn zero_precoder_has_zero_rate() {
        let (inst, _, s, _) = setup(2);
        let v = CMat::zeros(10, 4);
        assert!(avg_rate(&inst, &s, &v).unwrap().abs() < 1e-14);
    }

    #[test]
    fn cached_covariances_match_per_instant() {
        let (inst, v, s, _) = setup(3);
        let vm = unvec_precoder(inst.dims(), &v).unwrap();
        let rv = received_signal_cov(&inst, &vm).unwrap();
        let mut direct = 0.0;
        for k in 1..=60 {
            let r = radar_interference_cov_at_k(&inst, &s, k).unwrap();
            direct += logdet_pd(&(&r + &rv)).unwrap() - logdet_pd(&r).unwrap();
        }
        direct /= 60.0;
        let fast = avg_rate(&inst, &s, &vm).unwrap();
        assert!((fast - direct).abs() < 1e-12 * direct.abs());
    }

    #[test]
    fn delta_identity() {
        let (inst, v, _, _) = setup(4);
        let delta = delta_matrix(&inst);
        assert!(crate::linalg::hermitian_defect(&delta) < 1e-14);
        let ev = herm_eigenvalues(&delta);
        assert!(*ev.last().unwrap() > -1e-12);
        let lhs = kron_eye_col(4, &v).transpose() * &delta * kron_eye_col(4, &v.conjugate());
        let rv = received_signal_cov(&inst, &unvec_precoder(inst.dims(), &v).unwrap()).unwrap();
        assert!((lhs - rv).camax() < 1e-12);
    }

    #[test]
    fn block_form_matches_rate() {
        let (inst, v, s, _) = setup(5);
        let a = mi_block(&inst, &v, &s).unwrap();
        let b = avg_rate(&inst, &s, &unvec_precoder(inst.dims(), &v).unwrap()).unwrap();
        assert!((a - b).abs() < 1e-8 * b.abs());
    }

    #[test]
    fn ek_at_zero_is_block_diagonal() {
        let (inst, v, s, _) = setup(6);
        let e = ek_matrix(&inst, &v.map(|_| cr(0.0)), &s, 3).unwrap();
        let n = 160;
        assert!(e.view((0, n), (n, 4)).camax() == 0.0);
        let r = radar_interference_cov_at_k(&inst, &s, 3).unwrap();
        assert!((e.view((n, n), (4, 4)) - r).camax() < 1e-15);
    }

    #[test]
    fn precoder_surrogate_is_tight_and_minorant() {
        let (inst, v, s, mut rng) = setup(7);
        let d = *inst.dims();
        let mi0 = 3.0;
        let sur = precoder_surrogate(&inst, &v, &s, mi0).unwrap();
        let rate = |x: &CVec| avg_rate(&inst, &s, &unvec_precoder(&d, x).unwrap()).unwrap();
        assert!((sur.rate_lower_bound(&v, mi0) - rate(&v)).abs() < 1e-10);
        for _ in 0..20 {
            let x = rand_cvec(&mut rng, d.precoder_len(), 0.3);
            assert!(rate(&x) >= sur.rate_lower_bound(&x, mi0) - 1e-9);
        }
        assert!(lambda_min(&sur.gamma22) > -1e-10);
    }

    #[test]
    fn waveform_surrogate_properties() {
        let (inst, v, s, mut rng) = setup(8);
        let d = *inst.dims();
        let vm = unvec_precoder(&d, &v).unwrap();
        let zero = CMat::zeros(d.nt, d.d);
        assert!(waveform_surrogate(&inst, &s, &zero, 0.0).unwrap().gamma_hat.camax() < 1e-15);

        let sur = waveform_surrogate(&inst, &s, &vm, 0.0).unwrap();
        assert!(lambda_min(&sur.gamma_hat) > -1e-12);
        let base = avg_rate(&inst, &s, &vm).unwrap();
        for _ in 0..20 {
            let x = rand_cvec(&mut rng, d.waveform_len(), 0.7);
            let bound = base - (x.dotc(&(&sur.gamma_hat * &x)).re - s.dotc(&(&sur.gamma_hat * &s)).re);
            assert!(avg_rate(&inst, &x, &vm).unwrap() >= bound - 1e-9);
        }
    }

    #[test]
    fn pi_identity() {
        let (inst, v, _, mut rng) = setup(9);
        let d = *inst.dims();
        let w = rand_cvec(&mut rng, d.filter_len(), 1.0);
        let pi = pi_matrix(&inst, &w).unwrap();
        let vm = unvec_precoder(&d, &v).unwrap();
        let lhs = v.dotc(&(&pi * &v)).re;
        let rhs = crate::radar::r_of_v(&inst, &w, &vm).unwrap() - w.norm_squared();
        assert!((lhs - rhs).abs() < 1e-10 * rhs.abs());
    }
}
