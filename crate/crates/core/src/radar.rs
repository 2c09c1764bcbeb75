//! Radar-side metrics: interference covariance, the optimal space-time
//! filter, output SINR, beampattern, and the filter-dependent matrices used
//! by the precoder and waveform designs.

use crate::error::{Error, Result};
use crate::linalg::{herm_eig, hermitize, outer, CMat, CVec};
use crate::scenario::{steering_vector, ScenarioInstance, SystemDims};

/// Matrices that depend on the receive filter `w` (and `V` through `r(V)`).
#[derive(Debug, Clone)]
pub struct RadarDesignMatrices {
    /// `Ψ̃ = Σ_j σ²_j H_jᴴ w wᴴ H_j`.
    pub psi_tilde: CMat,
    /// `R̃ = Σ_q σ²_q H̃_qᴴ w wᴴ H̃_q`.
    pub r_tilde: CMat,
    /// `r(V)`: filtered communication interference plus noise.
    pub r_of_v: f64,
    /// Diagonal blocks `W_ii = w_i w_iᴴ` of `W = wwᴴ` (M_R × M_R each).
    pub w_blocks: Vec<CMat>,
}

pub(crate) fn check_len(what: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::DimensionMismatch(format!("{what}: length {got}, expected {want}")));
    }
    Ok(())
}

pub(crate) fn check_precoder(dims: &SystemDims, v: &CMat) -> Result<()> {
    if v.shape() != (dims.nt, dims.d) {
        return Err(Error::DimensionMismatch(format!(
            "precoder is {}x{}, expected {}x{}",
            v.nrows(),
            v.ncols(),
            dims.nt,
            dims.d
        )));
    }
    Ok(())
}

/// `R(V, s)`.
pub fn interference_covariance(inst: &ScenarioInstance, v: &CMat, s: &CVec) -> Result<CMat> {
    let dims = inst.dims();
    check_precoder(dims, v)?;
    check_len("waveform", s.len(), dims.waveform_len())?;
    let p = inst.params();
    let ch = inst.channels();
    let (mr, k) = (dims.mr, dims.k_pulse);

    let mut block = CMat::zeros(mr, mr);
    for (t, path) in ch.t_cr.iter().zip(&p.c2r) {
        let tv = t * v;
        block += (&tv * tv.adjoint()).scale(path.sigma_sq);
    }
    let mut r = CMat::zeros(mr * k, mr * k);
    for i in 0..k {
        r.view_mut((i * mr, i * mr), (mr, mr)).copy_from(&block);
    }
    for (h, path) in ch.clutter.iter().zip(&p.clutter) {
        let x = h * s;
        r += outer(&x, &x).scale(path.sigma_sq);
    }
    for i in 0..r.nrows() {
        r[(i, i)] += p.sigma_r_sq;
    }
    Ok(hermitize(&r))
}

/// `Ψ(s) = Σ_j σ²_j H_j s sᴴ H_jᴴ`.
pub fn signal_matrix(inst: &ScenarioInstance, s: &CVec) -> Result<CMat> {
    let dims = inst.dims();
    check_len("waveform", s.len(), dims.waveform_len())?;
    let ch = inst.channels();
    let n = dims.filter_len();
    let mut psi = CMat::zeros(n, n);
    for (h, &pw) in ch.target.iter().zip(&ch.target_power) {
        let x = h * s;
        psi += outer(&x, &x).scale(pw);
    }
    Ok(psi)
}

/// Principal generalized eigenvector of `(Ψ, R)` by Cholesky whitening.
/// Returns the normalized filter and the largest generalized eigenvalue.
pub fn max_generalized_eig(psi: &CMat, r: &CMat) -> Result<(CVec, f64)> {
    let chol = hermitize(r)
        .cholesky()
        .ok_or_else(|| Error::NumericalFailure("interference covariance not positive definite".into()))?;
    let l = chol.l();
    let li = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::NumericalFailure("singular Cholesky factor".into()))?;
    let whitened = &li * psi * li.adjoint();
    let eig = herm_eig(&whitened);
    let u = eig.vectors.column(0).into_owned();
    let w = li.adjoint() * u;
    Ok((crate::linalg::normalize_phase(&w), eig.values[0].max(0.0)))
}

/// Optimal filter for fixed `(V, s)`.
pub fn update_receive_filter(inst: &ScenarioInstance, v: &CMat, s: &CVec) -> Result<CVec> {
    let r = interference_covariance(inst, v, s)?;
    let psi = signal_matrix(inst, s)?;
    Ok(max_generalized_eig(&psi, &r)?.0)
}

/// Output SINR (linear) of the filter `w` for waveform `s` and precoder `V`.
pub fn radar_sinr(inst: &ScenarioInstance, w: &CVec, s: &CVec, v: &CMat) -> Result<f64> {
    let dims = inst.dims();
    check_len("filter", w.len(), dims.filter_len())?;
    let r = interference_covariance(inst, v, s)?;
    let ch = inst.channels();
    let num: f64 = ch
        .target
        .iter()
        .zip(&ch.target_power)
        .map(|(h, &pw)| pw * w.dotc(&(h * s)).norm_sqr())
        .sum();
    let den = w.dotc(&(&r * w)).re;
    Ok(num / den)
}

/// SINR evaluated through the waveform-domain matrices:
/// `sᴴΨ̃s / (sᴴR̃s + r(V))`.
pub fn sinr_from_design(dm: &RadarDesignMatrices, s: &CVec) -> f64 {
    let num = s.dotc(&(&dm.psi_tilde * s)).re;
    let den = s.dotc(&(&dm.r_tilde * s)).re + dm.r_of_v;
    num / den
}

pub fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Floor used when reporting gains in dB.
pub const DB_FLOOR: f64 = -100.0;

/// Normalized transmit-receive gain `|wᴴH_0(θ)s|²/(M_T M_R ‖w‖²‖s‖²)` on a grid
/// of angles (radians). Linear scale.
pub fn beampattern(dims: &SystemDims, w: &CVec, s: &CVec, grid: &[f64]) -> Result<Vec<f64>> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("empty beampattern grid".into()));
    }
    check_len("filter", w.len(), dims.filter_len())?;
    check_len("waveform", s.len(), dims.waveform_len())?;
    let (mt, mr, k) = (dims.mt, dims.mr, dims.k_pulse);
    let norm = (mt * mr) as f64 * w.norm_squared() * s.norm_squared();
    if norm <= 0.0 {
        return Err(Error::InvalidConfig("beampattern needs nonzero w and s".into()));
    }
    Ok(grid
        .iter()
        .map(|&theta| {
            let br = steering_vector(mr, theta);
            let bt = steering_vector(mt, theta);
            let amp: crate::linalg::C64 = (0..k)
                .map(|i| {
                    let wi = w.rows(i * mr, mr);
                    let si = s.rows(i * mt, mt);
                    wi.dotc(&br) * bt.dot(&si)
                })
                .sum();
            amp.norm_sqr() / norm
        })
        .collect())
}

/// Beampattern in dB, floored at [`DB_FLOOR`].
pub fn beampattern_db(dims: &SystemDims, w: &CVec, s: &CVec, grid: &[f64]) -> Result<Vec<f64>> {
    Ok(beampattern(dims, w, s, grid)?
        .into_iter()
        .map(|g| if g > 0.0 { to_db(g).max(DB_FLOOR) } else { DB_FLOOR })
        .collect())
}

/// Uniform grid over `[-90°, 90°]` in radians.
pub fn angle_grid(step_deg: f64) -> Vec<f64> {
    let n = (180.0 / step_deg).round() as usize;
    (0..=n).map(|i| (-90.0 + i as f64 * step_deg).to_radians()).collect()
}

/// Diagonal blocks `w_i w_iᴴ` of `wwᴴ`, one per fast-time sample.
pub fn filter_blocks(dims: &SystemDims, w: &CVec) -> Vec<CMat> {
    (0..dims.k_pulse)
        .map(|i| {
            let wi = w.rows(i * dims.mr, dims.mr).into_owned();
            outer(&wi, &wi)
        })
        .collect()
}

/// `r(V)` for a given filter.
pub fn r_of_v(inst: &ScenarioInstance, w: &CVec, v: &CMat) -> Result<f64> {
    let dims = inst.dims();
    check_precoder(dims, v)?;
    check_len("filter", w.len(), dims.filter_len())?;
    let p = inst.params();
    let mut acc = p.sigma_r_sq * w.norm_squared();
    for (t, path) in inst.channels().t_cr.iter().zip(&p.c2r) {
        let tv = (t * v).adjoint();
        for i in 0..dims.k_pulse {
            acc += path.sigma_sq * (&tv * w.rows(i * dims.mr, dims.mr)).norm_squared();
        }
    }
    Ok(acc)
}

pub fn design_matrices(inst: &ScenarioInstance, w: &CVec, v: &CMat) -> Result<RadarDesignMatrices> {
    let dims = inst.dims();
    check_len("filter", w.len(), dims.filter_len())?;
    let ch = inst.channels();
    let n = dims.waveform_len();
    let mut psi_tilde = CMat::zeros(n, n);
    for (h, &pw) in ch.target.iter().zip(&ch.target_power) {
        let x = h.adjoint() * w;
        psi_tilde += outer(&x, &x).scale(pw);
    }
    let mut r_tilde = CMat::zeros(n, n);
    for (h, path) in ch.clutter.iter().zip(&inst.params().clutter) {
        let x = h.adjoint() * w;
        r_tilde += outer(&x, &x).scale(path.sigma_sq);
    }
    Ok(RadarDesignMatrices {
        psi_tilde: hermitize(&psi_tilde),
        r_tilde: hermitize(&r_tilde),
        r_of_v: r_of_v(inst, w, v)?,
        w_blocks: filter_blocks(dims, w),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, lambda_min};
    use crate::scenario::ScenarioConfig;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_cvec(rng: &mut ChaCha8Rng, n: usize) -> CVec {
        CVec::from_fn(n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn rand_cmat(rng: &mut ChaCha8Rng, r: usize, cl: usize) -> CMat {
        CMat::from_fn(r, cl, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn setup(seed: u64) -> (ScenarioInstance, CMat, CVec, ChaCha8Rng) {
        let inst = ScenarioConfig::default().sample(seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
        let d = *inst.dims();
        let v = rand_cmat(&mut rng, d.nt, d.d).scale(0.2);
        let s = rand_cvec(&mut rng, d.waveform_len());
        (inst, v, s, rng)
    }

    #[test]
    fn noise_only_covariance() {
        let (inst, v, s, _) = setup(1);
        let r = interference_covariance(&inst, &(v * crate::linalg::cr(0.0)), &(s * crate::linalg::cr(0.0))).unwrap();
        assert!((r - CMat::identity(72, 72)).camax() < 1e-15);
    }

    #[test]
    fn covariance_floor() {
        let (inst, v, s, _) = setup(2);
        let r = interference_covariance(&inst, &v, &s).unwrap();
        assert!(lambda_min(&r) >= 1.0 - 1e-10);
    }

    #[test]
    fn filter_beats_random_challengers() {
        let (inst, v, s, mut rng) = setup(3);
        let w = update_receive_filter(&inst, &v, &s).unwrap();
        let best = radar_sinr(&inst, &w, &s, &v).unwrap();
        for _ in 0..100 {
            let u = rand_cvec(&mut rng, w.len());
            assert!(radar_sinr(&inst, &u, &s, &v).unwrap() <= best);
        }
        let scaled = w.map(|z| z * c(0.0, -3.0));
        assert!((radar_sinr(&inst, &scaled, &s, &v).unwrap() - best).abs() < 1e-10 * best);
    }

    #[test]
    fn two_sinr_forms_agree() {
        let (inst, v, s, mut rng) = setup(4);
        let w = rand_cvec(&mut rng, inst.dims().filter_len());
        let dm = design_matrices(&inst, &w, &v).unwrap();
        let a = radar_sinr(&inst, &w, &s, &v).unwrap();
        let b = sinr_from_design(&dm, &s);
        assert!((a - b).abs() < 1e-10 * a);
        let r = interference_covariance(&inst, &v, &s).unwrap();
        let lhs = s.dotc(&(&dm.r_tilde * &s)).re + dm.r_of_v;
        assert!((lhs - w.dotc(&(&r * &w)).re).abs() < 1e-10 * lhs);
        let tr: f64 = dm.w_blocks.iter().map(crate::linalg::trace_re).sum();
        assert!((tr - w.norm_squared()).abs() < 1e-12);
    }

    #[test]
    fn scalar_beampattern_is_flat() {
        let dims = SystemDims { mt: 1, mr: 1, nt: 1, nr: 1, d: 1, k_pulse: 1, k_pri: 1 };
        let w = CVec::from_element(1, c(0.3, -2.0));
        let s = CVec::from_element(1, c(1.5, 0.5));
        let g = beampattern(&dims, &w, &s, &angle_grid(10.0)).unwrap();
        assert!(g.iter().all(|x| (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn beampattern_matches_dense_channel() {
        let (inst, _, s, mut rng) = setup(5);
        let dims = *inst.dims();
        let w = rand_cvec(&mut rng, dims.filter_len());
        let theta = inst.params().target.theta0;
        let g = beampattern(&dims, &w, &s, &[theta]).unwrap()[0];
        let h0 = &inst.channels().target[0];
        let dense = w.dotc(&(h0 * &s)).norm_sqr() / ((dims.mt * dims.mr) as f64 * w.norm_squared() * s.norm_squared());
        assert!((g - dense).abs() < 1e-12);
        assert_eq!(angle_grid(0.5).len(), 361);
    }
}
