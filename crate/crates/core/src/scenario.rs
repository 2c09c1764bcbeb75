//! Array steering vectors, shift/selection matrices and the channel model of
//! the coexistence scenario, plus seeded sampling of random realizations.
//!
//! Angles are radians everywhere inside the crate. Configuration files carry
//! degrees and are converted when a scenario is sampled.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, cr, identity, kron, CMat, CVec};

/// Array sizes and pulse timing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SystemDims {
    /// Radar transmit antennas.
    pub mt: usize,
    /// Radar receive antennas.
    pub mr: usize,
    /// Base-station antennas.
    pub nt: usize,
    /// User antennas.
    pub nr: usize,
    /// Data streams.
    pub d: usize,
    /// Pulse length in samples.
    pub k_pulse: usize,
    /// Pulse repetition interval in samples.
    pub k_pri: usize,
}

impl Default for SystemDims {
    fn default() -> Self {
        Self { mt: 8, mr: 18, nt: 10, nr: 4, d: 4, k_pulse: 4, k_pri: 60 }
    }
}

impl SystemDims {
    pub fn validate(&self) -> Result<()> {
        let all = [self.mt, self.mr, self.nt, self.nr, self.d, self.k_pulse, self.k_pri];
        if all.iter().any(|&x| x == 0) {
            return Err(Error::InvalidConfig(format!("all dimensions must be positive: {self:?}")));
        }
        if self.d > self.nt.min(self.nr) {
            return Err(Error::InvalidConfig(format!(
                "streams d = {} exceed min(nt, nr) = {}",
                self.d,
                self.nt.min(self.nr)
            )));
        }
        if self.k_pulse > self.k_pri {
            return Err(Error::InvalidConfig("pulse longer than the PRI".into()));
        }
        Ok(())
    }

    /// Length of the space-time waveform `s` (K·M_T).
    pub fn waveform_len(&self) -> usize {
        self.k_pulse * self.mt
    }

    /// Length of the space-time filter `w` (M_R·K).
    pub fn filter_len(&self) -> usize {
        self.mr * self.k_pulse
    }

    /// Length of the vectorized precoder (N_T·D).
    pub fn precoder_len(&self) -> usize {
        self.nt * self.d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NlosPath {
    pub theta: f64,
    pub sigma_sq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetPaths {
    pub theta0: f64,
    pub sigma_alpha0_sq: f64,
    pub nlos: Vec<NlosPath>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClutterPath {
    pub theta: f64,
    pub tau: i64,
    pub sigma_sq: f64,
}

/// Base station to radar receiver path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommToRadarPath {
    pub dod: f64,
    pub doa: f64,
    pub sigma_sq: f64,
}

/// Base station to user path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommPath {
    pub dod: f64,
    pub doa: f64,
    pub sigma_sq: f64,
}

/// Radar transmitter to user path, with its delay in samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadarToCommPath {
    pub doa: f64,
    pub dod: f64,
    pub tau: usize,
    pub sigma_sq: f64,
}

/// Everything that defines one realization, before channel matrices are built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    pub dims: SystemDims,
    pub target: TargetPaths,
    pub clutter: Vec<ClutterPath>,
    pub c2r: Vec<CommToRadarPath>,
    pub comm: Vec<CommPath>,
    pub r2c: Vec<RadarToCommPath>,
    pub sigma_r_sq: f64,
    pub sigma_c_sq: f64,
    pub p_r: f64,
    pub p_b: f64,
}

/// Cached channel matrices.
#[derive(Debug, Clone)]
pub struct Channels {
    /// `H_0, H_1, …, H_J` (M_R·K × M_T·K).
    pub target: Vec<CMat>,
    /// `σ²_{α,0}, σ²_{α,1}, …` matching `target`.
    pub target_power: Vec<f64>,
    /// `H̃_q`.
    pub clutter: Vec<CMat>,
    /// `T_cr^g = b_r(ϕ) a_tᵀ(φ)` (M_R × N_T).
    pub t_cr: Vec<CMat>,
    /// `H_cr^g = I_K ⊗ T_cr^g`.
    pub h_cr: Vec<CMat>,
    /// `G_l = a_r a_tᵀ` (N_R × N_T).
    pub g_comm: Vec<CMat>,
    /// `a_r(φ_rc) b_tᵀ(ϕ_rc)` (N_R × M_T), the spatial part of `G_rc^i(k)`.
    pub r2c_spatial: Vec<CMat>,
}

/// One immutable scenario realization with all channel matrices cached.
#[derive(Debug, Clone)]
pub struct ScenarioInstance {
    params: ScenarioParams,
    channels: Channels,
}

/// Uniform-array steering vector: entry m is `e^{−jπ m sin θ}/√n`.
pub fn steering_vector(n: usize, angle: f64) -> CVec {
    let scale = 1.0 / (n as f64).sqrt();
    let phase = -PI * angle.sin();
    CVec::from_fn(n, |m, _| {
        let p = phase * m as f64;
        c(p.cos() * scale, p.sin() * scale)
    })
}

/// `J_k`: ones where `i − j = k`; zero when `|k| ≥ size`.
pub fn shift_matrix(size: usize, k: i64) -> CMat {
    CMat::from_fn(size, size, |i, j| if i as i64 - j as i64 == k { cr(1.0) } else { cr(0.0) })
}

/// The K × K̃ selection matrix `L_i` that picks which pulse sample reaches
/// the user at each instant of the PRI, for a path delayed by `tau` samples.
pub fn selection_matrix(k_pulse: usize, k_pri: usize, tau: usize) -> Result<CMat> {
    if tau >= k_pri {
        return Err(Error::OutOfRange(format!("delay {tau} outside 0..{k_pri}")));
    }
    let mut l = CMat::zeros(k_pulse, k_pri);
    if tau <= k_pri - k_pulse {
        // [0_{K,τ}  I_K  0]
        for i in 0..k_pulse {
            l[(i, tau + i)] = cr(1.0);
        }
    } else {
        // [J_{K̃−τ}  0_{K,K̃−2K}  J_{K̃−τ−K}]
        let first = shift_matrix(k_pulse, (k_pri - tau) as i64);
        let last = shift_matrix(k_pulse, k_pri as i64 - tau as i64 - k_pulse as i64);
        l.view_mut((0, 0), (k_pulse, k_pulse)).copy_from(&first);
        l.view_mut((0, k_pri - k_pulse), (k_pulse, k_pulse)).copy_from(&last);
    }
    Ok(l)
}

/// Zero-based pulse sample seen at zero-based instant `k` of the PRI through
/// a path of delay `tau`, or `None` while the radar is silent on that path.
pub fn delayed_sample(k_pulse: usize, k_pri: usize, tau: usize, k: usize) -> Option<usize> {
    let idx = (k + k_pri - tau % k_pri) % k_pri;
    (idx < k_pulse).then_some(idx)
}

fn check_angle(what: &str, a: f64) -> Result<()> {
    if !a.is_finite() || a.abs() > FRAC_PI_2 + 1e-12 {
        return Err(Error::InvalidConfig(format!("{what} angle {a} outside [-π/2, π/2]")));
    }
    Ok(())
}

fn check_power(what: &str, p: f64) -> Result<()> {
    if !(p.is_finite() && p >= 0.0) {
        return Err(Error::InvalidConfig(format!("{what} power {p} must be finite and nonnegative")));
    }
    Ok(())
}

impl ScenarioParams {
    pub fn validate(&self) -> Result<()> {
        let d = &self.dims;
        d.validate()?;
        check_angle("target", self.target.theta0)?;
        check_power("target", self.target.sigma_alpha0_sq)?;
        for p in &self.target.nlos {
            check_angle("patch", p.theta)?;
            check_power("patch", p.sigma_sq)?;
        }
        for q in &self.clutter {
            check_angle("clutter", q.theta)?;
            check_power("clutter", q.sigma_sq)?;
            if q.tau.unsigned_abs() as usize >= d.k_pulse {
                return Err(Error::InvalidConfig(format!(
                    "clutter delay {} must satisfy |tau| <= K-1 = {}",
                    q.tau,
                    d.k_pulse - 1
                )));
            }
        }
        for g in &self.c2r {
            check_angle("comm-to-radar DoD", g.dod)?;
            check_angle("comm-to-radar DoA", g.doa)?;
            check_power("comm-to-radar", g.sigma_sq)?;
        }
        for l in &self.comm {
            check_angle("comm DoD", l.dod)?;
            check_angle("comm DoA", l.doa)?;
            check_power("comm", l.sigma_sq)?;
        }
        for i in &self.r2c {
            check_angle("radar-to-comm DoA", i.doa)?;
            check_angle("radar-to-comm DoD", i.dod)?;
            check_power("radar-to-comm", i.sigma_sq)?;
            if i.tau >= d.k_pri {
                return Err(Error::InvalidConfig(format!("radar-to-comm delay {} >= PRI", i.tau)));
            }
        }
        if !(self.sigma_r_sq > 0.0 && self.sigma_c_sq > 0.0) {
            return Err(Error::InvalidConfig("noise powers must be positive".into()));
        }
        if !(self.p_r > 0.0 && self.p_b > 0.0) {
            return Err(Error::InvalidConfig("power budgets must be positive".into()));
        }
        Ok(())
    }
}

/// Materializes every channel matrix of a realization.
pub fn build_channels(p: &ScenarioParams) -> Result<Channels> {
    p.validate()?;
    let d = &p.dims;
    let ik = identity(d.k_pulse);
    let bt = |a: f64| steering_vector(d.mt, a);
    let br = |a: f64| steering_vector(d.mr, a);
    let at = |a: f64| steering_vector(d.nt, a);
    let ar = |a: f64| steering_vector(d.nr, a);

    let th0 = p.target.theta0;
    let mut target = vec![kron(&ik, &(br(th0) * bt(th0).transpose()))];
    let mut target_power = vec![p.target.sigma_alpha0_sq];
    for path in &p.target.nlos {
        let spatial = br(th0) * bt(path.theta).transpose() + br(path.theta) * bt(th0).transpose();
        target.push(kron(&ik, &spatial));
        target_power.push(path.sigma_sq);
    }

    let clutter = p
        .clutter
        .iter()
        .map(|q| {
            let spatial = br(q.theta) * bt(q.theta).transpose();
            kron(&shift_matrix(d.k_pulse, q.tau).transpose(), &spatial)
        })
        .collect();

    let t_cr: Vec<CMat> = p.c2r.iter().map(|g| br(g.doa) * at(g.dod).transpose()).collect();
    let h_cr = t_cr.iter().map(|t| kron(&ik, t)).collect();
    let g_comm = p.comm.iter().map(|l| ar(l.doa) * at(l.dod).transpose()).collect();
    let r2c_spatial = p.r2c.iter().map(|i| ar(i.doa) * bt(i.dod).transpose()).collect();

    Ok(Channels { target, target_power, clutter, t_cr, h_cr, g_comm, r2c_spatial })
}

impl ScenarioInstance {
    pub fn new(params: ScenarioParams) -> Result<Self> {
        let channels = build_channels(&params)?;
        Ok(Self { params, channels })
    }

    pub fn params(&self) -> &ScenarioParams {
        &self.params
    }

    pub fn channels(&self) -> &Channels {
        &self.channels
    }

    pub fn dims(&self) -> &SystemDims {
        &self.params.dims
    }

    /// Copy of the parameters with a modification applied, rebuilt.
    pub fn with_params(&self, f: impl FnOnce(&mut ScenarioParams)) -> Result<Self> {
        let mut p = self.params.clone();
        f(&mut p);
        Self::new(p)
    }

    /// `G_rc^i(k)` for PRI `p` (both one-based, as in the signal model).
    pub fn radar_to_comm_matrix(&self, i: usize, k: usize, p: usize) -> Result<CMat> {
        let d = &self.params.dims;
        let path = self
            .params
            .r2c
            .get(i)
            .ok_or_else(|| Error::OutOfRange(format!("radar-to-comm path {i}")))?;
        if p == 0 {
            return Err(Error::OutOfRange("PRI index is one-based".into()));
        }
        let local = k as i64 - ((p - 1) * d.k_pri) as i64;
        if local < 1 || local > d.k_pri as i64 {
            return Err(Error::OutOfRange(format!("instant {k} is outside PRI {p}")));
        }
        let l = selection_matrix(d.k_pulse, d.k_pri, path.tau)?;
        let e_t_lt = CMat::from_row_slice(1, d.k_pulse, l.column(local as usize - 1).as_slice());
        let selector = kron(&e_t_lt, &identity(d.mt));
        Ok(&self.channels.r2c_spatial[i] * selector)
    }
}

/// Either an explicit list of angles (degrees) or a count drawn uniformly from
/// a range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AngleSet {
    Fixed(Vec<f64>),
    Random { count: usize, lo_deg: f64, hi_deg: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    fn check(&self, what: &str) -> Result<()> {
        if self.lo > self.hi || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::InvalidRange { what: what.into(), lo: self.lo, hi: self.hi });
        }
        Ok(())
    }

    fn draw(&self, rng: &mut impl Rng) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            rng.gen_range(self.lo..self.hi)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClutterSpec {
    pub count: usize,
    pub angle_deg: Range,
    /// Integer delay range; defaults to `−(K−1)..=K−1`.
    #[serde(default)]
    pub delay: Option<(i64, i64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkSpec {
    pub count: usize,
    pub dod_deg: Range,
    pub doa_deg: Range,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadarToCommSpec {
    pub count: usize,
    pub dod_deg: Range,
    pub doa_deg: Range,
    /// Integer delay range; defaults to `0..=K̃−1`.
    #[serde(default)]
    pub delay: Option<(usize, usize)>,
}

/// Distribution of random scenarios: dimensions, budgets, dB ratios and angle
/// or delay ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub dims: SystemDims,
    pub p_r: f64,
    pub p_b: f64,
    pub sigma_r_sq: f64,
    pub sigma_c_sq: f64,
    pub snr_rd_db: f64,
    pub snr_rid_db: f64,
    pub cnr_db: f64,
    pub inr_r_db: f64,
    pub snr_c_db: f64,
    pub inr_c_db: f64,
    pub theta0_deg: f64,
    pub patches_deg: AngleSet,
    pub clutter: ClutterSpec,
    pub comm_to_radar: LinkSpec,
    pub comm: LinkSpec,
    pub radar_to_comm: RadarToCommSpec,
    /// Number of pulses in the CPI. Recorded only; one PRI is modeled.
    pub pulses: usize,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            dims: SystemDims::default(),
            p_r: 10.0,
            p_b: 1.0,
            sigma_r_sq: 1.0,
            sigma_c_sq: 1.0,
            snr_rd_db: 20.0,
            snr_rid_db: 18.0,
            cnr_db: 30.0,
            inr_r_db: 20.0,
            snr_c_db: 25.0,
            inr_c_db: 40.0,
            theta0_deg: 20.0,
            patches_deg: AngleSet::Fixed(vec![-10.0, -17.0, -25.0]),
            clutter: ClutterSpec { count: 5, angle_deg: Range::new(0.0, 10.0), delay: None },
            comm_to_radar: LinkSpec {
                count: 6,
                dod_deg: Range::new(-90.0, 90.0),
                doa_deg: Range::new(30.0, 50.0),
            },
            comm: LinkSpec { count: 3, dod_deg: Range::new(-90.0, 90.0), doa_deg: Range::new(-90.0, 90.0) },
            radar_to_comm: RadarToCommSpec {
                count: 6,
                dod_deg: Range::new(30.0, 70.0),
                doa_deg: Range::new(-10.0, 20.0),
                delay: None,
            },
            pulses: 1,
            seed: 0,
        }
    }
}

fn db(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

impl ScenarioConfig {
    /// Single-path (line-of-sight only) variant of this configuration.
    pub fn single_path(&self) -> Self {
        Self { patches_deg: AngleSet::Fixed(Vec::new()), ..self.clone() }
    }

    fn check(&self) -> Result<()> {
        self.dims.validate()?;
        if let AngleSet::Random { lo_deg, hi_deg, .. } = self.patches_deg {
            Range::new(lo_deg, hi_deg).check("patch angles")?;
        }
        self.clutter.angle_deg.check("clutter angles")?;
        if let Some((lo, hi)) = self.clutter.delay {
            Range::new(lo as f64, hi as f64).check("clutter delays")?;
        }
        self.comm_to_radar.dod_deg.check("comm-to-radar DoD")?;
        self.comm_to_radar.doa_deg.check("comm-to-radar DoA")?;
        self.comm.dod_deg.check("comm DoD")?;
        self.comm.doa_deg.check("comm DoA")?;
        self.radar_to_comm.dod_deg.check("radar-to-comm DoD")?;
        self.radar_to_comm.doa_deg.check("radar-to-comm DoA")?;
        if let Some((lo, hi)) = self.radar_to_comm.delay {
            Range::new(lo as f64, hi as f64).check("radar-to-comm delays")?;
        }
        Ok(())
    }

    /// Draws one realization. A pure function of `(self, seed)`.
    pub fn sample(&self, seed: u64) -> Result<ScenarioInstance> {
        self.check()?;
        let dims = self.dims;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rad = |deg: f64| deg.to_radians();

        let sa0 = self.sigma_r_sq * db(self.snr_rd_db) / self.p_r;
        let saj = self.sigma_r_sq * db(self.snr_rid_db) / self.p_r;
        let sq = self.sigma_r_sq * db(self.cnr_db) / self.p_r;
        let sb = self.sigma_r_sq * db(self.inr_r_db) / self.p_b;
        let su = self.sigma_c_sq * db(self.snr_c_db) / self.p_b;
        let sg = self.sigma_c_sq * db(self.inr_c_db) / self.p_r;

        let patch_angles: Vec<f64> = match &self.patches_deg {
            AngleSet::Fixed(list) => list.clone(),
            AngleSet::Random { count, lo_deg, hi_deg } => {
                let r = Range::new(*lo_deg, *hi_deg);
                (0..*count).map(|_| r.draw(&mut rng)).collect()
            }
        };
        let nlos = patch_angles.iter().map(|&a| NlosPath { theta: rad(a), sigma_sq: saj }).collect();

        let kmax = dims.k_pulse as i64 - 1;
        let (dlo, dhi) = self.clutter.delay.unwrap_or((-kmax, kmax));
        let clutter = (0..self.clutter.count)
            .map(|_| {
                let theta = rad(self.clutter.angle_deg.draw(&mut rng));
                let tau = rng.gen_range(dlo..=dhi);
                ClutterPath { theta, tau, sigma_sq: sq }
            })
            .collect();

        let c2r = (0..self.comm_to_radar.count)
            .map(|_| {
                let doa = rad(self.comm_to_radar.doa_deg.draw(&mut rng));
                let dod = rad(self.comm_to_radar.dod_deg.draw(&mut rng));
                CommToRadarPath { dod, doa, sigma_sq: sb }
            })
            .collect();

        let comm = (0..self.comm.count)
            .map(|_| {
                let doa = rad(self.comm.doa_deg.draw(&mut rng));
                let dod = rad(self.comm.dod_deg.draw(&mut rng));
                CommPath { dod, doa, sigma_sq: su }
            })
            .collect();

        let (tlo, thi) = self.radar_to_comm.delay.unwrap_or((0, dims.k_pri - 1));
        let r2c = (0..self.radar_to_comm.count)
            .map(|_| {
                let tau = rng.gen_range(tlo..=thi);
                let doa = rad(self.radar_to_comm.doa_deg.draw(&mut rng));
                let dod = rad(self.radar_to_comm.dod_deg.draw(&mut rng));
                RadarToCommPath { doa, dod, tau, sigma_sq: sg }
            })
            .collect();

        ScenarioInstance::new(ScenarioParams {
            dims,
            target: TargetPaths { theta0: rad(self.theta0_deg), sigma_alpha0_sq: sa0, nlos },
            clutter,
            c2r,
            comm,
            r2c,
            sigma_r_sq: self.sigma_r_sq,
            sigma_c_sq: self.sigma_c_sq,
            p_r: self.p_r,
            p_b: self.p_b,
        })
    }
}

/// Draws a realization from `config` with the given seed.
pub fn sample_scenario(config: &ScenarioConfig, seed: u64) -> Result<ScenarioInstance> {
    config.sample(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn close(a: crate::linalg::C64, b: crate::linalg::C64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn steering_examples() {
        let s = steering_vector(4, 0.0);
        assert!(s.iter().all(|&z| close(z, cr(0.5))));

        let s = steering_vector(2, FRAC_PI_2);
        assert!(close(s[0], cr(FRAC_1_SQRT_2)) && close(s[1], cr(-FRAC_1_SQRT_2)));

        let s = steering_vector(3, PI / 6.0);
        let k = 1.0 / 3f64.sqrt();
        assert!(close(s[0], cr(k)));
        assert!(close(s[1], c(0.0, -k)));
        assert!(close(s[2], cr(-k)));
    }

    #[test]
    fn shift_examples() {
        assert_eq!(shift_matrix(3, 0), identity(3));
        let j1 = shift_matrix(3, 1);
        let ones: Vec<_> = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .filter(|&(i, j)| j1[(i, j)] == cr(1.0))
            .collect();
        assert_eq!(ones, vec![(1, 0), (2, 1)]);
        assert_eq!(shift_matrix(3, 5), CMat::zeros(3, 3));
    }

    #[test]
    fn scalar_channel() {
        let p = ScenarioParams {
            dims: SystemDims { mt: 1, mr: 1, nt: 1, nr: 1, d: 1, k_pulse: 1, k_pri: 2 },
            target: TargetPaths { theta0: 0.0, sigma_alpha0_sq: 1.0, nlos: vec![] },
            clutter: vec![],
            c2r: vec![],
            comm: vec![],
            r2c: vec![],
            sigma_r_sq: 1.0,
            sigma_c_sq: 1.0,
            p_r: 1.0,
            p_b: 1.0,
        };
        let ch = build_channels(&p).unwrap();
        assert_eq!(ch.target.len(), 1);
        assert!(close(ch.target[0][(0, 0)], cr(1.0)));
    }

    #[test]
    fn selection_cases() {
        // τ = 0: column 1 selects the first pulse sample.
        let l = selection_matrix(4, 60, 0).unwrap();
        assert_eq!(l[(0, 0)], cr(1.0));
        // τ in the first regime, instant τ+K+1 (one-based) is past the pulse.
        let tau = 10;
        let l = selection_matrix(4, 60, tau).unwrap();
        assert!(l.column(tau + 4).iter().all(|z| z.norm() == 0.0));
        for t in 0..60 {
            let l = selection_matrix(4, 60, t).unwrap();
            for k in 0..60 {
                let col = l.column(k);
                let nz: Vec<usize> = (0..4).filter(|&i| col[i].norm() > 0.0).collect();
                assert_eq!(nz.first().copied(), delayed_sample(4, 60, t, k), "tau {t} k {k}");
                assert!(nz.len() <= 1);
            }
        }
    }

    #[test]
    fn delay_out_of_range() {
        assert!(selection_matrix(4, 60, 60).is_err());
    }

    #[test]
    fn sampled_powers_follow_db_ratios() {
        let inst = ScenarioConfig::default().sample(1).unwrap();
        let p = inst.params();
        assert!((p.target.sigma_alpha0_sq - 10.0).abs() < 1e-12);
        assert!(p.clutter.iter().all(|q| (q.sigma_sq - 100.0).abs() < 1e-9));
        assert_eq!(p.target.nlos.len(), 3);
        assert_eq!(p.clutter.len(), 5);
        assert!(p.clutter.iter().all(|q| q.tau.abs() <= 3));
    }

    #[test]
    fn sampling_is_deterministic() {
        let cfg = ScenarioConfig::default();
        assert_eq!(cfg.sample(7).unwrap().params(), cfg.sample(7).unwrap().params());
        assert_ne!(cfg.sample(7).unwrap().params(), cfg.sample(8).unwrap().params());
    }

    #[test]
    fn inverted_range_is_rejected() {
        let mut cfg = ScenarioConfig::default();
        cfg.clutter.angle_deg = Range::new(10.0, 0.0);
        assert!(matches!(cfg.sample(0), Err(Error::InvalidRange { .. })));
    }

    #[test]
    fn pri_bounds() {
        let inst = ScenarioConfig::default().sample(3).unwrap();
        assert!(inst.radar_to_comm_matrix(0, 0, 1).is_err());
        assert!(inst.radar_to_comm_matrix(0, 61, 1).is_err());
        assert!(inst.radar_to_comm_matrix(0, 61, 2).is_ok());
    }
}
