//! Executable acceptance checks. Each criterion returns a pass flag plus the
//! measured worst case, so failures are reported rather than hidden.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::comm::{avg_rate, mi_block, pi_matrix, precoder_surrogate, vec_precoder, waveform_surrogate};
use crate::driver::{audit, feasible_start, run_codesign, Baseline, CodesignParams, DesignState};
use crate::error::Result;
use crate::experiments::parallel_map;
use crate::kernels::admm::{admm_qcqp, qcqp_via_sdp, AdmmSettings};
use crate::kernels::rank::{numerical_rank, DEFAULT_RANK_TOL};
use crate::kernels::sdp::{solve_sdp, Sense, SdpProblem, SdpSettings, TraceConstraint};
use crate::linalg::{c, hermitize, lambda_max, lambda_min, outer, trace_prod, CMat, CVec};
use crate::precoder::PrecoderDesignParams;
use crate::radar::{design_matrices, r_of_v, radar_sinr, to_db, update_receive_filter};
use crate::scenario::{ScenarioConfig, ScenarioInstance};
use crate::waveform::{reference_waveform_lfm, similarity_step, WaveformMode};

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl std::fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "criterion {:>2} [{tag}] {} ({:.1} s): {}", self.id, self.name, self.seconds, self.detail)
    }
}

pub const NAMES: [&str; 10] = [
    "rate identity via block matrices",
    "interference quadratic form",
    "surrogate minorant and tightness",
    "filter optimality",
    "SDP kernel",
    "rank reduction",
    "ADMM against interior point",
    "monotonicity and termination",
    "trend reproduction",
    "constraint audit",
];

pub fn cgauss(rng: &mut ChaCha8Rng, n: usize) -> CVec {
    let s = 0.5f64.sqrt();
    CVec::from_fn(n, |_, _| c(s * rng.sample::<f64, _>(StandardNormal), s * rng.sample::<f64, _>(StandardNormal)))
}

/// Random vector with squared norm `energy`.
pub fn on_sphere(rng: &mut ChaCha8Rng, n: usize, energy: f64) -> CVec {
    let x = cgauss(rng, n);
    let k = (energy / x.norm_squared()).sqrt();
    x * c(k, 0.0)
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    let g = CMat::from_fn(n, n, |_, _| {
        let v = cgauss(rng, 1);
        v[0]
    });
    hermitize(&g)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// Final metrics and check results of one joint design.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub sinr_db: f64,
    pub rate_nats: f64,
    pub outer_iters: usize,
    /// Ended on the outer tolerance rather than the iteration cap.
    pub converged: bool,
    pub violations: Vec<String>,
    pub monotone: Vec<String>,
    pub wall_s: f64,
}

/// Monotonicity breaks in the logged traces: precoder objective with
/// relative slack 1e-9, waveform SINR with relative slack 1e-9 and outer
/// SINR with relative slack 1e-6.
pub fn monotonicity_breaks(st: &DesignState) -> Vec<String> {
    let lin = |db: f64| 10f64.powf(db / 10.0);
    let mut out = Vec::new();
    for (o, tr) in st.precoder_traces.iter().enumerate() {
        for p in tr.windows(2) {
            if p[1].r_of_v > p[0].r_of_v + 1e-9 * p[0].r_of_v.abs().max(1.0) {
                out.push(format!("precoder outer {} iter {}: r(V) {} -> {}", o + 1, p[1].iter, p[0].r_of_v, p[1].r_of_v));
            }
        }
    }
    for (o, tr) in st.waveform_traces.iter().enumerate() {
        for p in tr.windows(2) {
            if lin(p[1].sinr_db) < lin(p[0].sinr_db) * (1.0 - 1e-9) {
                out.push(format!("waveform outer {} iter {}: SINR {} -> {} dB", o + 1, p[1].iter, p[0].sinr_db, p[1].sinr_db));
            }
        }
    }
    for p in st.history.windows(2) {
        if lin(p[1].sinr_db) < lin(p[0].sinr_db) * (1.0 - 1e-6) {
            out.push(format!("outer {}: SINR {} -> {} dB", p[1].outer_iter, p[0].sinr_db, p[1].sinr_db));
        }
    }
    out
}

pub fn record_run(inst: &ScenarioInstance, params: &CodesignParams) -> Result<RunRecord> {
    let t = Instant::now();
    let st = run_codesign(inst, params)?;
    let wall_s = t.elapsed().as_secs_f64();
    let n = st.history.len();
    let converged = n >= 2 && (st.history[n - 1].sinr_db - st.history[n - 2].sinr_db).abs() < params.outer_tol;
    Ok(RunRecord {
        sinr_db: to_db(radar_sinr(inst, &st.w, &st.s, &st.v)?),
        rate_nats: avg_rate(inst, &st.s, &st.v)?,
        outer_iters: st.outer_iter,
        converged,
        violations: audit(inst, params, &st)?,
        monotone: monotonicity_breaks(&st),
        wall_s,
    })
}

/// One joint-design job.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub scenario: ScenarioConfig,
    pub seed: u64,
    pub params: CodesignParams,
}

impl RunSpec {
    fn key(&self) -> String {
        format!(
            "{}|{}|{}",
            serde_json::to_string(&self.scenario).unwrap_or_default(),
            self.seed,
            serde_json::to_string(&self.params).unwrap_or_default()
        )
    }
}

pub struct Validator {
    pub trials: usize,
    pub seed: u64,
    pub scenario: ScenarioConfig,
    pub params: CodesignParams,
    cache: BTreeMap<String, std::result::Result<RunRecord, String>>,
}

impl Default for Validator {
    fn default() -> Self {
        Self::new(10, 0)
    }
}

fn report(id: u8, pass: bool, detail: String, t: Instant) -> CriterionReport {
    CriterionReport { id, name: NAMES[id as usize - 1], pass, detail, seconds: t.elapsed().as_secs_f64() }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Places where `ys` drops by more than the trend slack as `xs` grows.
fn drops(ys: &[f64], xs: &[f64], axis: &str) -> Vec<String> {
    ys.windows(2)
        .zip(xs.windows(2))
        .filter(|(y, _)| y[1] < y[0] - TREND_SLACK_DB)
        .map(|(y, x)| format!("{axis} {} -> {}: {:.7} -> {:.7} dB", x[0], x[1], y[0], y[1]))
        .collect()
}

fn listed(items: &[String]) -> String {
    if items.is_empty() {
        String::new()
    } else {
        format!(" (breaks: {})", items.join(", "))
    }
}

/// Trend comparisons treat means within this many dB as equal.
pub const TREND_SLACK_DB: f64 = 1e-6;

impl Validator {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self { trials, seed, scenario: ScenarioConfig::default(), params: CodesignParams::default(), cache: BTreeMap::new() }
    }

    fn rng(&self, id: u8) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(1000).wrapping_add(id as u64))
    }

    fn instance(&self, k: u64) -> Result<ScenarioInstance> {
        self.scenario.sample(self.seed + k)
    }

    /// Runs the jobs not yet cached and returns all results in order.
    pub fn runs(&mut self, specs: &[RunSpec]) -> Result<Vec<std::result::Result<RunRecord, String>>> {
        let todo: Vec<&RunSpec> = {
            let mut seen = std::collections::BTreeSet::new();
            specs.iter().filter(|s| !self.cache.contains_key(&s.key()) && seen.insert(s.key())).collect()
        };
        let done = parallel_map(&todo, |s| {
            s.scenario.sample(s.seed).and_then(|inst| record_run(&inst, &s.params)).map_err(|e| e.to_string())
        })?;
        for (s, r) in todo.iter().zip(done) {
            self.cache.insert(s.key(), r);
        }
        Ok(specs.iter().map(|s| self.cache[&s.key()].clone()).collect())
    }

    /// Runs `trials` seeds of one configuration; errors become a message.
    fn trial_set(&mut self, scenario: &ScenarioConfig, params: &CodesignParams) -> Result<std::result::Result<Vec<RunRecord>, String>> {
        let specs: Vec<RunSpec> = (0..self.trials as u64)
            .map(|t| RunSpec { scenario: scenario.clone(), seed: self.seed + t, params: params.clone() })
            .collect();
        let out = self.runs(&specs)?;
        let mut ok = Vec::new();
        for (t, r) in out.into_iter().enumerate() {
            match r {
                Ok(r) => ok.push(r),
                Err(e) => return Ok(Err(format!("trial {t}: {e}"))),
            }
        }
        Ok(Ok(ok))
    }

    fn mean_sinr(&mut self, scenario: &ScenarioConfig, params: &CodesignParams) -> Result<std::result::Result<f64, String>> {
        Ok(self.trial_set(scenario, params)?.map(|rs| mean(&rs.iter().map(|r| r.sinr_db).collect::<Vec<_>>())))
    }

    pub fn run(&mut self, id: u8) -> Result<CriterionReport> {
        match id {
            1 => self.rate_identity(),
            2 => self.quadratic_form(),
            3 => self.surrogates(),
            4 => self.filter_optimality(),
            5 => self.sdp_kernel(),
            6 => self.rank_reduction(),
            7 => self.admm_vs_ipm(),
            8 => self.monotonicity(),
            9 => self.trends(),
            10 => self.constraint_audit(),
            _ => Err(crate::Error::OutOfRange(format!("criterion {id}"))),
        }
    }

    /// Criteria in order; a criterion that errors is reported as failed.
    pub fn run_all(&mut self) -> Vec<CriterionReport> {
        (1..=10)
            .map(|id| {
                let t = Instant::now();
                self.run(id).unwrap_or_else(|e| report(id, false, format!("error: {e}"), t))
            })
            .collect()
    }

    fn random_triple(&self, rng: &mut ChaCha8Rng, k: u64) -> Result<(ScenarioInstance, CVec, CVec)> {
        let inst = self.instance(k)?;
        let d = *inst.dims();
        let p = inst.params();
        let (ev, es) = (p.p_b * rng.gen_range(0.1..1.0), p.p_r * rng.gen_range(0.1..1.0));
        let v = on_sphere(rng, d.precoder_len(), ev);
        let s = on_sphere(rng, d.waveform_len(), es);
        Ok((inst, v, s))
    }

    fn rate_identity(&mut self) -> Result<CriterionReport> {
        let t = Instant::now();
        let mut rng = self.rng(1);
        let mut worst = 0f64;
        for k in 0..100 {
            let (inst, v, s) = self.random_triple(&mut rng, k)?;
            let vm = crate::comm::unvec_precoder(inst.dims(), &v)?;
            worst = worst.max(rel(mi_block(&inst, &v, &s)?, avg_rate(&inst, &s, &vm)?));
        }
        let secs = t.elapsed().as_secs_f64();
        Ok(report(1, worst < 1e-8 && secs < 30.0, format!("max relative error {worst:.2e} over 100 triples, {secs:.1} s"), t))
    }

    fn quadratic_form(&mut self) -> Result<CriterionReport> {
        let t = Instant::now();
        let mut rng = self.rng(2);
        let mut worst = 0f64;
        for k in 0..100 {
            let (inst, v, _) = self.random_triple(&mut rng, k)?;
            let w = cgauss(&mut rng, inst.dims().filter_len());
            let vm = crate::comm::unvec_precoder(inst.dims(), &v)?;
            let lhs = crate::linalg::quad_form(&pi_matrix(&inst, &w)?, &v);
            let rhs = r_of_v(&inst, &w, &vm)? - inst.params().sigma_r_sq * w.norm_squared();
            worst = worst.max(rel(lhs, rhs));
        }
        Ok(report(2, worst < 1e-10, format!("max relative error {worst:.2e} over 100 triples"), t))
    }

    /// Both surrogates: value at the expansion point, lower bound on random
    /// probes, and slope against central differences of the true rate.
    fn surrogates(&mut self) -> Result<CriterionReport> {
        let t = Instant::now();
        let mut rng = self.rng(3);
        let mi0 = self.params.mi0;
        let (mut tight, mut slack, mut fd) = (0f64, f64::INFINITY, 0f64);
        let h = 1e-5;
        for k in 0..10 {
            let (inst, vb, sb) = self.random_triple(&mut rng, k)?;
            let d = *inst.dims();
            let p = inst.params();
            let rate = |v: &CVec, s: &CVec| -> Result<f64> { avg_rate(&inst, s, &crate::comm::unvec_precoder(&d, v)?) };
            let mi_bar = rate(&vb, &sb)?;

            let ps = precoder_surrogate(&inst, &vb, &sb, mi0)?;
            let lb_v = |v: &CVec| ps.rate_lower_bound(v, mi0);
            tight = tight.max((lb_v(&vb) - mi_bar).abs() / mi_bar.abs().max(1.0));

            let vm = crate::comm::unvec_precoder(&d, &vb)?;
            let ws = waveform_surrogate(&inst, &sb, &vm, mi0)?;
            let lb_s = |s: &CVec| ws.mi_hat + mi0 - crate::linalg::quad_form(&ws.gamma_hat, s);
            tight = tight.max((lb_s(&sb) - mi_bar).abs() / mi_bar.abs().max(1.0));

            for j in 0..10 {
                // Half the probes are far away, half near the expansion point.
                let scale = if j % 2 == 0 { 1.0 } else { 1e-2 };
                let (ev, es) = (p.p_b * rng.gen_range(0.0..1.0), p.p_r * rng.gen_range(0.0..1.0));
                let v = if j % 2 == 0 {
                    on_sphere(&mut rng, d.precoder_len(), ev)
                } else {
                    &vb + on_sphere(&mut rng, d.precoder_len(), scale * p.p_b)
                };
                slack = slack.min(rate(&v, &sb)? - lb_v(&v));
                let s = if j % 2 == 0 {
                    on_sphere(&mut rng, d.waveform_len(), es)
                } else {
                    &sb + on_sphere(&mut rng, d.waveform_len(), scale * p.p_r)
                };
                slack = slack.min(rate(&vb, &s)? - lb_s(&s));
            }

            for _ in 0..3 {
                let dv = on_sphere(&mut rng, d.precoder_len(), 1.0);
                let num = (rate(&(&vb + &dv * c(h, 0.0)), &sb)? - rate(&(&vb - &dv * c(h, 0.0)), &sb)?) / (2.0 * h);
                let ana = -2.0 * (vb.dotc(&(&ps.gamma22 * &dv)).re - ps.g.dotc(&dv).re);
                fd = fd.max(rel(num, ana));
                let ds = on_sphere(&mut rng, d.waveform_len(), 1.0);
                let num = (rate(&vb, &(&sb + &ds * c(h, 0.0)))? - rate(&vb, &(&sb - &ds * c(h, 0.0)))?) / (2.0 * h);
                let ana = -2.0 * sb.dotc(&(&ws.gamma_hat * &ds)).re;
                fd = fd.max(rel(num, ana));
            }
        }
        let pass = tight < 1e-10 && slack >= -1e-9 && fd < 1e-4;
        Ok(report(
            3,
            pass,
            format!("tightness {tight:.2e}, min slack {slack:.2e} over 200 probes, slope error {fd:.2e}"),
            t,
        ))
    }

    fn filter_optimality(&mut self) -> Result<CriterionReport> {
        let t = Instant::now();
        let mut rng = self.rng(4);
        let mut violations = 0;
        let mut margin = f64::INFINITY;
        for k in 0..20 {
            let (inst, v, s) = self.random_triple(&mut rng, k)?;
            let vm = crate::comm::unvec_precoder(inst.dims(), &v)?;
            let w = update_receive_filter(&inst, &vm, &s)?;
            let best = radar_sinr(&inst, &w, &s, &vm)?;
            for _ in 0..100 {
                let u = on_sphere(&mut rng, inst.dims().filter_len(), 1.0);
                let other = radar_sinr(&inst, &u, &s, &vm)?;
                margin = margin.min(best / other);
                violations += (other > best) as usize;
            }
        }
        Ok(report(4, violations == 0, format!("{violations} violations in 2000 probes, min SINR ratio {margin:.3}"), t))
    }

    fn sdp_kernel(&mut self) -> Result<CriterionReport> {
        let t = Instant::now();
        let mut rng = self.rng(5);
        let settings = SdpSettings::default();
        let mut worst = 0f64;
        let mut failures = Vec::new();
        for i in 0..50 {
            let (p, _) = planted_sdp(&mut rng);
            match solve_sdp(&p, &settings) {
                Ok(sol) => worst = worst.max(kkt_check(&p, &sol.s, &sol.y)),
                Err(e) => failures.push(format!("instance {i}: {e}")),
            }
        }
        // Largest eigenvalue and minimum trace against a rank-one cut.
        let n = 6;
        let cm = random_hermitian(&mut rng, n) + CMat::identity(n, n) * c(3.0, 0.0);
        let lmax = SdpProblem {
            n,
            objective: cm.clone(),
            maximize: true,
            constraints: vec![TraceConstraint::new(CMat::identity(n, n), Sense::Le, 1.0)],
        };
        let e1 = solve_sdp(&lmax, &settings).map(|s| (s.obj - lambda_max(&cm)).abs()).unwrap_or(f64::INFINITY);
        let q = cgauss(&mut rng, n);
        let mt = SdpProblem {
            n,
            objective: CMat::identity(n, n),
            maximize: false,
            constraints: vec![TraceConstraint::new(outer(&q, &q), Sense::Ge, 1.0)],
        };
        let e2 = solve_sdp(&mt, &settings).map(|s| (s.obj - 1.0 / q.norm_squared()).abs()).unwrap_or(f64::INFINITY);
        let pass = failures.is_empty() && worst < 1e-7 && e1 < 1e-8 && e2 < 1e-8;
        let mut detail =
            format!("worst KKT/gap {worst:.2e} over {} instances, closed-form errors {e1:.2e} and {e2:.2e}", 50 - failures.len());
        if !failures.is_empty() {
            detail.push_str(&format!("; failed: {}", failures.join("; ")));
        }
        Ok(report(5, pass, detail, t))
    }

    fn rank_reduction(&mut self) -> Result<CriterionReport> {
        let t = Instant::now();
        let pp = self.params.precoder_params();
        let wp = self.params.waveform_params();
        let settings = SdpSettings::default();
        let mut bad = Vec::new();
        let mut drift = 0f64;
        let mut rank_one_sp = 0;
        let mut errors = Vec::new();
        for (label, scenario) in [("multipath", self.scenario.clone()), ("single-path", self.scenario.single_path())] {
            for k in 0..20u64 {
                let step = scenario.sample(self.seed + k).and_then(|inst| {
                    let st = feasible_start(&inst, &pp)?;
                    let dm = design_matrices(&inst, &st.w, &st.v)?;
                    let sur = waveform_surrogate(&inst, &st.s, &st.v, wp.mi0)?;
                    let s0 = reference_waveform_lfm(inst.dims(), inst.params().p_r);
                    similarity_step(&dm, &sur, &s0, inst.params().p_r, wp.epsilon, &settings)
                });
                let step = match step {
                    Ok(s) => s,
                    Err(e) => {
                        errors.push(format!("{label} seed {k}: {e}"));
                        continue;
                    }
                };
                if label == "single-path" {
                    rank_one_sp += (step.rank_before == 1) as usize;
                    continue;
                }
                if numerical_rank(&step.reduced, DEFAULT_RANK_TOL) != 1 {
                    bad.push(format!("seed {k} rank {}", numerical_rank(&step.reduced, DEFAULT_RANK_TOL)));
                }
                for con in &step.constraints {
                    let before = trace_prod(&con.a, &step.s2);
                    let after = trace_prod(&con.a, &step.reduced);
                    let scale = con.b.abs().max(1.0);
                    // Active constraints must hold their value; inactive ones
                    // only need to stay satisfied.
                    let active = (before - con.b).abs() <= 1e-6 * scale;
                    let d = if active { (after - before).abs() / scale } else { ((after - con.b) / scale).max(0.0) };
                    drift = drift.max(d);
                }
                let p_before = crate::linalg::trace_re(&step.s2);
                let p_after = crate::linalg::trace_re(&step.reduced);
                drift = drift.max(((p_after - p_before) / p_before.max(1.0)).max(0.0));
            }
        }
        let pass = errors.is_empty() && bad.is_empty() && drift < 1e-8 && rank_one_sp >= 19;
        let mut detail = format!("non-rank-one outputs {}, max drift {drift:.2e}, single-path rank one before reduction {rank_one_sp}/20", bad.len());
        if !errors.is_empty() {
            detail.push_str(&format!("; errors: {}", errors.join("; ")));
        }
        Ok(report(6, pass, detail, t))
    }

    fn admm_vs_ipm(&mut self) -> Result<CriterionReport> {
        let t = Instant::now();
        let pp: PrecoderDesignParams = self.params.precoder_params();
        let admm = AdmmSettings { rho_bar: pp.rho_bar, tol: pp.admm_tol, max_iter: pp.admm_max, adaptive: true };
        let (mut worst, mut resid) = (0f64, 0f64);
        let mut unconverged = 0;
        for k in 0..20 {
            let inst = self.instance(k)?;
            let st = feasible_start(&inst, &pp)?;
            let vb = vec_precoder(&st.v);
            let pi = pi_matrix(&inst, &st.w)?;
            let sur = precoder_surrogate(&inst, &vb, &st.s, pp.mi0)?;
            let out = admm_qcqp(&pi, inst.params().p_b, &sur, &vb, &admm)?;
            let (_, reference) = qcqp_via_sdp(&pi, inst.params().p_b, &sur, &SdpSettings::default())?;
            // The objective is r(V), which carries the filter noise term.
            let noise = inst.params().sigma_r_sq * st.w.norm_squared();
            let got = crate::linalg::quad_form(&pi, &out.state.v) + noise;
            worst = worst.max(rel(got, reference + noise));
            resid = resid.max(out.state.primal_residual).max(out.state.dual_residual);
            unconverged += (!out.converged) as usize;
        }
        let pass = worst < 1e-4 && resid < 1e-6 && unconverged == 0;
        Ok(report(7, pass, format!("max relative objective gap {worst:.2e}, max residual {resid:.2e}, {unconverged} unconverged"), t))
    }

    fn monotonicity(&mut self) -> Result<CriterionReport> {
        let t = Instant::now();
        let mut problems = Vec::new();
        let mut slowest = 0f64;
        let mut count = 0;
        for mode in [WaveformMode::Similarity, WaveformMode::Papr] {
            let params = CodesignParams { mode, ..self.params.clone() };
            let specs: Vec<RunSpec> = (0..self.trials as u64)
                .map(|k| RunSpec { scenario: self.scenario.clone(), seed: self.seed + k, params: params.clone() })
                .collect();
            for (k, r) in self.runs(&specs)?.into_iter().enumerate() {
                count += 1;
                match r {
                    Ok(r) => {
                        slowest = slowest.max(r.wall_s);
                        for m in &r.monotone {
                            problems.push(format!("{mode:?} seed {k}: {m}"));
                        }
                        if !r.converged {
                            problems.push(format!("{mode:?} seed {k}: hit the cap of {} outer iterations", r.outer_iters));
                        }
                    }
                    Err(e) => problems.push(format!("{mode:?} seed {k}: {e}")),
                }
            }
        }
        let pass = problems.is_empty() && slowest < 300.0;
        let mut detail = format!("{count} runs, slowest {slowest:.1} s, issues {}", problems.len());
        if !problems.is_empty() {
            detail.push_str(&format!(": {}", problems.join("; ")));
        }
        Ok(report(8, pass, detail, t))
    }

    fn trends(&mut self) -> Result<CriterionReport> {
        let t = Instant::now();
        let base = self.params.clone();
        let sc = self.scenario.clone();
        let mut parts = Vec::new();
        let mut pass = true;
        let note = |pass: &mut bool, ok: bool, msg: String, parts: &mut Vec<String>| {
            *pass &= ok;
            parts.push(format!("{}{msg}", if ok { "" } else { "FAILED " }));
        };

        // (a) multipath gain
        let mp = self.mean_sinr(&sc, &base)?;
        let sp = self.mean_sinr(&sc.single_path(), &base)?;
        match (mp, sp) {
            (Ok(mp), Ok(sp)) => note(&mut pass, mp > sp, format!("(a) multipath {mp:.3} dB vs single-path {sp:.3} dB"), &mut parts),
            (a, b) => note(&mut pass, false, format!("(a) runs failed: {:?} {:?}", a.err(), b.err()), &mut parts),
        }

        // (b) joint against baselines at low and high radar INR
        let mut gaps = Vec::new();
        for inr in [0.0, 30.0] {
            let s = ScenarioConfig { inr_r_db: inr, ..sc.clone() };
            let mut means = Vec::new();
            for b in [Baseline::NONE, Baseline::FIXED_V, Baseline::FIXED_S, Baseline::FIXED_W] {
                means.push(self.mean_sinr(&s, &CodesignParams { baseline: b, ..base.clone() })?);
            }
            match means.iter().cloned().collect::<std::result::Result<Vec<f64>, String>>() {
                Ok(m) => {
                    let ok = m[1..].iter().all(|&x| m[0] >= x - TREND_SLACK_DB);
                    note(&mut pass, ok, format!("(b) INR {inr} dB: joint {:.3}, fixed V {:.3}, fixed s {:.3}, fixed w {:.3}", m[0], m[1], m[2], m[3]), &mut parts);
                    gaps.push(m[0] - m[1]);
                }
                Err(e) => note(&mut pass, false, format!("(b) INR {inr} dB runs failed: {e}"), &mut parts),
            }
        }
        if gaps.len() == 2 {
            note(&mut pass, gaps[1] > gaps[0], format!("(b) joint minus fixed V gap {:.3} dB at 0 dB, {:.3} dB at 30 dB", gaps[0], gaps[1]), &mut parts);
        }

        // (c) similarity tolerance and rate floor
        let eps = [0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
        let mut table: Vec<Vec<f64>> = Vec::new();
        let mut ok_runs = true;
        for mi0 in [7.0, 8.0] {
            let mut row = Vec::new();
            for &e in &eps {
                let mut p = CodesignParams { mode: WaveformMode::Similarity, mi0, ..base.clone() };
                p.waveform.epsilon = e;
                match self.mean_sinr(&sc, &p)? {
                    Ok(x) => row.push(x),
                    Err(err) => {
                        ok_runs = false;
                        parts.push(format!("FAILED (c) MI0 {mi0} epsilon {e}: {err}"));
                        row.push(f64::NAN);
                    }
                }
            }
            table.push(row);
        }
        pass &= ok_runs;
        if ok_runs {
            let mut breaks = Vec::new();
            for (r, mi0) in table.iter().zip([7, 8]) {
                breaks.extend(drops(r, &eps, "epsilon").into_iter().map(|b| format!("MI0 {mi0} {b}")));
            }
            let above: Vec<String> = (0..eps.len())
                .filter(|&j| table[1][j] > table[0][j] + TREND_SLACK_DB)
                .map(|j| format!("epsilon {}: {:.7} above {:.7}", eps[j], table[1][j], table[0][j]))
                .collect();
            let fmt = |r: &Vec<f64>| r.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" ");
            note(
                &mut pass,
                breaks.is_empty(),
                format!("(c) SINR over epsilon, MI0 7: [{}], MI0 8: [{}]{}", fmt(&table[0]), fmt(&table[1]), listed(&breaks)),
                &mut parts,
            );
            note(&mut pass, above.is_empty(), format!("(c) MI0 8 never above MI0 7{}", listed(&above)), &mut parts);
        }

        // (d) PAPR cap
        let mut row = Vec::new();
        let mut ok_runs = true;
        for eta in 1..=8 {
            let mut p = CodesignParams { mode: WaveformMode::Papr, ..base.clone() };
            p.waveform.eta = eta as f64;
            match self.mean_sinr(&sc, &p)? {
                Ok(x) => row.push(x),
                Err(err) => {
                    ok_runs = false;
                    parts.push(format!("FAILED (d) eta {eta}: {err}"));
                }
            }
        }
        pass &= ok_runs;
        if ok_runs {
            let etas: Vec<f64> = (1..=8).map(f64::from).collect();
            let breaks = drops(&row, &etas, "eta");
            let shown = row.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" ");
            note(&mut pass, breaks.is_empty(), format!("(d) SINR over eta: [{shown}]{}", listed(&breaks)), &mut parts);
        }
        Ok(report(9, pass, parts.join("; "), t))
    }

    /// Audits every design produced so far, running criteria 8 and 9 first
    /// if they have not been.
    fn constraint_audit(&mut self) -> Result<CriterionReport> {
        let t = Instant::now();
        if self.cache.is_empty() {
            self.monotonicity()?;
            self.trends()?;
        }
        let mut problems = Vec::new();
        for (i, r) in self.cache.values().enumerate() {
            match r {
                Ok(r) => problems.extend(r.violations.iter().map(|v| format!("run {i}: {v}"))),
                Err(e) => problems.push(format!("run {i} produced no design: {e}")),
            }
        }
        let mut detail = format!("{} designs audited, {} violations", self.cache.len(), problems.len());
        if !problems.is_empty() {
            detail.push_str(&format!(": {}", problems.join("; ")));
        }
        Ok(report(10, problems.is_empty(), detail, t))
    }
}

/// Random SDP with a strictly feasible primal point and a strictly feasible
/// dual point, so the optimum exists and strong duality holds. Returns the
/// problem and the planted primal point.
pub fn planted_sdp(rng: &mut ChaCha8Rng) -> (SdpProblem, CMat) {
    let n = rng.gen_range(2..=32);
    let m = rng.gen_range(1..=6);
    let g = CMat::from_fn(n, n, |_, _| cgauss(rng, 1)[0]);
    let s0 = &g * g.adjoint() / c(n as f64, 0.0) + CMat::identity(n, n) * c(0.1, 0.0);
    let h = CMat::from_fn(n, n, |_, _| cgauss(rng, 1)[0]);
    let mut cm = &h * h.adjoint() / c(n as f64, 0.0) + CMat::identity(n, n) * c(0.1, 0.0);
    let mut constraints = Vec::new();
    for _ in 0..m {
        let a = random_hermitian(rng, n);
        let base = trace_prod(&a, &s0);
        let gap = rng.gen_range(0.1..1.0);
        let y = rng.gen_range(0.1..1.0);
        let (sense, b, y) = match rng.gen_range(0..3) {
            0 => (Sense::Le, base + gap, -y),
            1 => (Sense::Ge, base - gap, y),
            _ => (Sense::Eq, base, if rng.gen_bool(0.5) { y } else { -y }),
        };
        cm += &a * c(y, 0.0);
        constraints.push(TraceConstraint::new(a, sense, b));
    }
    let maximize = rng.gen_bool(0.5);
    let objective = if maximize { -cm } else { cm };
    (SdpProblem { n, objective: hermitize(&objective), maximize, constraints }, s0)
}

/// Worst of the relative primal infeasibility, dual infeasibility and
/// duality gap, recomputed from `(S, y)` in complex form.
pub fn kkt_check(p: &SdpProblem, s: &CMat, y: &[f64]) -> f64 {
    let sign = if p.maximize { -1.0 } else { 1.0 };
    let cm = &p.objective * c(sign, 0.0);
    let mut primal = (-lambda_min(s)).max(0.0) / (1.0 + lambda_max(s).abs());
    let mut z = cm.clone();
    let mut dual_obj = 0.0;
    let mut dual = 0f64;
    for (k, yk) in p.constraints.iter().zip(y) {
        let v = trace_prod(&k.a, s);
        let viol = match k.sense {
            Sense::Eq => (v - k.b).abs(),
            Sense::Le => (v - k.b).max(0.0),
            Sense::Ge => (k.b - v).max(0.0),
        };
        primal = primal.max(viol / (1.0 + k.b.abs()));
        dual = dual.max(match k.sense {
            Sense::Le => yk.max(0.0),
            Sense::Ge => (-yk).max(0.0),
            Sense::Eq => 0.0,
        });
        z -= &k.a * c(*yk, 0.0);
        dual_obj += k.b * yk;
    }
    let cnorm = 1.0 + lambda_max(&cm).abs().max(lambda_min(&cm).abs());
    dual = (dual.max((-lambda_min(&hermitize(&z))).max(0.0))) / cnorm;
    let pobj = trace_prod(&cm, s);
    let gap = (pobj - dual_obj).abs() / (1.0 + pobj.abs() + dual_obj.abs());
    primal.max(dual).max(gap)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_point_is_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let (p, s0) = planted_sdp(&mut rng);
            assert!(p.validate().is_ok());
            for k in &p.constraints {
                let v = trace_prod(&k.a, &s0);
                match k.sense {
                    Sense::Le => assert!(v < k.b),
                    Sense::Ge => assert!(v > k.b),
                    Sense::Eq => assert!((v - k.b).abs() < 1e-9),
                }
            }
        }
    }

    #[test]
    fn kkt_check_flags_a_bad_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (p, _) = planted_sdp(&mut rng);
        let sol = solve_sdp(&p, &SdpSettings::default()).unwrap();
        assert!(kkt_check(&p, &sol.s, &sol.y) < 1e-7);
        let off = &sol.s * c(1.5, 0.0);
        assert!(kkt_check(&p, &off, &sol.y) > 1e-3);
    }

    #[test]
    fn report_format() {
        let r = CriterionReport { id: 3, name: NAMES[2], pass: true, detail: "ok".into(), seconds: 0.3 };
        assert_eq!(r.to_string(), "criterion  3 [PASS] surrogate minorant and tightness (0.3 s): ok");
    }

    #[test]
    fn fast_criteria_pass() {
        let mut v = Validator::new(2, 0);
        for id in [2, 4] {
            let r = v.run(id).unwrap();
            assert!(r.pass, "{r}");
        }
    }
}
