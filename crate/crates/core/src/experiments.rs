//! Seeded experiment sweeps written as plot-ready CSV.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::driver::{audit, initial_precoder, initialize, run_codesign, Baseline, CodesignParams, DesignState};
use crate::error::{Error, Result};
use crate::precoder::{design_precoder, restore_feasibility};
use crate::radar::{angle_grid, beampattern_db};
use crate::scenario::{ScenarioConfig, ScenarioInstance};
use crate::waveform::WaveformMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    ConvergencePrecoder,
    ConvergenceWaveform,
    SweepInr,
    SweepCnr,
    SweepEpsilonMi0,
    SweepEtaMi0,
    Beampattern,
    Baselines,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::ConvergencePrecoder => "convergence_precoder",
            Self::ConvergenceWaveform => "convergence_waveform",
            Self::SweepInr => "sweep_inr",
            Self::SweepCnr => "sweep_cnr",
            Self::SweepEpsilonMi0 => "sweep_epsilon_mi0",
            Self::SweepEtaMi0 => "sweep_eta_mi0",
            Self::Beampattern => "beampattern",
            Self::Baselines => "baselines",
        }
    }
}

/// Grid values; each experiment reads the axes it needs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Grid {
    pub inr_r_db: Vec<f64>,
    pub cnr_db: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub eta: Vec<f64>,
    pub mi0: Vec<f64>,
    /// Beampattern grid step in degrees.
    pub angle_step_deg: f64,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            inr_r_db: vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
            cnr_db: vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
            epsilon: vec![0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
            eta: vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0],
            mi0: vec![7.0, 8.0],
            angle_step_deg: 0.5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub trials: usize,
    pub seed: u64,
    pub scenario: ScenarioConfig,
    pub codesign: CodesignParams,
    pub grid: Grid,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: ExperimentKind::Baselines,
            trials: 10,
            seed: 0,
            scenario: ScenarioConfig::default(),
            codesign: CodesignParams::default(),
            grid: Grid::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        let g = &self.grid;
        let empty = match self.experiment {
            ExperimentKind::SweepInr => g.inr_r_db.is_empty(),
            ExperimentKind::SweepCnr => g.cnr_db.is_empty(),
            ExperimentKind::SweepEpsilonMi0 => g.epsilon.is_empty() || g.mi0.is_empty(),
            ExperimentKind::SweepEtaMi0 => g.eta.is_empty() || g.mi0.is_empty(),
            ExperimentKind::ConvergencePrecoder => g.mi0.is_empty(),
            ExperimentKind::Beampattern => !(g.angle_step_deg > 0.0),
            _ => false,
        };
        if empty {
            return Err(Error::InvalidConfig(format!("grid for {} is empty", self.experiment.name())));
        }
        self.codesign.validate()
    }
}

/// Outcome of one joint design, with metrics recomputed from `(V, s, w)`.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub sinr_db: f64,
    pub rate_nats: f64,
    pub outer_iters: usize,
    pub hit_cap: bool,
    pub violations: Vec<String>,
    pub wall_s: f64,
}

pub fn summarize(inst: &ScenarioInstance, params: &CodesignParams, st: &DesignState, wall_s: f64) -> Result<RunSummary> {
    let sinr = crate::radar::radar_sinr(inst, &st.w, &st.s, &st.v)?;
    let rate = crate::comm::avg_rate(inst, &st.s, &st.v)?;
    let converged = st.history.len() >= 2 && {
        let n = st.history.len();
        (st.history[n - 1].sinr_db - st.history[n - 2].sinr_db).abs() < params.outer_tol
    };
    Ok(RunSummary {
        sinr_db: crate::radar::to_db(sinr),
        rate_nats: rate,
        outer_iters: st.outer_iter,
        hit_cap: !converged,
        violations: audit(inst, params, st)?,
        wall_s,
    })
}

/// Runs one joint design and summarizes it.
pub fn run_once(inst: &ScenarioInstance, params: &CodesignParams) -> Result<RunSummary> {
    let t = Instant::now();
    let st = run_codesign(inst, params)?;
    summarize(inst, params, &st, t.elapsed().as_secs_f64())
}

/// Worker count from `CRC_THREADS`, defaulting to the available cores.
pub fn thread_count() -> usize {
    std::env::var("CRC_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Maps `f` over `jobs` on a pool sized by [`thread_count`], keeping order.
pub fn parallel_map<T: Sync, R: Send>(jobs: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Result<Vec<R>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count())
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    Ok(pool.install(|| jobs.par_iter().map(&f).collect()))
}

/// Scientific notation with 12 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.11e}")
}

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self { text: format!("{}\n", header.join(",")) }
    }

    pub fn row(&mut self, cells: &[String]) {
        let _ = writeln!(self.text, "{}", cells.join(","));
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, &self.text)?;
        Ok(())
    }
}

/// One aggregated grid point.
#[derive(Debug, Clone, Default)]
pub struct PointStats {
    pub sinr_db: f64,
    pub rate_nats: f64,
    pub outer_iters: f64,
    pub n_ok: usize,
    pub n_failed: usize,
    pub n_violations: usize,
    pub n_capped: usize,
    pub wall_s: f64,
}

pub fn aggregate(runs: &[Result<RunSummary>], label: &str) -> PointStats {
    let mut p = PointStats::default();
    for r in runs {
        match r {
            Ok(s) => {
                p.n_ok += 1;
                p.sinr_db += s.sinr_db;
                p.rate_nats += s.rate_nats;
                p.outer_iters += s.outer_iters as f64;
                p.n_violations += s.violations.len();
                p.n_capped += s.hit_cap as usize;
                p.wall_s += s.wall_s;
            }
            Err(e) => {
                eprintln!("[{label}] trial failed: {e}");
                p.n_failed += 1;
            }
        }
    }
    if p.n_ok > 0 {
        let n = p.n_ok as f64;
        p.sinr_db /= n;
        p.rate_nats /= n;
        p.outer_iters /= n;
    } else {
        p.sinr_db = f64::NAN;
        p.rate_nats = f64::NAN;
        p.outer_iters = f64::NAN;
    }
    p
}

/// Result files of one experiment.
#[derive(Debug, Clone, Default)]
pub struct ExperimentOutput {
    pub files: Vec<PathBuf>,
}

/// A scenario variant plus design parameters, evaluated over all trials.
struct Point {
    label: String,
    keys: Vec<String>,
    scenario: ScenarioConfig,
    params: CodesignParams,
}

fn stat_cells(p: &PointStats) -> Vec<String> {
    vec![
        num(p.sinr_db),
        num(p.rate_nats),
        num(p.outer_iters),
        p.n_ok.to_string(),
        p.n_failed.to_string(),
        p.n_violations.to_string(),
        p.n_capped.to_string(),
    ]
}

const STAT_HEADER: [&str; 7] = ["sinr_db", "rate_nats", "outer_iters", "n_ok", "n_failed", "n_violations", "n_capped"];

fn run_points(cfg: &ExperimentConfig, points: &[Point]) -> Result<Vec<PointStats>> {
    let jobs: Vec<(usize, u64)> =
        (0..points.len()).flat_map(|p| (0..cfg.trials as u64).map(move |t| (p, t))).collect();
    let results = parallel_map(&jobs, |&(p, t)| {
        let pt = &points[p];
        let inst = pt.scenario.sample(cfg.seed + t)?;
        run_once(&inst, &pt.params)
    })?;
    Ok(results.chunks(cfg.trials).zip(points).map(|(runs, pt)| aggregate(runs, &pt.label)).collect())
}

fn designs() -> [(&'static str, Baseline); 4] {
    [("joint", Baseline::NONE), ("fixed_v", Baseline::FIXED_V), ("fixed_s", Baseline::FIXED_S), ("fixed_w", Baseline::FIXED_W)]
}

fn write_points(
    cfg: &ExperimentConfig,
    dir: &Path,
    key_header: &[&str],
    points: &[Point],
) -> Result<Vec<PathBuf>> {
    let stats = run_points(cfg, points)?;
    let mut header: Vec<&str> = key_header.to_vec();
    header.extend(STAT_HEADER);
    let mut csv = Csv::new(&header);
    let mut timing = Csv::new(&[key_header, &["wall_s"]].concat());
    for (pt, st) in points.iter().zip(&stats) {
        let mut cells = pt.keys.clone();
        cells.extend(stat_cells(st));
        csv.row(&cells);
        let mut t = pt.keys.clone();
        t.push(format!("{:.3}", st.wall_s));
        timing.row(&t);
    }
    let name = cfg.experiment.name();
    let main = dir.join(format!("{name}.csv"));
    let tpath = dir.join(format!("{name}_timing.csv"));
    csv.write(&main)?;
    timing.write(&tpath)?;
    Ok(vec![main, tpath])
}

fn sweep_scenario(
    cfg: &ExperimentConfig,
    dir: &Path,
    axis: &str,
    values: &[f64],
    set: impl Fn(&mut ScenarioConfig, f64),
) -> Result<Vec<PathBuf>> {
    let mut points = Vec::new();
    for &x in values {
        for (name, b) in designs() {
            let mut scenario = cfg.scenario.clone();
            set(&mut scenario, x);
            points.push(Point {
                label: format!("{axis}={x} {name}"),
                keys: vec![num(x), name.to_string()],
                scenario,
                params: CodesignParams { baseline: b, ..cfg.codesign.clone() },
            });
        }
    }
    write_points(cfg, dir, &[axis, "design"], &points)
}

fn sweep_design(
    cfg: &ExperimentConfig,
    dir: &Path,
    axis: &str,
    values: &[f64],
    mode: WaveformMode,
    set: impl Fn(&mut CodesignParams, f64),
) -> Result<Vec<PathBuf>> {
    let mut points = Vec::new();
    for &mi0 in &cfg.grid.mi0 {
        for &x in values {
            let mut params = CodesignParams { mode, mi0, ..cfg.codesign.clone() };
            set(&mut params, x);
            points.push(Point {
                label: format!("mi0={mi0} {axis}={x}"),
                keys: vec![num(mi0), num(x)],
                scenario: cfg.scenario.clone(),
                params,
            });
        }
    }
    write_points(cfg, dir, &["mi0", axis], &points)
}

fn convergence_precoder(cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let jobs: Vec<(f64, u64)> =
        cfg.grid.mi0.iter().flat_map(|&m| (0..cfg.trials as u64).map(move |t| (m, t))).collect();
    let results = parallel_map(&jobs, |&(mi0, t)| -> Result<_> {
        let inst = cfg.scenario.sample(cfg.seed + t)?;
        let st = initialize(&inst)?;
        let params = CodesignParams { mi0, ..cfg.codesign.clone() }.precoder_params();
        let v0 = if st.rate < mi0 { restore_feasibility(&inst, &st.s, &initial_precoder(&inst), &params)? } else { st.v.clone() };
        Ok(design_precoder(&inst, &st.s, &st.w, &v0, &params)?.trace)
    })?;
    let mut csv = Csv::new(&["mi0", "trial", "iter", "r_of_v", "rate_nats", "admm_iters"]);
    for ((mi0, t), res) in jobs.iter().zip(results) {
        match res {
            Ok(trace) => {
                for r in trace {
                    csv.row(&[num(*mi0), t.to_string(), r.iter.to_string(), num(r.r_of_v), num(r.rate_nats), r.admm_iters.to_string()]);
                }
            }
            Err(e) => eprintln!("[convergence_precoder mi0={mi0} trial={t}] failed: {e}"),
        }
    }
    let path = dir.join("convergence_precoder.csv");
    csv.write(&path)?;
    Ok(vec![path])
}

fn path_variants(cfg: &ExperimentConfig) -> [(&'static str, ScenarioConfig); 2] {
    [("multipath", cfg.scenario.clone()), ("single_path", cfg.scenario.single_path())]
}

fn convergence_waveform(cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let variants = path_variants(cfg);
    let jobs: Vec<(usize, u64)> = (0..2).flat_map(|v| (0..cfg.trials as u64).map(move |t| (v, t))).collect();
    let results = parallel_map(&jobs, |&(v, t)| -> Result<_> {
        let inst = variants[v].1.sample(cfg.seed + t)?;
        Ok(run_codesign(&inst, &cfg.codesign)?.history)
    })?;
    let mut csv = Csv::new(&["paths", "trial", "outer_iter", "sinr_db", "rate_nats"]);
    for ((v, t), res) in jobs.iter().zip(results) {
        match res {
            Ok(hist) => {
                for h in hist {
                    csv.row(&[variants[*v].0.to_string(), t.to_string(), h.outer_iter.to_string(), num(h.sinr_db), num(h.rate_nats)]);
                }
            }
            Err(e) => eprintln!("[convergence_waveform {} trial={t}] failed: {e}", variants[*v].0),
        }
    }
    let path = dir.join("convergence_waveform.csv");
    csv.write(&path)?;
    Ok(vec![path])
}

fn beampattern(cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let grid = angle_grid(cfg.grid.angle_step_deg);
    let mut files = Vec::new();
    for (name, scenario) in path_variants(cfg) {
        let inst = scenario.sample(cfg.seed)?;
        let st = run_codesign(&inst, &cfg.codesign)?;
        let gains = beampattern_db(inst.dims(), &st.w, &st.s, &grid)?;
        let mut csv = Csv::new(&["theta_deg", "gain_db"]);
        for (th, g) in grid.iter().zip(gains) {
            csv.row(&[num(*th), num(g)]);
        }
        let path = dir.join(format!("beampattern_{name}.csv"));
        csv.write(&path)?;
        files.push(path);
    }
    Ok(files)
}

/// Runs the configured experiment and writes its CSV files into `dir`.
pub fn run_experiment(cfg: &ExperimentConfig, dir: &Path) -> Result<ExperimentOutput> {
    cfg.validate()?;
    std::fs::create_dir_all(dir)?;
    let g = &cfg.grid;
    let files = match cfg.experiment {
        ExperimentKind::ConvergencePrecoder => convergence_precoder(cfg, dir)?,
        ExperimentKind::ConvergenceWaveform => convergence_waveform(cfg, dir)?,
        ExperimentKind::SweepInr => sweep_scenario(cfg, dir, "inr_r_db", &g.inr_r_db, |s, x| s.inr_r_db = x)?,
        ExperimentKind::SweepCnr => sweep_scenario(cfg, dir, "cnr_db", &g.cnr_db, |s, x| s.cnr_db = x)?,
        ExperimentKind::SweepEpsilonMi0 => {
            sweep_design(cfg, dir, "epsilon", &g.epsilon, WaveformMode::Similarity, |p, x| p.waveform.epsilon = x)?
        }
        ExperimentKind::SweepEtaMi0 => sweep_design(cfg, dir, "eta", &g.eta, WaveformMode::Papr, |p, x| p.waveform.eta = x)?,
        ExperimentKind::Beampattern => beampattern(cfg, dir)?,
        ExperimentKind::Baselines => {
            let points: Vec<Point> = designs()
                .into_iter()
                .map(|(name, b)| Point {
                    label: name.to_string(),
                    keys: vec![name.to_string()],
                    scenario: cfg.scenario.clone(),
                    params: CodesignParams { baseline: b, ..cfg.codesign.clone() },
                })
                .collect();
            write_points(cfg, dir, &["design"], &points)?
        }
    };
    Ok(ExperimentOutput { files })
}

/// Companion gnuplot script for a CSV written by [`run_experiment`].
pub fn gnuplot_script(kind: ExperimentKind, csv: &Path) -> String {
    let file = csv.file_name().and_then(|f| f.to_str()).unwrap_or("data.csv");
    let stem = file.trim_end_matches(".csv");
    let body = match kind {
        ExperimentKind::ConvergencePrecoder => {
            "set xlabel 'iteration'\nset ylabel 'r(V)'\nplot FILE using 3:4 with linespoints title 'r(V)'\n".to_string()
        }
        ExperimentKind::ConvergenceWaveform => {
            "set xlabel 'outer iteration'\nset ylabel 'SINR (dB)'\nplot FILE using 3:4 with linespoints title 'SINR'\n".to_string()
        }
        ExperimentKind::SweepInr | ExperimentKind::SweepCnr => {
            let mut s = String::from("set ylabel 'SINR (dB)'\nplot ");
            let parts: Vec<String> = designs()
                .iter()
                .map(|(d, _)| format!("FILE using 1:(strcol(2) eq '{d}' ? $3 : 1/0) with linespoints title '{d}'"))
                .collect();
            s.push_str(&parts.join(", \\\n     "));
            s.push('\n');
            s
        }
        ExperimentKind::SweepEpsilonMi0 | ExperimentKind::SweepEtaMi0 => {
            "set ylabel 'SINR (dB)'\nplot FILE using 2:3:1 with linespoints lc variable title 'SINR by MI0'\n".to_string()
        }
        ExperimentKind::Beampattern => {
            "set xlabel 'angle (deg)'\nset ylabel 'gain (dB)'\nplot FILE using 1:2 with lines title 'beampattern'\n".to_string()
        }
        ExperimentKind::Baselines => "set style data histogram\nplot FILE using 2:xtic(1) title 'SINR (dB)'\n".to_string(),
    };
    format!(
        "set datafile separator ','\nset key autotitle columnhead\nset terminal pngcairo size 800,600\nset output '{stem}.png'\nFILE = '{file}'\n{body}"
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_has_twelve_digits() {
        assert_eq!(num(1.0), "1.00000000000e0");
        assert_eq!(num(-0.000123456789012345), "-1.23456789012e-4");
    }

    #[test]
    fn config_roundtrip_and_defaults() {
        let cfg: ExperimentConfig = serde_json::from_str(r#"{"experiment": "sweep_inr", "trials": 2}"#).unwrap();
        assert_eq!(cfg.experiment, ExperimentKind::SweepInr);
        assert_eq!(cfg.trials, 2);
        assert_eq!(cfg.grid.inr_r_db.len(), 7);
        let text = serde_json::to_string(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back.grid.eta, cfg.grid.eta);
    }

    #[test]
    fn zero_trials_rejected() {
        let cfg = ExperimentConfig { trials: 0, ..Default::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn thread_count_is_positive() {
        assert!(thread_count() >= 1);
    }
}
