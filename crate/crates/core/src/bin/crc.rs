use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crc_core::driver::{run_codesign, Baseline, CodesignParams};
use crc_core::experiments::{gnuplot_script, run_experiment, ExperimentConfig, ExperimentKind};
use crc_core::radar::{angle_grid, beampattern_db};
use crc_core::scenario::ScenarioConfig;
use crc_core::validation::Validator;
use crc_core::waveform::WaveformMode;
use crc_core::{io, Result};

#[derive(Parser)]
#[command(name = "crc", version, about = "Radar/communication coexistence design")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run an experiment described by a JSON config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write a gnuplot script next to each CSV.
        #[arg(long)]
        gnuplot: bool,
    },
    /// Run the acceptance checks and print one line per criterion.
    Validate {
        /// Comma-separated criterion numbers; all by default.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// One joint design.
    Codesign {
        /// Scenario config JSON; the default scenario when omitted.
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Mode::Similarity)]
        mode: Mode,
        #[arg(long, default_value = "none")]
        baseline: Baseline,
        #[arg(long)]
        mi0: Option<f64>,
        /// Outer iteration cap.
        #[arg(long)]
        outer_max: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        /// Write every inner SDP of the final waveform step as JSON here.
        #[arg(long)]
        dump_sdp: Option<PathBuf>,
        #[arg(long)]
        gnuplot: bool,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Mode {
    Similarity,
    Papr,
}

fn write_gnuplot(kind: ExperimentKind, csv: &Path) -> Result<()> {
    std::fs::write(csv.with_extension("gp"), gnuplot_script(kind, csv))?;
    Ok(())
}

fn sweep(config: &Path, out: &Path, gnuplot: bool) -> Result<()> {
    let cfg: ExperimentConfig = serde_json::from_str(&std::fs::read_to_string(config)?)?;
    let res = run_experiment(&cfg, out)?;
    for f in &res.files {
        let timing = f.to_string_lossy().ends_with("_timing.csv");
        if gnuplot && !timing {
            write_gnuplot(cfg.experiment, f)?;
        }
        println!("{}", f.display());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn codesign(
    scenario: Option<&Path>,
    seed: u64,
    mode: Mode,
    baseline: Baseline,
    mi0: Option<f64>,
    outer_max: Option<usize>,
    out: &Path,
    dump_sdp: Option<&Path>,
    gnuplot: bool,
) -> Result<()> {
    let sc: ScenarioConfig = match scenario {
        Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)?,
        None => ScenarioConfig::default(),
    };
    let inst = sc.sample(seed)?;
    let mut params = CodesignParams {
        mode: match mode {
            Mode::Similarity => WaveformMode::Similarity,
            Mode::Papr => WaveformMode::Papr,
        },
        baseline,
        ..Default::default()
    };
    if let Some(m) = mi0 {
        params.mi0 = m;
    }
    if let Some(m) = outer_max {
        params.outer_max = m;
    }
    let st = run_codesign(&inst, &params)?;
    std::fs::create_dir_all(out)?;
    io::history_csv(&st).write(&out.join("history.csv"))?;
    io::precoder_trace_csv(&st).write(&out.join("precoder_trace.csv"))?;
    io::waveform_trace_csv(&st).write(&out.join("waveform_trace.csv"))?;
    io::write_design(&out.join("design.json"), &st)?;
    let grid = angle_grid(0.5);
    let mut bp = crc_core::experiments::Csv::new(&["theta_deg", "gain_db"]);
    for (th, g) in grid.iter().zip(beampattern_db(inst.dims(), &st.w, &st.s, &grid)?) {
        bp.row(&[crc_core::experiments::num(*th), crc_core::experiments::num(g)]);
    }
    let bp_path = out.join("beampattern.csv");
    bp.write(&bp_path)?;
    if gnuplot {
        write_gnuplot(ExperimentKind::Beampattern, &bp_path)?;
    }
    if let Some(dir) = dump_sdp {
        io::dump_records(dir, "waveform", &st.records)?;
    }
    let last = st.history.last().expect("history has the initial row");
    println!(
        "outer iterations {}, SINR {:.4} dB, rate {:.4} nats",
        st.outer_iter, last.sinr_db, last.rate_nats
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Sweep { config, out, gnuplot } => sweep(&config, &out, gnuplot),
        Cmd::Validate { only, trials, seed } => {
            let mut v = Validator::new(trials, seed);
            let ids: Vec<u8> = if only.is_empty() { (1..=10).collect() } else { only };
            let mut all = true;
            for id in ids {
                let r = match v.run(id) {
                    Ok(r) => r,
                    Err(e) => {
                        eprintln!("criterion {id}: {e}");
                        all = false;
                        continue;
                    }
                };
                all &= r.pass;
                println!("{r}");
            }
            return if all { ExitCode::SUCCESS } else { ExitCode::FAILURE };
        }
        Cmd::Codesign { scenario, seed, mode, baseline, mi0, outer_max, out, dump_sdp, gnuplot } => {
            codesign(scenario.as_deref(), seed, mode, baseline, mi0, outer_max, &out, dump_sdp.as_deref(), gnuplot)
        }
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
