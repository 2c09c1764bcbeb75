// A small radar-INR sweep written as CSV, as `crc sweep` would.

use crc_core::experiments::{run_experiment, ExperimentConfig, ExperimentKind, Grid};

pub fn run_example() -> crc_core::Result<()> {
    let cfg = ExperimentConfig {
        experiment: ExperimentKind::SweepInr,
        trials: 1,
        grid: Grid { inr_r_db: vec![0.0, 30.0], ..Default::default() },
        ..Default::default()
    };
    let dir = std::env::temp_dir().join("crc_experiment_sweep");
    let out = run_experiment(&cfg, &dir)?;
    for f in &out.files {
        println!("{}:\n{}", f.display(), std::fs::read_to_string(f)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> crc_core::Result<()> {
    run_example()
}
