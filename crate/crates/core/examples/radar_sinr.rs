// Radar output SINR, the optimal receive filter and the beampattern.

use crc_core::driver::initial_precoder;
use crc_core::radar::{angle_grid, beampattern_db, radar_sinr, to_db, update_receive_filter};
use crc_core::scenario::ScenarioConfig;
use crc_core::waveform::reference_waveform_lfm;

pub fn run_example() -> crc_core::Result<()> {
    let inst = ScenarioConfig::default().sample(1)?;
    let v = initial_precoder(&inst);
    let s = reference_waveform_lfm(inst.dims(), inst.params().p_r);

    let w = update_receive_filter(&inst, &v, &s)?;
    let sinr = radar_sinr(&inst, &w, &s, &v)?;
    println!("optimal filter SINR {:.3} dB", to_db(sinr));

    // Any other filter does worse.
    let mut naive = w.clone();
    naive.fill(crc_core::linalg::c(1.0, 0.0));
    println!("all-ones filter SINR {:.3} dB", to_db(radar_sinr(&inst, &naive, &s, &v)?));

    let grid = angle_grid(1.0);
    let gain = beampattern_db(inst.dims(), &w, &s, &grid)?;
    let (i, peak) = gain.iter().enumerate().fold((0, f64::MIN), |b, (i, &g)| if g > b.1 { (i, g) } else { b });
    println!("beampattern peak {peak:.2} dB at {} deg", grid[i]);
    Ok(())
}

#[allow(dead_code)]
fn main() -> crc_core::Result<()> {
    run_example()
}
