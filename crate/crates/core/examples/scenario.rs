// Draw a random coexistence scenario and inspect it.

use crc_core::scenario::ScenarioConfig;

pub fn run_example() -> crc_core::Result<()> {
    let cfg = ScenarioConfig::default();
    let inst = cfg.sample(7)?;
    let d = inst.dims();
    println!("radar {}x{} antennas, BS {} antennas, CU {} antennas, {} streams", d.mt, d.mr, d.nt, d.nr, d.d);
    println!("pulse length {}, PRI {} samples", d.k_pulse, d.k_pri);

    let p = inst.params();
    println!("target paths: {} NLoS patches", p.target.nlos.len());
    println!("clutter patches: {}, comm-to-radar paths: {}", p.clutter.len(), p.c2r.len());

    // The same seed always gives the same channels.
    let again = cfg.sample(7)?;
    assert_eq!(again.channels().t_cr[0], inst.channels().t_cr[0]);

    let los = cfg.single_path().sample(7)?;
    println!("single-path variant: {} NLoS patches", los.params().target.nlos.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> crc_core::Result<()> {
    run_example()
}
