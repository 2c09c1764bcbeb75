// Full alternating design against the baselines that freeze one block,
// with the design written to disk.

use crc_core::driver::{audit, run_codesign, Baseline, CodesignParams};
use crc_core::scenario::ScenarioConfig;

pub fn run_example() -> crc_core::Result<()> {
    let inst = ScenarioConfig::default().sample(3)?;
    let mut joint = None;
    for b in [Baseline::NONE, Baseline::FIXED_V, Baseline::FIXED_S, Baseline::FIXED_W] {
        let params = CodesignParams { baseline: b, ..Default::default() };
        let st = run_codesign(&inst, &params)?;
        let h = st.history.last().expect("history is never empty");
        println!("{:<8}: SINR {:.3} dB, rate {:.4} nats, {} outer iterations", b.to_string(), h.sinr_db, h.rate_nats, st.outer_iter);
        assert!(audit(&inst, &params, &st)?.is_empty());
        if b == Baseline::NONE {
            joint = Some(st);
        }
    }

    let dir = std::env::temp_dir().join("crc_joint_design");
    std::fs::create_dir_all(&dir)?;
    let st = joint.expect("joint run above");
    crc_core::io::write_design(&dir.join("design.json"), &st)?;
    crc_core::io::history_csv(&st).write(&dir.join("history.csv"))?;
    println!("wrote {}", dir.display());
    Ok(())
}

#[allow(dead_code)]
fn main() -> crc_core::Result<()> {
    run_example()
}
