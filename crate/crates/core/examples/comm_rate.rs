// Average rate at the communication user, computed two ways.

use crc_core::comm::{avg_rate, mi_block, vec_precoder};
use crc_core::driver::initial_precoder;
use crc_core::scenario::ScenarioConfig;
use crc_core::waveform::reference_waveform_lfm;

pub fn run_example() -> crc_core::Result<()> {
    let inst = ScenarioConfig::default().sample(2)?;
    let v = initial_precoder(&inst);
    let p_r = inst.params().p_r;
    for scale in [0.0, 0.25, 1.0] {
        let s = reference_waveform_lfm(inst.dims(), p_r) * crc_core::linalg::c(scale, 0.0);
        let direct = avg_rate(&inst, &s, &v)?;
        let block = mi_block(&inst, &vec_precoder(&v), &s)?;
        println!("radar power x{scale}: rate {direct:.6} nats (block form {block:.6})");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> crc_core::Result<()> {
    run_example()
}
