// Precoder design for a fixed waveform and filter.

use crc_core::driver::initialize;
use crc_core::precoder::{design_precoder, PrecoderDesignParams};
use crc_core::scenario::ScenarioConfig;

pub fn run_example() -> crc_core::Result<()> {
    let inst = ScenarioConfig::default().sample(5)?;
    let st = initialize(&inst)?;
    let params = PrecoderDesignParams::default();
    let out = design_precoder(&inst, &st.s, &st.w, &st.v, &params)?;
    if out.restored {
        println!("start point was moved onto the rate floor");
    }
    for it in &out.trace {
        println!("iter {:2}  r(V) {:.6e}  rate {:.4}  admm {}", it.iter, it.r_of_v, it.rate_nats, it.admm_iters);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> crc_core::Result<()> {
    run_example()
}
