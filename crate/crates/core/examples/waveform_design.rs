// Waveform design in both modes: similarity to the LFM reference, and a
// PAPR cap.

use crc_core::driver::feasible_start;
use crc_core::precoder::PrecoderDesignParams;
use crc_core::scenario::ScenarioConfig;
use crc_core::waveform::{design_waveform, papr, similarity_value, WaveformDesignParams, WaveformMode};

pub fn run_example() -> crc_core::Result<()> {
    let inst = ScenarioConfig::default().sample(6)?;
    let st = feasible_start(&inst, &PrecoderDesignParams::default())?;
    let p_r = inst.params().p_r;

    for mode in [WaveformMode::Similarity, WaveformMode::Papr] {
        let params = WaveformDesignParams::default();
        let out = design_waveform(mode, &inst, &st.v, &st.w, &st.s, &st.s, &params)?;
        let first = out.trace.first().map_or(f64::NAN, |r| r.sinr_db);
        let last = out.trace.last().map_or(f64::NAN, |r| r.sinr_db);
        println!("{mode:?}: SINR {first:.3} -> {last:.3} dB in {} accepted steps", out.accepted);
        println!(
            "  energy {:.6}, PAPR {:.4}, similarity {:.4} (cap {:.1})",
            out.s.norm_squared(),
            papr(&out.s),
            similarity_value(&out.s, &st.s, p_r),
            params.epsilon * p_r
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> crc_core::Result<()> {
    run_example()
}
