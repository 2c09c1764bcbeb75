// ADMM on one precoder subproblem, checked against the interior-point
// reference.

use crc_core::comm::{pi_matrix, precoder_surrogate, vec_precoder};
use crc_core::driver::feasible_start;
use crc_core::kernels::admm::qcqp_via_sdp;
use crc_core::kernels::{admm_qcqp, AdmmSettings, SdpSettings};
use crc_core::linalg::quad_form;
use crc_core::precoder::PrecoderDesignParams;
use crc_core::scenario::ScenarioConfig;

pub fn run_example() -> crc_core::Result<()> {
    let inst = ScenarioConfig::default().sample(4)?;
    let pp = PrecoderDesignParams::default();
    let st = feasible_start(&inst, &pp)?;
    let v_bar = vec_precoder(&st.v);
    let pi = pi_matrix(&inst, &st.w)?;
    let sur = precoder_surrogate(&inst, &v_bar, &st.s, pp.mi0)?;
    let p_b = inst.params().p_b;

    let out = admm_qcqp(&pi, p_b, &sur, &v_bar, &AdmmSettings::default())?;
    let (_, reference) = qcqp_via_sdp(&pi, p_b, &sur, &SdpSettings::default())?;
    println!(
        "ADMM {:.8e} after {} iterations (final rho {}), interior point {reference:.8e}",
        quad_form(&pi, &out.state.v),
        out.iterations,
        out.state.rho_bar
    );
    println!("residuals {:.1e} / {:.1e}", out.state.primal_residual, out.state.dual_residual);
    Ok(())
}

#[allow(dead_code)]
fn main() -> crc_core::Result<()> {
    run_example()
}
