// Every example doubles as a smoke test.

macro_rules! example {
    ($m:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $m {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $m() {
            $m::run_example().expect(concat!($file, " should run"));
        }
    };
}

example!(scenario, "scenario.rs");
example!(radar_sinr, "radar_sinr.rs");
example!(comm_rate, "comm_rate.rs");
example!(sdp_kernels, "sdp_kernels.rs");
example!(admm_qcqp, "admm_qcqp.rs");
example!(precoder_design, "precoder_design.rs");
example!(waveform_design, "waveform_design.rs");
example!(joint_design, "joint_design.rs");
example!(experiment_sweep, "experiment_sweep.rs");
