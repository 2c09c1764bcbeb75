use proptest::prelude::*;

use crc_core::comm::{unvec_precoder, vec_precoder};
use crc_core::kernels::admm::project_ball;
use crc_core::kernels::projection::project_sphere_box;
use crc_core::kernels::bisection_root;
use crc_core::linalg::{c, CMat, CVec};
use crc_core::scenario::ScenarioConfig;
use crc_core::waveform::{papr, reference_waveform_lfm, similarity_value};

fn cvec(len: usize) -> impl Strategy<Value = CVec> {
    prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), len)
        .prop_map(|v| CVec::from_iterator(v.len(), v.into_iter().map(|(a, b)| c(a, b))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_lands_on_sphere_and_under_cap(x in cvec(32), eta in 1.0f64..8.0) {
        prop_assume!(x.norm() > 1e-6);
        let p_r = 10.0;
        let (s, _) = project_sphere_box(&x, p_r, eta).unwrap();
        prop_assert!((s.norm_squared() - p_r).abs() <= 1e-9 * p_r);
        let cap = eta * p_r / 32.0;
        prop_assert!(s.iter().all(|z| z.norm_sqr() <= cap + 1e-9));
        prop_assert!(papr(&s) <= eta + 1e-9);
    }

    #[test]
    fn ball_projection_is_nonexpansive(x in cvec(8), y in cvec(8), p in 0.1f64..4.0) {
        let (px, py) = (project_ball(&x, p), project_ball(&y, p));
        prop_assert!(px.norm_squared() <= p * (1.0 + 1e-12));
        prop_assert!((&px - &py).norm() <= (&x - &y).norm() + 1e-12);
    }

    #[test]
    fn similarity_is_a_distance(x in cvec(32), a in 0.0f64..1.0, ph in 0.0f64..6.28) {
        let dims = ScenarioConfig::default().dims;
        let s0 = reference_waveform_lfm(&dims, 10.0);
        prop_assert!(similarity_value(&x, &s0, 10.0) >= -1e-9);
        let scaled = &s0 * c(a * ph.cos(), a * ph.sin());
        prop_assert!(similarity_value(&scaled, &s0, 10.0).abs() < 1e-9);
    }

    #[test]
    fn precoder_vectorization_roundtrip(x in cvec(40)) {
        let dims = ScenarioConfig::default().dims;
        let v: CMat = unvec_precoder(&dims, &x).unwrap();
        prop_assert_eq!(vec_precoder(&v), x);
    }

    #[test]
    fn bisection_finds_decreasing_roots(root in 0.01f64..500.0) {
        let r = bisection_root(|l| root - l, 1.0).unwrap();
        prop_assert!((r - root).abs() <= 1e-8 * root.max(1.0));
    }
}
