//! Independent oracles for the numerical kernels: planted optima, brute
//! force sampling and exhaustive comparisons.

use crc_core::kernels::projection::project_sphere_box;
use crc_core::kernels::{solve_fractional_sdp, solve_sdp, SdpProblem, SdpSettings, Sense, TraceConstraint};
use crc_core::linalg::{c, herm_eig, outer, quad_form, trace_prod, CMat, CVec};
use crc_core::validation::{cgauss, on_sphere, random_hermitian};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `C = Z* + Σ yᵢAᵢ` with `Z* S* = 0` makes `S*` optimal for the
/// equality-constrained minimization, with value `tr(C S*)`.
#[test]
fn planted_complementary_pair() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for trial in 0..10 {
        let n = rng.gen_range(3..=10);
        let r = rng.gen_range(1..n);
        let basis = herm_eig(&random_hermitian(&mut rng, n)).vectors;
        let mut s_star = CMat::zeros(n, n);
        let mut z_star = CMat::zeros(n, n);
        for j in 0..n {
            let u = basis.column(j).into_owned();
            let w = rng.gen_range(0.5..2.0);
            if j < r {
                s_star += outer(&u, &u) * c(w, 0.0);
            } else {
                z_star += outer(&u, &u) * c(w, 0.0);
            }
        }
        let m = rng.gen_range(1..=4);
        let mut cm = z_star.clone();
        let mut constraints = Vec::new();
        for _ in 0..m {
            let a = random_hermitian(&mut rng, n);
            cm += &a * c(rng.gen_range(-1.0..1.0), 0.0);
            constraints.push(TraceConstraint::new(a.clone(), Sense::Eq, trace_prod(&a, &s_star)));
        }
        // A trace constraint keeps the feasible set bounded.
        let id = CMat::identity(n, n);
        cm += &id * c(0.3, 0.0);
        constraints.push(TraceConstraint::new(id.clone(), Sense::Eq, trace_prod(&id, &s_star)));
        let expect = trace_prod(&cm, &s_star);
        let p = SdpProblem { n, objective: cm, maximize: false, constraints };
        let sol = solve_sdp(&p, &SdpSettings::default()).unwrap();
        assert!((sol.obj - expect).abs() <= 1e-7 * (1.0 + expect.abs()), "trial {trial}: {} vs {expect}", sol.obj);
    }
}

/// The relaxation value bounds every rank-one feasible ratio, and the
/// best sampled ratio comes close to it.
#[test]
fn fractional_relaxation_against_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 3;
    let g = CMat::from_fn(n, n, |_, _| cgauss(&mut rng, 1)[0]);
    let psi = &g * g.adjoint();
    let h = cgauss(&mut rng, n);
    let r = outer(&h, &h) + CMat::identity(n, n) * c(0.2, 0.0);
    let q = random_hermitian(&mut rng, n);
    let q = &q * q.adjoint() * c(0.2, 0.0);
    let p_r = 2.0;
    let cst = 1.0;
    let extra = vec![
        TraceConstraint::new(CMat::identity(n, n), Sense::Le, p_r),
        TraceConstraint::new(q.clone(), Sense::Le, 0.3),
    ];
    let sol = solve_fractional_sdp(&psi, &r, cst, &extra, &SdpSettings::default()).unwrap();
    let mut best = 0f64;
    for _ in 0..200_000 {
        let radius = p_r * rng.gen::<f64>().sqrt();
        let x = on_sphere(&mut rng, n, radius);
        if quad_form(&q, &x) > 0.3 {
            continue;
        }
        best = best.max(quad_form(&psi, &x) / (quad_form(&r, &x) + cst));
    }
    assert!(best <= sol.value * (1.0 + 1e-9), "{best} above {}", sol.value);
    assert!(best >= sol.value * 0.97, "sampling reached {best}, relaxation {}", sol.value);
}

/// On three entries the projection is compared with a dense search over
/// the feasible set.
#[test]
fn sphere_box_projection_against_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (p_r, eta) = (3.0, 1.5);
    let cap = eta * p_r / 3.0;
    for _ in 0..5 {
        let x = cgauss(&mut rng, 3);
        let (proj, _) = project_sphere_box(&x, p_r, eta).unwrap();
        let d_proj = (&proj - &x).norm();
        let mut d_best = f64::INFINITY;
        // Magnitudes on a grid; the best phases align with the input.
        let steps = 300;
        for i in 0..=steps {
            let a0 = cap.sqrt() * i as f64 / steps as f64;
            for j in 0..=steps {
                let a1 = cap.sqrt() * j as f64 / steps as f64;
                let rest = p_r - a0 * a0 - a1 * a1;
                if rest < 0.0 || rest > cap {
                    continue;
                }
                let mags = [a0, a1, rest.sqrt()];
                let y = CVec::from_fn(3, |k, _| {
                    let ph = if x[k].norm() > 0.0 { x[k] / x[k].norm() } else { c(1.0, 0.0) };
                    ph * mags[k]
                });
                d_best = d_best.min((&y - &x).norm());
            }
        }
        assert!(d_proj <= d_best + 1e-9, "projection {d_proj} vs search {d_best}");
        assert!(d_best - d_proj < 1e-2);
    }
}
