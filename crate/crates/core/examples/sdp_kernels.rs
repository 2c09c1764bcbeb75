// The semidefinite toolbox: a plain SDP, a fractional SDP and rank
// reduction of its solution.

use crc_core::kernels::{rank_reduction, solve_fractional_sdp, solve_sdp, SdpProblem, SdpSettings, Sense, TraceConstraint};
use crc_core::kernels::rank::numerical_rank;
use crc_core::linalg::{c, lambda_max, outer, CMat, CVec};

pub fn run_example() -> crc_core::Result<()> {
    let n = 4;
    let a = CMat::from_fn(n, n, |i, j| c(1.0 / (1 + i + j) as f64, 0.1 * (i as f64 - j as f64)));
    let settings = SdpSettings::default();

    // Largest eigenvalue as an SDP.
    let p = SdpProblem {
        n,
        objective: a.clone(),
        maximize: true,
        constraints: vec![TraceConstraint::new(CMat::identity(n, n), Sense::Le, 1.0)],
    };
    let sol = solve_sdp(&p, &settings)?;
    println!("SDP value {:.10}, lambda_max {:.10}, {} iterations", sol.obj, lambda_max(&a), sol.iterations);

    // Ratio of two quadratic forms under a power budget.
    let q = CVec::from_fn(n, |i, _| c(1.0, i as f64));
    let r = outer(&q, &q) + CMat::identity(n, n) * c(0.5, 0.0);
    let power = TraceConstraint::new(CMat::identity(n, n), Sense::Le, 2.0);
    let frac = solve_fractional_sdp(&a, &r, 1.0, &[power], &settings)?;
    println!("fractional value {:.6} (t = {:.4})", frac.value, frac.t);

    let reduced = rank_reduction(&frac.s, &[a, r])?;
    println!("rank {} -> {}", numerical_rank(&frac.s, 1e-6), numerical_rank(&reduced, 1e-6));
    Ok(())
}

#[allow(dead_code)]
fn main() -> crc_core::Result<()> {
    run_example()
}
