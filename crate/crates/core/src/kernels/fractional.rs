//! Linear-fractional SDPs through the Charnes–Cooper substitution `T = tS`.

use crate::error::{Error, Result};
use crate::linalg::{hermitize, trace_prod, CMat, RMat};

use super::sdp::{extract_hermitian, half_realify, solve_block_sdp, BlockSdp, KktResiduals, SdpSettings, Sense, TraceConstraint};

#[derive(Debug, Clone)]
pub struct FractionalSolution {
    /// De-homogenized maximizer `S = T/t`.
    pub s: CMat,
    /// `tr(ΨS)/(tr(RS)+c)` at `S`.
    pub value: f64,
    /// Homogenizing variable at the optimum.
    pub t: f64,
    pub kkt_residuals: KktResiduals,
}

/// Maximizes `tr(ΨS)/(tr(RS) + c)` over `S ⪰ 0` with extra trace constraints.
pub fn solve_fractional_sdp(
    psi: &CMat,
    r: &CMat,
    c: f64,
    extra: &[TraceConstraint],
    settings: &SdpSettings,
) -> Result<FractionalSolution> {
    let n = psi.nrows();
    if psi.shape() != (n, n) || r.shape() != (n, n) || extra.iter().any(|e| e.a.shape() != (n, n)) {
        return Err(Error::DimensionMismatch("fractional SDP matrices differ in size".into()));
    }
    if !(c >= 0.0) {
        return Err(Error::InvalidConfig(format!("denominator constant {c} must be nonnegative")));
    }
    let n_ineq = extra.iter().filter(|e| e.sense != Sense::Eq).count();
    let mut sizes = vec![2 * n, 1, 1];
    sizes.extend(std::iter::repeat(1).take(n_ineq));
    let mut p = BlockSdp::new(sizes);
    p.c[0] = half_realify(psi) * -1.0;
    let one = || RMat::from_element(1, 1, 1.0);
    // tr(RT) + c t + slack = 1
    p.add_constraint(vec![(0, half_realify(r)), (1, RMat::from_element(1, 1, c)), (2, one())], 1.0);
    let mut slack = 3;
    for e in extra {
        let mut blocks = vec![(0, half_realify(&e.a)), (1, RMat::from_element(1, 1, -e.b))];
        match e.sense {
            Sense::Eq => {}
            Sense::Le => {
                blocks.push((slack, one()));
                slack += 1;
            }
            Sense::Ge => {
                blocks.push((slack, RMat::from_element(1, 1, -1.0)));
                slack += 1;
            }
        }
        p.add_constraint(blocks, 0.0);
    }
    let sol = solve_block_sdp(&p, settings)?;
    let t = sol.x[1][(0, 0)];
    if !(t > 1e-12) {
        return Err(Error::DegenerateDenominator(t));
    }
    let tm = hermitize(&extract_hermitian(&sol.x[0]));
    let s = tm.unscale(t);
    let value = trace_prod(psi, &s) / (trace_prod(r, &s) + c);
    Ok(FractionalSolution { s, value, t, kkt_residuals: sol.residuals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c as cx, outer, CVec};

    #[test]
    fn rank_one_numerator_rayleigh() {
        let psi_v = CVec::from_vec(vec![cx(1.0, 0.5), cx(-0.3, 2.0), cx(0.2, -1.0)]);
        let psi = outer(&psi_v, &psi_v);
        let r = CMat::identity(3, 3);
        let extra = vec![TraceConstraint::new(CMat::identity(3, 3), Sense::Le, 5.0)];
        let sol = solve_fractional_sdp(&psi, &r, 0.0, &extra, &SdpSettings::default()).unwrap();
        assert!((sol.value - psi_v.norm_squared()).abs() < 1e-7);
    }

    #[test]
    fn scaling_numerator_scales_value() {
        let a = CVec::from_vec(vec![cx(1.0, 0.0), cx(0.5, 0.5)]);
        let psi = outer(&a, &a) + CMat::identity(2, 2) * cx(0.1, 0.0);
        let r = CMat::from_diagonal(&CVec::from_vec(vec![cx(2.0, 0.0), cx(1.0, 0.0)]));
        let extra = vec![TraceConstraint::new(CMat::identity(2, 2), Sense::Le, 1.0)];
        let s1 = solve_fractional_sdp(&psi, &r, 0.5, &extra, &SdpSettings::default()).unwrap();
        let s3 = solve_fractional_sdp(&(psi * cx(3.0, 0.0)), &r, 0.5, &extra, &SdpSettings::default()).unwrap();
        assert!((s3.value - 3.0 * s1.value).abs() < 1e-7 * s3.value);
    }
}
