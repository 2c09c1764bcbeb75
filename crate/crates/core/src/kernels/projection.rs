//! Projection onto the set `{s : ‖s‖² = P, |s_n|² ≤ ηP/N}`.

use crate::error::{Error, Result};
use crate::linalg::{c, CVec};

use super::roots::bisection_root;

#[derive(Debug, Clone, Default)]
pub struct ProjectionTrace {
    /// Distance to the input after each clip-and-rescale cycle.
    pub distances: Vec<f64>,
    pub cycles: usize,
    /// Distance of the returned point to the input.
    pub final_distance: f64,
}

const MAX_CYCLES: usize = 500;

/// Nearest point to `s_tilde` with energy `p_r` and per-entry magnitude cap
/// `√(η p_r / N)`. Alternating projections first, then an exact
/// magnitude allocation `r_n = min(β|s̃_n|, cap)` with phases kept.
pub fn project_sphere_box(s_tilde: &CVec, p_r: f64, eta: f64) -> Result<(CVec, ProjectionTrace)> {
    let n = s_tilde.len();
    if n == 0 {
        return Err(Error::InvalidConfig("empty waveform".into()));
    }
    if !(eta >= 1.0) || !(p_r > 0.0) {
        return Err(Error::InvalidConfig(format!("projection needs eta >= 1 and P > 0 (eta = {eta}, P = {p_r})")));
    }
    let cap = (eta * p_r / n as f64).sqrt();
    let input = if s_tilde.norm() == 0.0 {
        let r = (p_r / n as f64).sqrt();
        CVec::from_fn(n, |i, _| {
            let ph = std::f64::consts::PI * (i * i) as f64 / n as f64;
            c(r * ph.cos(), r * ph.sin())
        })
    } else {
        s_tilde.clone()
    };

    let mut trace = ProjectionTrace::default();
    let mut s = input.clone();
    for _ in 0..MAX_CYCLES {
        let prev = s.clone();
        let clipped = s.map(|z| if z.norm() > cap { z * (cap / z.norm()) } else { z });
        let nrm = clipped.norm();
        s = if nrm > 0.0 { clipped * c((p_r.sqrt()) / nrm, 0.0) } else { clipped };
        trace.distances.push((&s - &input).norm());
        trace.cycles += 1;
        if (&s - &prev).norm() < 1e-10 {
            break;
        }
    }

    let s = exact_allocation(&input, p_r, cap)?;
    trace.final_distance = (&s - &input).norm();
    Ok((s, trace))
}

fn exact_allocation(input: &CVec, p_r: f64, cap: f64) -> Result<CVec> {
    let n = input.len();
    let mags: Vec<f64> = input.iter().map(|z| z.norm()).collect();
    let nonzero = mags.iter().filter(|&&a| a > 0.0).count();
    // If the nonzero entries cannot carry the energy even at the cap, they
    // saturate and the rest share the remainder equally.
    if (nonzero as f64) * cap * cap <= p_r * (1.0 + 1e-15) {
        let rest = n - nonzero;
        let rem = (p_r - nonzero as f64 * cap * cap).max(0.0);
        let fill = if rest > 0 { (rem / rest as f64).sqrt() } else { 0.0 };
        return Ok(CVec::from_fn(n, |i, _| {
            let z = input[i];
            if mags[i] > 0.0 {
                z * (cap / mags[i])
            } else {
                c(fill, 0.0)
            }
        }));
    }
    let energy = |beta: f64| mags.iter().map(|&a| (beta * a).min(cap).powi(2)).sum::<f64>();
    let beta = bisection_root(|b| p_r - energy(b), p_r * 1e-3)?;
    let mut s = CVec::from_fn(n, |i, _| {
        let r = (beta * mags[i]).min(cap);
        if mags[i] > 0.0 {
            input[i] * (r / mags[i])
        } else {
            c(0.0, 0.0)
        }
    });
    // Absorb the residual bisection error with a uniform rescale of the
    // entries below the cap.
    let e = s.norm_squared();
    let below: f64 = s.iter().filter(|z| z.norm() < cap * (1.0 - 1e-12)).map(|z| z.norm_sqr()).sum();
    if below > 0.0 {
        let f = ((below + p_r - e) / below).max(0.0).sqrt();
        for z in s.iter_mut() {
            if z.norm() < cap * (1.0 - 1e-12) {
                *z *= f;
            }
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cr;

    fn check(s: &CVec, p: f64, eta: f64) {
        let cap2 = eta * p / s.len() as f64;
        assert!((s.norm_squared() - p).abs() < 1e-9);
        assert!(s.iter().all(|z| z.norm_sqr() <= cap2 + 1e-9));
    }

    #[test]
    fn feasible_input_is_fixed_point() {
        let s = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)]);
        let (out, _) = project_sphere_box(&s, 4.0, 2.0).unwrap();
        assert!((&out - &s).norm() < 1e-12);
    }

    #[test]
    fn eta_one_is_constant_modulus() {
        let s = CVec::from_vec(vec![c(3.0, 0.0), c(0.1, 0.2), c(-0.5, 0.0), c(0.0, 0.0)]);
        let (out, _) = project_sphere_box(&s, 10.0, 1.0).unwrap();
        check(&out, 10.0, 1.0);
        assert!(out.iter().all(|z| (z.norm_sqr() - 2.5).abs() < 1e-9));
    }

    #[test]
    fn zero_input_gets_phase_ramp() {
        let s = CVec::from_element(6, cr(0.0));
        let (out, _) = project_sphere_box(&s, 3.0, 2.0).unwrap();
        check(&out, 3.0, 2.0);
    }

    #[test]
    fn distances_do_not_increase() {
        let s = CVec::from_fn(16, |i, _| c((i as f64).sin() * (i as f64), (i as f64 * 0.3).cos()));
        let (out, tr) = project_sphere_box(&s, 10.0, 3.0).unwrap();
        check(&out, 10.0, 3.0);
        for w in tr.distances.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn rejects_eta_below_one() {
        assert!(project_sphere_box(&CVec::from_element(2, cr(1.0)), 1.0, 0.5).is_err());
    }
}
