//! Classical and Bayesian parameter shift rules.
//!
//! The Bayesian forms are closed-form posteriors of the VQE-kernel GP
//! derivative at `x_hat + alpha' e_d` given `2V` equidistant observations at
//! `x_hat + (2w+1) pi / (2V) e_d`. They are transcribed directly and share no
//! code with [`crate::gp`], so each validates the other.

use std::f64::consts::PI;

use crate::error::PsrError;
use crate::wrap_angle;

/// Below this, a `sin` in a denominator is treated as a removable singularity.
const SINGULAR_TOL: f64 = 1e-8;

/// Shifted observation locations along one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftDesign {
    pub center: Vec<f64>,
    pub axis: usize,
    pub shifts: Vec<f64>,
    pub multiplicity: usize,
}

impl ShiftDesign {
    /// Offsets `(2w+1) pi / (2V)`, `w = 0..2V`.
    pub fn equidistant(center: &[f64], axis: usize, v: usize) -> Result<Self, PsrError> {
        if v == 0 {
            return Err(PsrError::ZeroMultiplicity);
        }
        check_axis(center, axis)?;
        let vf = v as f64;
        let shifts = (0..2 * v).map(|w| (2 * w + 1) as f64 * PI / (2.0 * vf)).collect();
        Ok(Self {
            center: center.to_vec(),
            axis,
            shifts,
            multiplicity: v,
        })
    }

    /// Offsets `{-alpha, +alpha}` for `V = 1`.
    pub fn first_order(center: &[f64], axis: usize, alpha: f64) -> Result<Self, PsrError> {
        check_alpha(alpha)?;
        check_axis(center, axis)?;
        Ok(Self {
            center: center.to_vec(),
            axis,
            shifts: vec![-alpha, alpha],
            multiplicity: 1,
        })
    }

    /// Shifted locations, each reduced to `[0, 2pi)`.
    pub fn points(&self) -> Vec<Vec<f64>> {
        self.shifts
            .iter()
            .map(|s| {
                let mut p: Vec<f64> = self.center.iter().map(|&c| wrap_angle(c)).collect();
                p[self.axis] = wrap_angle(self.center[self.axis] + s);
                p
            })
            .collect()
    }
}

fn check_axis(center: &[f64], axis: usize) -> Result<(), PsrError> {
    if axis >= center.len() {
        return Err(PsrError::LengthMismatch {
            expected: axis + 1,
            found: center.len(),
        });
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<(), PsrError> {
    if !alpha.is_finite() || alpha.sin().abs() < SINGULAR_TOL {
        return Err(PsrError::DegenerateShift(alpha));
    }
    Ok(())
}

fn check_positive(name: &'static str, value: f64) -> Result<(), PsrError> {
    if !(value > 0.0 && value.is_finite()) {
        return Err(PsrError::NonPositive { name, value });
    }
    Ok(())
}

/// The `2V` equidistant points around `x_hat` along `d`, reduced mod `2pi`.
pub fn equidistant_points(x_hat: &[f64], d: usize, v: usize) -> Result<Vec<Vec<f64>>, PsrError> {
    Ok(ShiftDesign::equidistant(x_hat, d, v)?.points())
}

/// Two-point shift rule `(y_plus - y_minus) / (2 sin alpha)`.
pub fn psr_first(y_minus: f64, y_plus: f64, alpha: f64) -> Result<f64, PsrError> {
    check_alpha(alpha)?;
    Ok((y_plus - y_minus) / (2.0 * alpha.sin()))
}

/// General shift rule on the equidistant design.
pub fn psr_general(y: &[f64], v: usize) -> Result<f64, PsrError> {
    if v == 0 {
        return Err(PsrError::ZeroMultiplicity);
    }
    if y.len() != 2 * v {
        return Err(PsrError::LengthMismatch {
            expected: 2 * v,
            found: y.len(),
        });
    }
    let vf = v as f64;
    let sum: f64 = y
        .iter()
        .enumerate()
        .map(|(w, &yw)| {
            let s = ((2 * w + 1) as f64 * PI / (4.0 * vf)).sin();
            alternating(w) * yw / (2.0 * s * s)
        })
        .sum();
    Ok(sum / (2.0 * vf))
}

fn alternating(w: usize) -> f64 {
    if w.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Posterior mean and variance of the derivative at `x_hat + alpha_prime e_d`
/// from `2V` equidistant observations with homoscedastic noise `sigma_sq`.
pub fn bpsr_closed_form(
    y: &[f64],
    v: usize,
    sigma_sq: f64,
    sigma0_sq: f64,
    gamma_sq: f64,
    alpha_prime: f64,
) -> Result<(f64, f64), PsrError> {
    if v == 0 {
        return Err(PsrError::ZeroMultiplicity);
    }
    if y.len() != 2 * v {
        return Err(PsrError::LengthMismatch {
            expected: 2 * v,
            found: y.len(),
        });
    }
    check_positive("sigma_sq", sigma_sq)?;
    check_positive("sigma0_sq", sigma0_sq)?;
    check_positive("gamma_sq", gamma_sq)?;
    if !alpha_prime.is_finite() {
        return Err(PsrError::DegenerateShift(alpha_prime));
    }

    let vf = v as f64;
    let a = (gamma_sq + 2.0 * vf) * sigma_sq / sigma0_sq;
    let cos_v = (vf * alpha_prime).cos();
    let mut num = 0.0;
    for (w, &yw) in y.iter().enumerate() {
        let phi = (2 * w + 1) as f64 * PI / (4.0 * vf);
        let s = (phi - alpha_prime / 2.0).sin();
        let head = if s.abs() < SINGULAR_TOL {
            // (-1)^w (T1 + T2) = 2 sum_v v sin(v((2w+1)pi/(2V) - alpha'))
            let t = 2.0 * phi - alpha_prime;
            alternating(w) * (1..=v).map(|k| 2.0 * k as f64 * (k as f64 * t).sin()).sum::<f64>()
        } else {
            let t1 = cos_v / (2.0 * s * s);
            let t2 = vf * (phi - (vf + 0.5) * alpha_prime).sin() / s;
            t1 + t2
        };
        num += alternating(w) * yw * head - alternating(w) * yw * 4.0 * vf * vf * cos_v / (a + 4.0 * vf);
    }
    let mean = num / (a + 2.0 * vf);

    let cos_2v = (2.0 * vf * alpha_prime).cos();
    let var = sigma_sq
        * (vf * (vf + 1.0) * (2.0 * vf + 1.0) / (3.0 * (a + 2.0 * vf))
            - 4.0 * vf.powi(3) * cos_2v / ((a + 2.0 * vf) * (a + 4.0 * vf)))
        - sigma0_sq * 8.0 * vf.powi(4) * (cos_2v - 1.0)
            / ((gamma_sq + 2.0 * vf) * (a + 2.0 * vf) * (a + 4.0 * vf));
    Ok((mean, var))
}

/// Posterior mean and variance of the derivative at `x_hat` for `V = 1` from
/// `y1` at `x_hat - alpha` and `y2` at `x_hat + alpha`.
pub fn bpsr_first_closed_form(
    y1: f64,
    y2: f64,
    alpha: f64,
    sigma_sq: f64,
    sigma0_sq: f64,
    gamma_sq: f64,
) -> Result<(f64, f64), PsrError> {
    check_alpha(alpha)?;
    check_positive("sigma_sq", sigma_sq)?;
    check_positive("sigma0_sq", sigma0_sq)?;
    check_positive("gamma_sq", gamma_sq)?;
    let s = alpha.sin();
    let denom = (gamma_sq / 2.0 + 1.0) * sigma_sq / sigma0_sq + 2.0 * s * s;
    Ok(((y2 - y1) * s / denom, sigma_sq / denom))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, TAU};

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::gp::{posterior, Dataset, KernelParams, Observation, Query};

    fn gp_reference(y: &[f64], v: usize, s2: f64, s0: f64, g2: f64, ap: f64) -> (f64, f64) {
        let p = KernelParams::new(g2, s0, vec![v]).unwrap();
        let x_hat = [0.7];
        let mut ds = Dataset::new(1);
        for (pt, &yw) in equidistant_points(&x_hat, 0, v).unwrap().into_iter().zip(y) {
            ds.push(Observation::value(pt, yw, s2)).unwrap();
        }
        let post = posterior(&ds, &[Query::deriv(&[x_hat[0] + ap], 0)], &p).unwrap();
        (post.mean[0], post.variance(0))
    }

    // relative, with an absolute floor for values that are zero up to rounding
    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-6)
    }

    #[test]
    fn psr_first_basics() {
        assert_eq!(psr_first(0.3, 0.3, 1.0).unwrap(), 0.0);
        assert!((psr_first(-1.0, 1.0, FRAC_PI_2).unwrap() - 1.0).abs() < 1e-15);
        assert!(psr_first(0.0, 1.0, 0.0).is_err());
        assert!(psr_first(0.0, 1.0, PI).is_err());
    }

    #[test]
    fn psr_general_basics() {
        assert!((psr_general(&[1.0, -1.0], 1).unwrap() - 1.0).abs() < 1e-15);
        // V=1 equidistant points are x+pi/2 and x-pi/2
        let f = |t: f64| 0.4 + 1.3 * t.sin() - 0.2 * t.cos();
        let y = [f(FRAC_PI_2), f(-FRAC_PI_2)];
        let a = psr_general(&y, 1).unwrap();
        let b = psr_first(y[1], y[0], FRAC_PI_2).unwrap();
        assert!((a - b).abs() < 1e-14);
        assert!(psr_general(&[2.0; 6], 3).unwrap().abs() < 1e-14);
        let y: Vec<f64> = (0..4).map(|w| ((2 * w + 1) as f64 * PI / 4.0 * 2.0).cos()).collect();
        assert!(psr_general(&y, 2).unwrap().abs() < 1e-14);
        assert!(psr_general(&[1.0, 2.0, 3.0], 1).is_err());
    }

    #[test]
    fn psr_general_is_exact_on_trig_polynomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for v in 1..=4 {
            let a: Vec<f64> = (0..v).map(|_| rng.random::<f64>() - 0.5).collect();
            let b: Vec<f64> = (0..v).map(|_| rng.random::<f64>() - 0.5).collect();
            let f = |t: f64| (0..v).map(|k| a[k] * ((k + 1) as f64 * t).cos() + b[k] * ((k + 1) as f64 * t).sin()).sum::<f64>();
            let df0: f64 = (0..v).map(|k| (k + 1) as f64 * b[k]).sum();
            let y: Vec<f64> = (0..2 * v).map(|w| f((2 * w + 1) as f64 * PI / (2.0 * v as f64))).collect();
            assert!((psr_general(&y, v).unwrap() - df0).abs() < 1e-12);
        }
    }

    #[test]
    fn equidistant_offsets() {
        let pts = equidistant_points(&[0.0, 0.0], 0, 1).unwrap();
        assert!((pts[0][0] - FRAC_PI_2).abs() < 1e-15);
        assert!((pts[1][0] - 3.0 * FRAC_PI_2).abs() < 1e-15);
        let pts = equidistant_points(&[0.0], 0, 2).unwrap();
        for (w, p) in pts.iter().enumerate() {
            assert!((p[0] - (2 * w + 1) as f64 * PI / 4.0).abs() < 1e-15);
        }
        for p in equidistant_points(&[6.0, 5.9, -0.3], 1, 3).unwrap() {
            assert!(p.iter().all(|&c| (0.0..TAU).contains(&c)));
        }
        assert!(equidistant_points(&[0.0], 1, 1).is_err());
    }

    #[test]
    fn closed_form_matches_gp() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for v in 1..=3 {
            for g2 in [1.0, 3.0, 9.0] {
                for ratio in [1e-4, 1e-2, 1e-1] {
                    let s0 = 100.0;
                    let y: Vec<f64> = (0..2 * v).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
                    for i in 0..16 {
                        let ap = i as f64 * TAU / 16.0;
                        let (m, s) = bpsr_closed_form(&y, v, ratio * s0, s0, g2, ap).unwrap();
                        let (mg, sg) = gp_reference(&y, v, ratio * s0, s0, g2, ap);
                        assert!(rel_close(m, mg, 1e-8), "mean v={v} g2={g2} r={ratio} ap={ap}: {m} vs {mg}");
                        assert!(rel_close(s, sg, 1e-8), "var v={v} g2={g2} r={ratio} ap={ap}: {s} vs {sg}");
                    }
                }
            }
        }
    }

    #[test]
    fn singular_branch_matches_gp() {
        // alpha' on a training offset puts a zero in a sin^2 denominator
        let y = [0.3, -0.8, 0.5, 0.1];
        for w in 0..4 {
            let ap = (2 * w + 1) as f64 * PI / 4.0;
            let (m, s) = bpsr_closed_form(&y, 2, 0.01, 100.0, 9.0, ap).unwrap();
            let (mg, sg) = gp_reference(&y, 2, 0.01, 100.0, 9.0, ap);
            assert!(rel_close(m, mg, 1e-8), "{m} vs {mg}");
            assert!(rel_close(s, sg, 1e-8));
        }
    }

    #[test]
    fn noiseless_limit_is_general_psr() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for v in 1..=3 {
            let y: Vec<f64> = (0..2 * v).map(|_| rng.random::<f64>() - 0.5).collect();
            let classical = psr_general(&y, v).unwrap();
            let (m, _) = bpsr_closed_form(&y, v, 1e-12, 1.0, 9.0, 0.0).unwrap();
            assert!((m - classical).abs() <= 1e-6 * classical.abs());
            // gap shrinks at least linearly with the noise ratio
            let gap = |r: f64| (bpsr_closed_form(&y, v, r, 1.0, 9.0, 0.0).unwrap().0 - classical).abs();
            let (g1, g2) = (gap(1e-3), gap(5e-4));
            assert!(g2 <= 0.5 * g1 * (1.0 + 1e-2), "v={v}: {g1} -> {g2}");
        }
    }

    #[test]
    fn symmetric_observations_give_zero_mean() {
        for v in 1..=3 {
            let y: Vec<f64> = (0..2 * v).map(|w| (w.min(2 * v - 1 - w)) as f64 * 0.3 + 1.0).collect();
            let (m, _) = bpsr_closed_form(&y, v, 0.1, 1.0, 3.0, 0.0).unwrap();
            assert!(m.abs() < 1e-12);
        }
    }

    #[test]
    fn variance_is_periodic_in_alpha_prime() {
        for v in 1..=3 {
            let period = PI / v as f64;
            for i in 0..10 {
                let ap = 0.37 * i as f64;
                let a = bpsr_closed_form(&vec![0.0; 2 * v], v, 0.5, 2.0, 3.0, ap).unwrap().1;
                let b = bpsr_closed_form(&vec![0.0; 2 * v], v, 0.5, 2.0, 3.0, ap + period).unwrap().1;
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn first_order_form_matches_general_and_gp() {
        let (s2, s0, g2) = (0.3, 100.0, 3.0);
        // at alpha = pi/2 the first-order design is the V=1 equidistant design
        let (m1, v1) = bpsr_first_closed_form(-0.4, 0.9, FRAC_PI_2, s2, s0, g2).unwrap();
        let (m2, v2) = bpsr_closed_form(&[0.9, -0.4], 1, s2, s0, g2, 0.0).unwrap();
        assert!(rel_close(m1, m2, 1e-12) && rel_close(v1, v2, 1e-12));

        let p = KernelParams::new(g2, s0, vec![1]).unwrap();
        for alpha in [0.2, 1.0, 2.5] {
            let mut ds = Dataset::new(1);
            ds.push(Observation::value(vec![1.0 - alpha], -0.4, s2)).unwrap();
            ds.push(Observation::value(vec![1.0 + alpha], 0.9, s2)).unwrap();
            let post = posterior(&ds, &[Query::deriv(&[1.0], 0)], &p).unwrap();
            let (m, v) = bpsr_first_closed_form(-0.4, 0.9, alpha, s2, s0, g2).unwrap();
            assert!(rel_close(m, post.mean[0], 1e-8) && rel_close(v, post.variance(0), 1e-8));
        }
    }

    #[test]
    fn first_order_limit_and_shrinkage() {
        let (m, _) = bpsr_first_closed_form(0.0, 1.0, FRAC_PI_2, 1e-12, 1.0, 9.0).unwrap();
        assert!((m - 0.5).abs() < 1e-9);
        assert_eq!(bpsr_first_closed_form(0.2, 0.2, 1.1, 0.5, 1.0, 3.0).unwrap().0, 0.0);
        let classical = psr_general(&[0.7, -0.1], 1).unwrap();
        let (m, _) = bpsr_closed_form(&[0.7, -0.1], 1, 0.2, 1.0, 3.0, 0.0).unwrap();
        assert!(m.abs() <= classical.abs());
        assert!(bpsr_first_closed_form(0.0, 1.0, 0.0, 0.1, 1.0, 1.0).is_err());
        assert!(bpsr_first_closed_form(0.0, 1.0, 1.0, 0.0, 1.0, 1.0).is_err());
    }
}
