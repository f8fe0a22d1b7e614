use crate::error::OptError;

/// Threshold schedule for the per-axis gradient variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaSchedule {
    /// Floor, in variance units.
    pub c0: f64,
    /// Slope on the mean squared gradient.
    pub c1: f64,
    pub t_initial: usize,
    /// Threshold used for the first `t_initial` steps.
    pub kappa0_sq: f64,
}

impl KappaSchedule {
    pub fn new(c0: f64, c1: f64, t_initial: usize, kappa0_sq: f64) -> Result<Self, OptError> {
        for (name, v) in [("c0", c0), ("c1", c1), ("kappa0_sq", kappa0_sq)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(OptError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self {
            c0,
            c1,
            t_initial,
            kappa0_sq,
        })
    }
}

/// Per-axis thresholds `kappa_d^2` after step `t`.
pub fn kappa_update(sched: &KappaSchedule, grad_mean: &[f64], t: usize) -> Vec<f64> {
    let dim = grad_mean.len();
    if t < sched.t_initial || dim == 0 {
        return vec![sched.kappa0_sq; dim];
    }
    let mean_sq = grad_mean.iter().map(|g| g * g).sum::<f64>() / dim as f64;
    vec![sched.c0.max(sched.c1 * mean_sq); dim]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sched() -> KappaSchedule {
        KappaSchedule::new(1e-12, 1.2, 5, 0.25).unwrap()
    }

    #[test]
    fn floor_and_warmup() {
        let s = sched();
        assert_eq!(kappa_update(&s, &[0.0, 0.0], 7), vec![1e-12; 2]);
        assert_eq!(kappa_update(&s, &[100.0, 3.0], 4), vec![0.25; 2]);
    }

    #[test]
    fn slope_on_mean_square() {
        let k = kappa_update(&sched(), &[3.0, 4.0], 5);
        assert!((k[0] - 15.0).abs() < 1e-12);
    }

    #[test]
    fn scales_quadratically() {
        let g = [0.3, -0.1, 0.2];
        let base = kappa_update(&sched(), &g, 10)[0];
        for s in [1.0, 2.0, 7.5] {
            let scaled: Vec<f64> = g.iter().map(|v| v * s).collect();
            let k = kappa_update(&sched(), &scaled, 10)[0];
            assert!((k - base * s * s).abs() <= 1e-12 * k);
        }
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(KappaSchedule::new(0.0, 1.0, 0, 1.0).is_err());
    }
}
