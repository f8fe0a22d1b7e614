//! One-dimensional trigonometric regression used by the SMO optimizers.

use std::f64::consts::{SQRT_2, TAU};

use nalgebra::{DMatrix, DVector};

use crate::error::OptError;
use crate::wrap_angle;

const GRID: usize = 256;
const REFINE_TOL: f64 = 1e-10;

/// Coefficients `b` of `f(theta) = b^T psi(theta)` with
/// `psi = (1, sqrt2 cos theta, .., sqrt2 cos V theta, sqrt2 sin theta, .., sqrt2 sin V theta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigCoeffs {
    pub order: usize,
    pub b: Vec<f64>,
}

fn basis(theta: f64, v: usize) -> Vec<f64> {
    let mut row = Vec::with_capacity(1 + 2 * v);
    row.push(1.0);
    row.extend((1..=v).map(|k| SQRT_2 * (k as f64 * theta).cos()));
    row.extend((1..=v).map(|k| SQRT_2 * (k as f64 * theta).sin()));
    row
}

impl TrigCoeffs {
    pub fn eval(&self, theta: f64) -> f64 {
        basis(theta, self.order).iter().zip(&self.b).map(|(p, b)| p * b).sum()
    }

    pub fn derivative(&self, theta: f64) -> f64 {
        let v = self.order;
        (1..=v)
            .map(|k| {
                let kf = k as f64;
                SQRT_2 * kf * (-self.b[k] * (kf * theta).sin() + self.b[v + k] * (kf * theta).cos())
            })
            .sum()
    }
}

/// Weighted least-squares fit of an order-`v` trigonometric polynomial.
pub fn fit_1d_trig(thetas: &[f64], ys: &[f64], sigmas: &[f64], v: usize) -> Result<TrigCoeffs, OptError> {
    let n = thetas.len();
    if ys.len() != n || sigmas.len() != n {
        return Err(OptError::Config(format!(
            "fit inputs differ in length: {n} angles, {} values, {} noise levels",
            ys.len(),
            sigmas.len()
        )));
    }
    let needed = 2 * v + 1;
    if n < needed {
        return Err(OptError::TooFewPoints { needed, v, found: n });
    }
    if sigmas.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(OptError::Config("noise levels must be positive".into()));
    }
    let design = DMatrix::from_fn(n, needed, |i, j| basis(thetas[i], v)[j] / sigmas[i]);
    let rhs = DVector::from_iterator(n, ys.iter().zip(sigmas).map(|(y, s)| y / s));
    let svd = design.svd(true, true);
    let smax = svd.singular_values.max();
    if svd.singular_values.min() <= 1e-10 * smax {
        return Err(OptError::RankDeficient);
    }
    let b = svd.solve(&rhs, 0.0).map_err(|_| OptError::RankDeficient)?;
    Ok(TrigCoeffs {
        order: v,
        b: b.iter().copied().collect(),
    })
}

/// Global minimizer of the fitted polynomial in `[0, 2pi)`.
pub fn argmin_1d_trig(c: &TrigCoeffs) -> f64 {
    if c.order == 1 {
        let (bc, bs) = (c.b[1], c.b[2]);
        if bc == 0.0 && bs == 0.0 {
            return 0.0;
        }
        return wrap_angle((-bs).atan2(-bc));
    }
    let h = TAU / GRID as f64;
    let vals: Vec<f64> = (0..GRID).map(|i| c.eval(i as f64 * h)).collect();
    let mut best = (0.0, f64::INFINITY);
    for i in 0..GRID {
        let prev = vals[(i + GRID - 1) % GRID];
        let next = vals[(i + 1) % GRID];
        if vals[i] <= prev && vals[i] <= next {
            let theta = golden_section(c, (i as f64 - 1.0) * h, (i as f64 + 1.0) * h);
            let f = c.eval(theta);
            if f < best.1 {
                best = (theta, f);
            }
        }
    }
    wrap_angle(best.0)
}

fn golden_section(c: &TrigCoeffs, mut lo: f64, mut hi: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (c.eval(x1), c.eval(x2));
    while hi - lo > REFINE_TOL {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = c.eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = c.eval(x2);
        }
    }
    0.5 * (lo + hi)
}
