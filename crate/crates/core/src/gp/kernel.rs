//! The VQE kernel and its first-order derivative kernels.
//!
//! For one axis with multiplicity `V` and separation `t = x_d - x2_d` the
//! per-axis factors are
//!
//! ```text
//! f(t) = (g2 + 2 sum_v cos(v t)) / (g2 + 2V)        value factor
//! g(t) = 2 sum_v v sin(v t) / (g2 + 2V)             d f / d x2_d
//! h(t) = 2 sum_v v^2 cos(v t) / (g2 + 2V)           d^2 f / (d x_d d x2_d)
//! ```
//!
//! and `d f / d x_d = -g(t)`. The full kernel is `sigma0^2` times the product
//! of per-axis factors, with the derivative factors substituted on the axes
//! that carry a derivative tag.

use serde::{Deserialize, Serialize};

use crate::error::GpError;

/// Hyperparameters of the VQE kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub gamma_sq: f64,
    pub sigma0_sq: f64,
    pub multiplicities: Vec<usize>,
}

impl KernelParams {
    pub fn new(gamma_sq: f64, sigma0_sq: f64, multiplicities: Vec<usize>) -> Result<Self, GpError> {
        if !(gamma_sq > 0.0 && gamma_sq.is_finite()) {
            return Err(GpError::InvalidKernelParam {
                name: "gamma_sq",
                value: gamma_sq,
            });
        }
        if !(sigma0_sq > 0.0 && sigma0_sq.is_finite()) {
            return Err(GpError::InvalidKernelParam {
                name: "sigma0_sq",
                value: sigma0_sq,
            });
        }
        if let Some(&v) = multiplicities.iter().find(|&&v| v == 0) {
            return Err(GpError::InvalidKernelParam {
                name: "multiplicity",
                value: v as f64,
            });
        }
        Ok(Self {
            gamma_sq,
            sigma0_sq,
            multiplicities,
        })
    }

    /// All-ones multiplicities for a `dim`-parameter circuit.
    pub fn uniform(gamma_sq: f64, sigma0_sq: f64, dim: usize) -> Result<Self, GpError> {
        Self::new(gamma_sq, sigma0_sq, vec![1; dim])
    }

    pub fn dim(&self) -> usize {
        self.multiplicities.len()
    }

    fn norm(&self, d: usize) -> f64 {
        self.gamma_sq + 2.0 * self.multiplicities[d] as f64
    }
}

/// Which output a GP location carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OutputTag {
    Value,
    /// Partial derivative along the given 0-based axis.
    Deriv(usize),
}

/// Per-axis factors `(f, g, h)` at separation `t`, from explicit cosine sums.
pub(crate) fn axis_factors_direct(t: f64, v_max: usize, gamma_sq: f64) -> (f64, f64, f64) {
    let mut c = 0.0;
    let mut s = 0.0;
    let mut c2 = 0.0;
    for v in 1..=v_max {
        let vf = v as f64;
        let (sv, cv) = (vf * t).sin_cos();
        c += cv;
        s += vf * sv;
        c2 += vf * vf * cv;
    }
    let norm = gamma_sq + 2.0 * v_max as f64;
    ((gamma_sq + 2.0 * c) / norm, 2.0 * s / norm, 2.0 * c2 / norm)
}

/// Per-axis factors from precomputed `cos t`, `sin t`, using the angle
/// addition recurrence for the higher harmonics.
#[inline]
pub(crate) fn axis_factors(cos_t: f64, sin_t: f64, v_max: usize, gamma_sq: f64) -> (f64, f64, f64) {
    if v_max == 1 {
        let norm = gamma_sq + 2.0;
        return ((gamma_sq + 2.0 * cos_t) / norm, 2.0 * sin_t / norm, 2.0 * cos_t / norm);
    }
    let (mut cv, mut sv) = (cos_t, sin_t);
    let mut c = 0.0;
    let mut s = 0.0;
    let mut c2 = 0.0;
    for v in 1..=v_max {
        let vf = v as f64;
        c += cv;
        s += vf * sv;
        c2 += vf * vf * cv;
        let next_c = cv * cos_t - sv * sin_t;
        let next_s = sv * cos_t + cv * sin_t;
        cv = next_c;
        sv = next_s;
    }
    let norm = gamma_sq + 2.0 * v_max as f64;
    ((gamma_sq + 2.0 * c) / norm, 2.0 * s / norm, 2.0 * c2 / norm)
}

fn check_dims(x: &[f64], x2: &[f64], p: &KernelParams) -> Result<(), GpError> {
    for len in [x.len(), x2.len()] {
        if len != p.dim() {
            return Err(GpError::DimensionMismatch {
                expected: p.dim(),
                found: len,
            });
        }
    }
    Ok(())
}

fn check_axis(d: usize, p: &KernelParams) -> Result<(), GpError> {
    if d >= p.dim() {
        return Err(GpError::AxisOutOfRange { axis: d, dim: p.dim() });
    }
    Ok(())
}

/// `k(x, x2) = sigma0^2 prod_d f_d(x_d - x2_d)`.
pub fn vqe_kernel(x: &[f64], x2: &[f64], p: &KernelParams) -> Result<f64, GpError> {
    tagged_kernel(x, OutputTag::Value, x2, OutputTag::Value, p)
}

/// `d k(x, x2) / d x2_d`: value output at `x`, derivative output at `x2`.
pub fn kernel_deriv_cross(x: &[f64], x2: &[f64], d: usize, p: &KernelParams) -> Result<f64, GpError> {
    tagged_kernel(x, OutputTag::Value, x2, OutputTag::Deriv(d), p)
}

/// `d^2 k(x, x2) / (d x_d d x2_d2)`.
pub fn kernel_deriv_both(
    x: &[f64],
    d: usize,
    x2: &[f64],
    d2: usize,
    p: &KernelParams,
) -> Result<f64, GpError> {
    tagged_kernel(x, OutputTag::Deriv(d), x2, OutputTag::Deriv(d2), p)
}

/// Kernel between the outputs `tag` at `x` and `tag2` at `x2`.
pub fn tagged_kernel(
    x: &[f64],
    tag: OutputTag,
    x2: &[f64],
    tag2: OutputTag,
    p: &KernelParams,
) -> Result<f64, GpError> {
    check_dims(x, x2, p)?;
    for t in [tag, tag2] {
        if let OutputTag::Deriv(d) = t {
            check_axis(d, p)?;
        }
    }
    let mut prod = p.sigma0_sq;
    for d in 0..p.dim() {
        let (f, g, h) = axis_factors_direct(x[d] - x2[d], p.multiplicities[d], p.gamma_sq);
        prod *= axis_term(d, tag, tag2, f, g, h);
    }
    Ok(prod)
}

#[inline]
fn axis_term(d: usize, tag: OutputTag, tag2: OutputTag, f: f64, g: f64, h: f64) -> f64 {
    let left = tag == OutputTag::Deriv(d);
    let right = tag2 == OutputTag::Deriv(d);
    match (left, right) {
        (false, false) => f,
        (false, true) => g,
        (true, false) => -g,
        (true, true) => h,
    }
}

/// Location with cached `cos x_d`, `sin x_d` for fast kernel rows.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Features {
    pub x: Vec<f64>,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl Features {
    pub fn new(x: &[f64]) -> Self {
        let (sin, cos) = x.iter().map(|v| v.sin_cos()).unzip();
        Self {
            x: x.to_vec(),
            cos,
            sin,
        }
    }

    /// `cos` and `sin` of `self.x_d - other.x_d`.
    #[inline]
    fn diff(&self, other: &Features, d: usize) -> (f64, f64) {
        (
            self.cos[d] * other.cos[d] + self.sin[d] * other.sin[d],
            self.sin[d] * other.cos[d] - self.cos[d] * other.sin[d],
        )
    }
}

/// Fast tagged kernel over cached features; agrees with [`tagged_kernel`].
pub(crate) fn kernel_features(
    a: &Features,
    tag: OutputTag,
    b: &Features,
    tag2: OutputTag,
    p: &KernelParams,
) -> f64 {
    let mut prod = p.sigma0_sq;
    for d in 0..a.x.len() {
        let (c, s) = a.diff(b, d);
        let (f, g, h) = axis_factors(c, s, p.multiplicities[d], p.gamma_sq);
        prod *= axis_term(d, tag, tag2, f, g, h);
    }
    prod
}

/// Kernels between a value output at `a` and the derivative output at `b`
/// along every axis: `out[e] = d k(a, b) / d b_e`.
pub(crate) fn value_to_all_derivs(a: &Features, b: &Features, p: &KernelParams, out: &mut [f64]) {
    let dim = a.x.len();
    let mut fs = Vec::with_capacity(dim);
    let mut gs = Vec::with_capacity(dim);
    for d in 0..dim {
        let (c, s) = a.diff(b, d);
        let (f, g, _) = axis_factors(c, s, p.multiplicities[d], p.gamma_sq);
        fs.push(f);
        gs.push(g);
    }
    // prefix products excluding axis e
    let mut prefix = p.sigma0_sq;
    for e in 0..dim {
        out[e] = prefix * gs[e];
        prefix *= fs[e];
    }
    let mut suffix = 1.0;
    for e in (0..dim).rev() {
        out[e] *= suffix;
        suffix *= fs[e];
    }
}

/// Prior variance of `d f / d x_d` at any point: `sigma0^2 h_d(0)`.
pub fn prior_derivative_variance(d: usize, p: &KernelParams) -> f64 {
    let v = p.multiplicities[d] as f64;
    p.sigma0_sq * v * (v + 1.0) * (2.0 * v + 1.0) / (3.0 * p.norm(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params(v: Vec<usize>) -> KernelParams {
        KernelParams::new(1.7, 2.5, v).unwrap()
    }

    #[test]
    fn equal_points_give_prior_variance() {
        let p = params(vec![1, 2, 3]);
        let x = [0.3, 1.2, 5.0];
        assert!((vqe_kernel(&x, &x, &p).unwrap() - 2.5).abs() < 1e-14);
    }

    #[test]
    fn single_axis_at_pi() {
        let p = KernelParams::new(1.0, 1.0, vec![1]).unwrap();
        let k = vqe_kernel(&[0.0], &[PI], &p).unwrap();
        // direct-sum oracle: (1 + 2 cos(pi)) / 3
        let direct = (1.0 + 2.0 * (1.0 * PI).cos()) / 3.0;
        assert!((k - direct).abs() < 1e-15);
        assert!((k + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn cross_derivative_vanishes_at_coincidence_and_is_antisymmetric() {
        let p = params(vec![2, 1]);
        let x = [0.4, 2.0];
        assert!(kernel_deriv_cross(&x, &x, 0, &p).unwrap().abs() < 1e-15);
        let y = [1.1, 0.3];
        let ab = tagged_kernel(&x, OutputTag::Value, &y, OutputTag::Deriv(1), &p).unwrap();
        let ba = tagged_kernel(&y, OutputTag::Deriv(1), &x, OutputTag::Value, &p).unwrap();
        assert!((ab - ba).abs() < 1e-15);
        let swapped = tagged_kernel(&y, OutputTag::Value, &x, OutputTag::Deriv(1), &p).unwrap();
        assert!((ab + swapped).abs() < 1e-14);
    }

    #[test]
    fn both_derivative_at_coincidence() {
        let p = KernelParams::new(9.0, 100.0, vec![1, 1]).unwrap();
        let x = [0.7, 3.1];
        let same = kernel_deriv_both(&x, 0, &x, 0, &p).unwrap();
        assert!((same - 100.0 * 2.0 / 11.0).abs() < 1e-12);
        assert!(kernel_deriv_both(&x, 0, &x, 1, &p).unwrap().abs() < 1e-15);
        assert!((prior_derivative_variance(0, &p) - same).abs() < 1e-12);
    }

    #[test]
    fn fast_path_matches_direct() {
        let p = params(vec![1, 3, 2]);
        let a = [0.1, 4.0, 2.2];
        let b = [5.9, 0.7, 1.3];
        let (fa, fb) = (Features::new(&a), Features::new(&b));
        let tags = [
            OutputTag::Value,
            OutputTag::Deriv(0),
            OutputTag::Deriv(1),
            OutputTag::Deriv(2),
        ];
        for &t1 in &tags {
            for &t2 in &tags {
                let slow = tagged_kernel(&a, t1, &b, t2, &p).unwrap();
                let fast = kernel_features(&fa, t1, &fb, t2, &p);
                assert!((slow - fast).abs() < 1e-12, "{t1:?} {t2:?}");
            }
        }
        let mut out = [0.0; 3];
        value_to_all_derivs(&fa, &fb, &p, &mut out);
        for (e, o) in out.iter().enumerate() {
            let slow = kernel_deriv_cross(&a, &b, e, &p).unwrap();
            assert!((slow - o).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(KernelParams::new(0.0, 1.0, vec![1]).is_err());
        assert!(KernelParams::new(1.0, -1.0, vec![1]).is_err());
        assert!(KernelParams::new(1.0, 1.0, vec![1, 0]).is_err());
        let p = params(vec![1]);
        assert!(vqe_kernel(&[0.0, 1.0], &[0.0], &p).is_err());
        assert!(kernel_deriv_cross(&[0.0], &[0.0], 1, &p).is_err());
    }
}
