use serde::{Deserialize, Serialize};

use crate::wrap_angle;

/// ADAM hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdamParams {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamParams {
    fn default() -> Self {
        Self {
            learning_rate: 0.05,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Moment estimates of a bias-corrected ADAM optimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub first_moment: Vec<f64>,
    pub second_moment: Vec<f64>,
    pub step_count: u64,
    pub params: AdamParams,
}

impl AdamState {
    pub fn new(dim: usize, params: AdamParams) -> Self {
        Self {
            first_moment: vec![0.0; dim],
            second_moment: vec![0.0; dim],
            step_count: 0,
            params,
        }
    }
}

/// One ADAM step on the torus: returns the new state and `x` moved against
/// `grad`, reduced to `[0, 2pi)`.
pub fn adam_update(s: &AdamState, grad: &[f64], x: &[f64]) -> (AdamState, Vec<f64>) {
    let p = s.params;
    let t = s.step_count + 1;
    let bc1 = 1.0 - p.beta1.powi(t as i32);
    let bc2 = 1.0 - p.beta2.powi(t as i32);
    let mut next = s.clone();
    next.step_count = t;
    let mut x_new = Vec::with_capacity(x.len());
    for (d, (&g, &xd)) in grad.iter().zip(x).enumerate() {
        let m = p.beta1 * s.first_moment[d] + (1.0 - p.beta1) * g;
        let v = p.beta2 * s.second_moment[d] + (1.0 - p.beta2) * g * g;
        next.first_moment[d] = m;
        next.second_moment[d] = v;
        let step = p.learning_rate * (m / bc1) / ((v / bc2).sqrt() + p.epsilon);
        x_new.push(wrap_angle(xd - step));
    }
    (next, x_new)
}
