//! Fitted GP with cached kernel matrix and a growable Cholesky factor.

use nalgebra::DMatrix;

use super::cholesky::Cholesky;
use super::dataset::{Dataset, Observation};
use super::kernel::{
    kernel_features, prior_derivative_variance, value_to_all_derivs, Features, KernelParams,
    OutputTag,
};
use crate::error::GpError;

/// Relative floor on observation noise variances.
pub const NOISE_FLOOR: f64 = 1e-12;

/// Covariance entries this far below zero are treated as rounding noise.
const NEG_DIAG_SLACK: f64 = 1e-9;

/// A test output: value or partial derivative at a location.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub location: Vec<f64>,
    pub tag: OutputTag,
}

impl Query {
    pub fn value(location: &[f64]) -> Self {
        Self {
            location: location.to_vec(),
            tag: OutputTag::Value,
        }
    }

    pub fn deriv(location: &[f64], axis: usize) -> Self {
        Self {
            location: location.to_vec(),
            tag: OutputTag::Deriv(axis),
        }
    }
}

/// Joint posterior over a batch of queries.
#[derive(Debug, Clone, PartialEq)]
pub struct GpPosterior {
    pub mean: Vec<f64>,
    pub cov: DMatrix<f64>,
}

impl GpPosterior {
    pub fn variance(&self, i: usize) -> f64 {
        self.cov[(i, i)]
    }
}

/// How a dataset is pruned as it grows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RetentionPolicy {
    /// Once more than `limit + sum_d 2 V_d` observations are stored, keep
    /// the latest `limit`.
    SgdWindow,
    /// Once more than `limit - 1 + D` observations are stored, keep the latest
    /// `limit - 1` and add one pseudo-observation at the current optimum
    /// carrying the posterior mean and variance of the full dataset.
    NftInducer,
}

#[derive(Debug, Clone)]
pub struct GpModel {
    params: KernelParams,
    feats: Vec<Features>,
    tags: Vec<OutputTag>,
    y: Vec<f64>,
    noise: Vec<f64>,
    kmat: Vec<Vec<f64>>,
    chol: Cholesky,
    alpha: Vec<f64>,
}

impl GpModel {
    pub fn new(params: KernelParams) -> Self {
        Self {
            params,
            feats: Vec::new(),
            tags: Vec::new(),
            y: Vec::new(),
            noise: Vec::new(),
            kmat: Vec::new(),
            chol: Cholesky::default(),
            alpha: Vec::new(),
        }
    }

    pub fn fit(ds: &Dataset, params: &KernelParams) -> Result<Self, GpError> {
        if ds.dim() != params.dim() {
            return Err(GpError::DimensionMismatch {
                expected: params.dim(),
                found: ds.dim(),
            });
        }
        let mut model = Self::new(params.clone());
        model.extend(ds.observations())?;
        Ok(model)
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Jitter currently added to the kernel diagonal.
    pub fn jitter(&self) -> f64 {
        self.chol.jitter()
    }

    /// Training set as a [`Dataset`] (noise variances after flooring).
    pub fn dataset(&self) -> Dataset {
        let mut ds = Dataset::new(self.params.dim());
        for i in 0..self.len() {
            ds.push(Observation {
                location: self.feats[i].x.clone(),
                tag: self.tags[i],
                value: self.y[i],
                noise_var: self.noise[i],
            })
            .expect("stored observations are valid");
        }
        ds
    }

    fn floor(&self) -> f64 {
        NOISE_FLOOR * self.params.sigma0_sq
    }

    fn validate(&self, obs: &Observation) -> Result<(), GpError> {
        if obs.location.len() != self.params.dim() {
            return Err(GpError::DimensionMismatch {
                expected: self.params.dim(),
                found: obs.location.len(),
            });
        }
        if let OutputTag::Deriv(axis) = obs.tag {
            if axis >= self.params.dim() {
                return Err(GpError::AxisOutOfRange {
                    axis,
                    dim: self.params.dim(),
                });
            }
        }
        Ok(())
    }

    /// Appends observations, extending the factor incrementally.
    pub fn extend(&mut self, obs: &[Observation]) -> Result<(), GpError> {
        for o in obs {
            self.validate(o)?;
        }
        let mut needs_refactor = false;
        for o in obs {
            let feat = Features::new(&o.location);
            let mut col: Vec<f64> = self
                .feats
                .iter()
                .zip(&self.tags)
                .map(|(f, &t)| kernel_features(f, t, &feat, o.tag, &self.params))
                .collect();
            let kdiag = kernel_features(&feat, o.tag, &feat, o.tag, &self.params);
            let noise = o.noise_var.max(self.floor());
            if !needs_refactor && !self.chol.push(&col, kdiag + noise) {
                needs_refactor = true;
            }
            for (row, &c) in self.kmat.iter_mut().zip(&col) {
                row.push(c);
            }
            col.push(kdiag);
            self.kmat.push(col);
            self.feats.push(feat);
            self.tags.push(o.tag);
            self.y.push(o.value);
            self.noise.push(noise);
        }
        if needs_refactor {
            self.refactor()?;
        } else {
            self.alpha = self.chol.solve(&self.y);
        }
        Ok(())
    }

    fn refactor(&mut self) -> Result<(), GpError> {
        let a: Vec<Vec<f64>> = self
            .kmat
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r = row.clone();
                r[i] += self.noise[i];
                r
            })
            .collect();
        self.chol = Cholesky::factor(&a, self.params.sigma0_sq)?;
        self.alpha = self.chol.solve(&self.y);
        Ok(())
    }

    /// Drops all but the latest `n` observations.
    pub fn keep_latest(&mut self, n: usize) -> Result<(), GpError> {
        let drop = self.len().saturating_sub(n);
        if drop == 0 {
            return Ok(());
        }
        self.feats.drain(..drop);
        self.tags.drain(..drop);
        self.y.drain(..drop);
        self.noise.drain(..drop);
        self.kmat.drain(..drop);
        for row in &mut self.kmat {
            row.drain(..drop);
        }
        self.refactor()
    }

    /// Applies a retention policy in place.
    pub fn retain(
        &mut self,
        policy: RetentionPolicy,
        limit: usize,
        current_opt: &[f64],
    ) -> Result<(), GpError> {
        if limit == 0 {
            return Err(GpError::ZeroLimit);
        }
        match policy {
            RetentionPolicy::SgdWindow => {
                let sweep: usize = self.params.multiplicities.iter().map(|v| 2 * v).sum();
                if self.len() > limit + sweep {
                    self.keep_latest(limit)?;
                }
            }
            RetentionPolicy::NftInducer => {
                if self.len() > limit - 1 + self.params.dim() {
                    let post = self.predict(&[Query::value(current_opt)])?;
                    let pseudo = Observation::value(current_opt.to_vec(), post.mean[0], post.variance(0));
                    self.keep_latest(limit - 1)?;
                    self.extend(&[pseudo])?;
                }
            }
        }
        Ok(())
    }

    fn kernel_column(&self, q: &Query) -> Vec<f64> {
        let fq = Features::new(&q.location);
        self.feats
            .iter()
            .zip(&self.tags)
            .map(|(f, &t)| kernel_features(f, t, &fq, q.tag, &self.params))
            .collect()
    }

    fn check_query(&self, q: &Query) -> Result<(), GpError> {
        self.validate(&Observation {
            location: q.location.clone(),
            tag: q.tag,
            value: 0.0,
            noise_var: 0.0,
        })
    }

    /// Joint posterior mean and covariance of the query outputs.
    pub fn predict(&self, queries: &[Query]) -> Result<GpPosterior, GpError> {
        for q in queries {
            self.check_query(q)?;
        }
        let m = queries.len();
        let cols: Vec<Vec<f64>> = queries.iter().map(|q| self.kernel_column(q)).collect();
        let mean: Vec<f64> = cols
            .iter()
            .map(|c| c.iter().zip(&self.alpha).map(|(a, b)| a * b).sum())
            .collect();
        let whitened: Vec<Vec<f64>> = cols.iter().map(|c| self.chol.solve_lower(c)).collect();
        let qfeats: Vec<Features> = queries.iter().map(|q| Features::new(&q.location)).collect();
        let mut cov = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..=i {
                let prior = kernel_features(&qfeats[i], queries[i].tag, &qfeats[j], queries[j].tag, &self.params);
                let reduce: f64 = whitened[i].iter().zip(&whitened[j]).map(|(a, b)| a * b).sum();
                let v = prior - reduce;
                cov[(i, j)] = v;
                cov[(j, i)] = v;
            }
            if cov[(i, i)] < 0.0 && cov[(i, i)] >= -NEG_DIAG_SLACK * self.params.sigma0_sq {
                cov[(i, i)] = 0.0;
            }
        }
        Ok(GpPosterior { mean, cov })
    }

    /// Per-axis derivative posterior mean and variance at `x`.
    pub fn derivative_at(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>), GpError> {
        self.check_query(&Query::value(x))?;
        let dim = self.params.dim();
        let fx = Features::new(x);
        // rows[n][e] = k(train n, d f(x) / d x_e)
        let mut rows = vec![vec![0.0; dim]; self.len()];
        for (n, row) in rows.iter_mut().enumerate() {
            match self.tags[n] {
                OutputTag::Value => value_to_all_derivs(&self.feats[n], &fx, &self.params, row),
                tag => {
                    for (e, r) in row.iter_mut().enumerate() {
                        *r = kernel_features(&self.feats[n], tag, &fx, OutputTag::Deriv(e), &self.params);
                    }
                }
            }
        }
        let mut mean = vec![0.0; dim];
        for (row, a) in rows.iter().zip(&self.alpha) {
            for (m, r) in mean.iter_mut().zip(row) {
                *m += r * a;
            }
        }
        let whitened = self.chol.solve_lower_many(rows);
        let mut reduce = vec![0.0; dim];
        for row in &whitened {
            for (acc, w) in reduce.iter_mut().zip(row) {
                *acc += w * w;
            }
        }
        let var = (0..dim)
            .map(|e| (prior_derivative_variance(e, &self.params) - reduce[e]).max(0.0))
            .collect();
        Ok((mean, var))
    }
}

/// GP posterior over `queries` given `ds`; the prior when `ds` is empty.
pub fn posterior(ds: &Dataset, queries: &[Query], p: &KernelParams) -> Result<GpPosterior, GpError> {
    GpModel::fit(ds, p)?.predict(queries)
}

/// Per-axis derivative posterior `(mean, variance)` at `x_hat`.
pub fn grad_posterior(ds: &Dataset, x_hat: &[f64], p: &KernelParams) -> Result<(Vec<f64>, Vec<f64>), GpError> {
    GpModel::fit(ds, p)?.derivative_at(x_hat)
}

/// Returns `ds` pruned according to `policy`.
pub fn retain_window(
    ds: &Dataset,
    policy: RetentionPolicy,
    limit: usize,
    current_opt: &[f64],
    p: &KernelParams,
) -> Result<Dataset, GpError> {
    if limit == 0 {
        return Err(GpError::ZeroLimit);
    }
    match policy {
        RetentionPolicy::SgdWindow => {
            let sweep: usize = p.multiplicities.iter().map(|v| 2 * v).sum();
            if ds.len() > limit + sweep {
                Ok(ds.latest(limit))
            } else {
                Ok(ds.clone())
            }
        }
        RetentionPolicy::NftInducer => {
            if ds.len() > limit - 1 + p.dim() {
                let mut model = GpModel::fit(ds, p)?;
                model.retain(policy, limit, current_opt)?;
                Ok(model.dataset())
            } else {
                Ok(ds.clone())
            }
        }
    }
}
