use super::kernel::OutputTag;
use crate::error::GpError;

/// One training record: an observed value or derivative at a location.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub location: Vec<f64>,
    pub tag: OutputTag,
    pub value: f64,
    pub noise_var: f64,
}

impl Observation {
    pub fn value(location: Vec<f64>, value: f64, noise_var: f64) -> Self {
        Self {
            location,
            tag: OutputTag::Value,
            value,
            noise_var,
        }
    }
}

/// Ordered training set `(X, y, sigma)`; all locations share one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    observations: Vec<Observation>,
}

impl Dataset {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            observations: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn push(&mut self, obs: Observation) -> Result<(), GpError> {
        if obs.location.len() != self.dim {
            return Err(GpError::DimensionMismatch {
                expected: self.dim,
                found: obs.location.len(),
            });
        }
        if let OutputTag::Deriv(axis) = obs.tag {
            if axis >= self.dim {
                return Err(GpError::AxisOutOfRange { axis, dim: self.dim });
            }
        }
        self.observations.push(obs);
        Ok(())
    }

    /// Copy holding only the latest `n` observations.
    pub fn latest(&self, n: usize) -> Dataset {
        let start = self.observations.len().saturating_sub(n);
        Dataset {
            dim: self.dim,
            observations: self.observations[start..].to_vec(),
        }
    }

    /// Drops all but the latest `n` observations in place.
    pub fn keep_latest(&mut self, n: usize) {
        let start = self.observations.len().saturating_sub(n);
        self.observations.drain(..start);
    }
}
