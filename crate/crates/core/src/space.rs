//! Bounded box-shaped search domain shared by all optimizers.

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SpaceError {
    #[error("search space needs at least one dimension")]
    ZeroDimensions,
    #[error("lower bound {lower} must be strictly below upper bound {upper}")]
    EmptyInterval { lower: f64, upper: f64 },
}

/// A box domain: the same `[lower, upper]` interval applies to every dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchSpace {
    dimensions: usize,
    lower: f64,
    upper: f64,
}

impl SearchSpace {
    pub fn new(dimensions: usize, lower: f64, upper: f64) -> Result<Self, SpaceError> {
        if dimensions == 0 {
            return Err(SpaceError::ZeroDimensions);
        }
        if !lower.is_finite() || !upper.is_finite() || lower >= upper {
            return Err(SpaceError::EmptyInterval { lower, upper });
        }
        Ok(Self {
            dimensions,
            lower,
            upper,
        })
    }

    pub fn dimensions(&self) -> usize {
        self.dimensions
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// Same bounds, different dimensionality.
    pub fn with_dimensions(&self, dimensions: usize) -> Result<Self, SpaceError> {
        Self::new(dimensions, self.lower, self.upper)
    }

    /// Hard-clamps every component into the box.
    pub fn clamp(&self, position: &mut [f64]) {
        for x in position {
            *x = x.clamp(self.lower, self.upper);
        }
    }

    pub fn contains(&self, position: &[f64]) -> bool {
        position.len() == self.dimensions
            && position.iter().all(|&x| self.lower <= x && x <= self.upper)
    }

    /// Uniform random point inside the box, one draw per dimension.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        (0..self.dimensions)
            .map(|_| rng.random_range(self.lower..=self.upper))
            .collect()
    }
}
