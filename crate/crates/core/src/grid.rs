//! Uniform 1D spatial grid over the sample.

use crate::error::{Error, Result};

/// Uniform grid on `[0, L)` with `n` points at `z_j = j * dz`, `n * dz = L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    n: usize,
    dz: f64,
}

impl Grid1D {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 2 || !length.is_finite() || length <= 0.0 {
            return Err(Error::Validation(format!(
                "grid needs n >= 2 and length > 0 (got n = {n}, length = {length})"
            )));
        }
        Ok(Self { n, dz: length / n as f64 })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dz(&self) -> f64 {
        self.dz
    }

    /// Total sample length `n * dz`.
    #[inline]
    pub fn length(&self) -> f64 {
        self.n as f64 * self.dz
    }

    #[inline]
    pub fn z(&self, j: usize) -> f64 {
        j as f64 * self.dz
    }

    pub fn coords(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|j| self.z(j))
    }

    pub fn check_same(&self, other: &Grid1D) -> Result<()> {
        if self.n != other.n || (self.dz - other.dz).abs() > 1e-12 * self.dz.max(other.dz) {
            return Err(Error::GridMismatch(self.n, self.dz, other.n, other.dz));
        }
        Ok(())
    }
}
