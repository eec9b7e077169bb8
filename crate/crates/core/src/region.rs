//! Confidence regions and the whitening map that turns spheres into
//! Mahalanobis ellipsoids.

use nalgebra::{DMatrix, DVector};

use crate::stream::{distance, norm};
use crate::{Error, Result};

/// `W = Sigma^{-1/2}` for a known positive definite covariance, together
/// with its inverse `Sigma^{1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Whitening {
    w: DMatrix<f64>,
    w_inv: DMatrix<f64>,
}

impl Whitening {
    /// Builds `Sigma^{-1/2}` by symmetric eigendecomposition. Fails unless
    /// `Sigma` is symmetric and Cholesky-factorizable.
    pub fn from_covariance(sigma: &DMatrix<f64>) -> Result<Self> {
        let n = sigma.nrows();
        if n == 0 || sigma.ncols() != n {
            return Err(Error::InvalidInput("covariance must be a non-empty square matrix".into()));
        }
        let asym = (sigma - sigma.transpose()).abs().max();
        if !(asym <= 1e-12 * sigma.abs().max().max(1.0)) {
            return Err(Error::NotPositiveDefinite);
        }
        if sigma.clone().cholesky().is_none() {
            return Err(Error::NotPositiveDefinite);
        }
        let eig = sigma.clone().symmetric_eigen();
        if eig.eigenvalues.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::NotPositiveDefinite);
        }
        let q = &eig.eigenvectors;
        let inv_sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| 1.0 / v.sqrt()));
        let sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
        Ok(Self {
            w: q * inv_sqrt * q.transpose(),
            w_inv: q * sqrt * q.transpose(),
        })
    }

    pub fn dim(&self) -> usize {
        self.w.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.w
    }

    /// `W x`.
    pub fn whiten(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        Ok((&self.w * DVector::from_column_slice(x)).as_slice().to_vec())
    }

    /// `W^{-1} y`, mapping whitened coordinates back.
    pub fn unwhiten(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check(y)?;
        Ok((&self.w_inv * DVector::from_column_slice(y)).as_slice().to_vec())
    }

    /// Mahalanobis norm `||W x||`.
    pub fn mahalanobis(&self, x: &[f64]) -> Result<f64> {
        Ok(norm(&self.whiten(x)?))
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Sphere,
    /// `{m : ||W (m - center)|| <= radius}`.
    Ellipsoid(Whitening),
}

/// A confidence set at time `t` and level `1 - alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceRegion {
    pub center: Vec<f64>,
    pub radius: f64,
    pub t: u64,
    pub alpha: f64,
    pub shape: Shape,
}

impl ConfidenceRegion {
    /// Distance from the center in the region's own norm.
    pub fn distance_to(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.center.len() {
            return Err(Error::DimensionMismatch {
                expected: self.center.len(),
                got: point.len(),
            });
        }
        match &self.shape {
            Shape::Sphere => Ok(distance(&self.center, point)),
            Shape::Ellipsoid(w) => {
                let diff: Vec<f64> = point.iter().zip(&self.center).map(|(p, c)| p - c).collect();
                w.mahalanobis(&diff)
            }
        }
    }

    pub fn contains(&self, point: &[f64]) -> Result<bool> {
        Ok(self.distance_to(point)? <= self.radius)
    }
}
