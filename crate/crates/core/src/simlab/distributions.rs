//! Data-generating laws with closed-form means.

use nalgebra::{Cholesky, DMatrix, Dyn};
use rand::Rng;
use rand_distr::{Beta, Distribution, StandardNormal};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum DistributionSpec {
    /// Coordinates `scale * (Beta(a, b) - offset)`, independent.
    /// `offset = 0.5` recenters `[0,1]^d` to `[-1/2,1/2]^d`.
    BetaProduct { d: usize, a: f64, b: f64, offset: f64, scale: f64 },
    GaussianIso { mu: Vec<f64>, sigma: f64 },
    GaussianCov { mu: Vec<f64>, sigma: DMatrix<f64> },
    /// Uniform direction times a Pareto radius with shape `p_moment + 1/2`,
    /// scaled so that `E||X||^p_moment = v` exactly. Mean zero.
    HeavyTail { d: usize, p_moment: f64, v: f64 },
    PointMass { x: Vec<f64> },
    /// `(1 - eps) base + eps contaminant`.
    HuberMix { base: Box<DistributionSpec>, eps: f64, contaminant: Box<DistributionSpec> },
}

/// Pareto shape used for [`DistributionSpec::HeavyTail`].
pub fn heavy_tail_shape(p_moment: f64) -> f64 {
    p_moment + 0.5
}

/// Pareto scale `s` with `E R^p = s^p a / (a - p) = v`.
pub fn heavy_tail_scale(p_moment: f64, v: f64) -> f64 {
    let a = heavy_tail_shape(p_moment);
    (v * (a - p_moment) / a).powf(1.0 / p_moment)
}

impl DistributionSpec {
    pub fn beta_product(d: usize, a: f64, b: f64) -> Self {
        DistributionSpec::BetaProduct { d, a, b, offset: 0.0, scale: 1.0 }
    }

    /// Beta product recentered to `[-1/2, 1/2]^d`.
    pub fn beta_centered(d: usize, a: f64, b: f64) -> Self {
        DistributionSpec::BetaProduct { d, a, b, offset: 0.5, scale: 1.0 }
    }

    pub fn huber(base: DistributionSpec, eps: f64, contaminant: DistributionSpec) -> Self {
        DistributionSpec::HuberMix { base: Box::new(base), eps, contaminant: Box::new(contaminant) }
    }

    pub fn dim(&self) -> usize {
        match self {
            DistributionSpec::BetaProduct { d, .. } | DistributionSpec::HeavyTail { d, .. } => *d,
            DistributionSpec::GaussianIso { mu, .. }
            | DistributionSpec::GaussianCov { mu, .. }
            | DistributionSpec::PointMass { x: mu } => mu.len(),
            DistributionSpec::HuberMix { base, .. } => base.dim(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        let pos = |x: f64| x.is_finite() && x > 0.0;
        if self.dim() == 0 {
            return bad("distribution dimension must be at least 1");
        }
        match self {
            DistributionSpec::BetaProduct { a, b, offset, scale, .. } => {
                if !pos(*a) || !pos(*b) {
                    return bad("beta parameters a and b must be positive");
                }
                if !offset.is_finite() || !pos(*scale) {
                    return bad("beta offset must be finite and scale positive");
                }
            }
            DistributionSpec::GaussianIso { mu, sigma } => {
                if !(sigma.is_finite() && *sigma >= 0.0) || mu.iter().any(|v| !v.is_finite()) {
                    return bad("gaussian needs finite mu and sigma >= 0");
                }
            }
            DistributionSpec::GaussianCov { mu, sigma } => {
                if sigma.nrows() != mu.len() || sigma.ncols() != mu.len() {
                    return bad("covariance shape must match mu");
                }
                if Cholesky::new(sigma.clone()).is_none() {
                    return Err(Error::NotPositiveDefinite);
                }
            }
            DistributionSpec::HeavyTail { p_moment, v, .. } => {
                if !(p_moment.is_finite() && *p_moment >= 1.0) || !pos(*v) {
                    return bad("heavy tail needs p_moment >= 1 and v > 0");
                }
            }
            DistributionSpec::PointMass { x } => {
                if x.iter().any(|v| !v.is_finite()) {
                    return bad("point mass must be finite");
                }
            }
            DistributionSpec::HuberMix { base, eps, contaminant } => {
                if !(0.0..=1.0).contains(eps) {
                    return bad("eps must lie in [0,1]");
                }
                if base.dim() != contaminant.dim() {
                    return Err(Error::DimensionMismatch { expected: base.dim(), got: contaminant.dim() });
                }
                base.validate()?;
                contaminant.validate()?;
            }
        }
        Ok(())
    }

    /// Mean of the clean law. For a mixture this is the base mean, the
    /// target a robust estimator must cover.
    pub fn mean(&self) -> Vec<f64> {
        match self {
            DistributionSpec::BetaProduct { d, a, b, offset, scale } => vec![scale * (a / (a + b) - offset); *d],
            DistributionSpec::GaussianIso { mu, .. }
            | DistributionSpec::GaussianCov { mu, .. }
            | DistributionSpec::PointMass { x: mu } => mu.clone(),
            DistributionSpec::HeavyTail { d, .. } => vec![0.0; *d],
            DistributionSpec::HuberMix { base, .. } => base.mean(),
        }
    }

    /// Mean of the law actually sampled.
    pub fn sampled_mean(&self) -> Vec<f64> {
        match self {
            DistributionSpec::HuberMix { base, eps, contaminant } => base
                .sampled_mean()
                .iter()
                .zip(contaminant.sampled_mean())
                .map(|(p, q)| (1.0 - eps) * p + eps * q)
                .collect(),
            _ => self.mean(),
        }
    }

    /// `E||X - E X||^2` of the sampled law, if finite.
    pub fn centered_second_moment(&self) -> Option<f64> {
        match self {
            DistributionSpec::BetaProduct { d, a, b, scale, .. } => {
                let var = a * b / ((a + b).powi(2) * (a + b + 1.0));
                Some(*d as f64 * var * scale * scale)
            }
            DistributionSpec::GaussianIso { mu, sigma } => Some(mu.len() as f64 * sigma * sigma),
            DistributionSpec::GaussianCov { sigma, .. } => Some(sigma.trace()),
            DistributionSpec::HeavyTail { p_moment, v, .. } => {
                let a = heavy_tail_shape(*p_moment);
                (a > 2.0).then(|| heavy_tail_scale(*p_moment, *v).powi(2) * a / (a - 2.0))
            }
            DistributionSpec::PointMass { .. } => Some(0.0),
            DistributionSpec::HuberMix { base, eps, contaminant } => {
                let (m, mp, mq) = (self.sampled_mean(), base.sampled_mean(), contaminant.sampled_mean());
                let shift = |c: &[f64]| c.iter().zip(&m).map(|(x, y)| (x - y).powi(2)).sum::<f64>();
                Some(
                    (1.0 - eps) * (base.centered_second_moment()? + shift(&mp))
                        + eps * (contaminant.centered_second_moment()? + shift(&mq)),
                )
            }
        }
    }

    /// Almost-sure bound on `||X||`, if one exists.
    pub fn norm_bound(&self) -> Option<f64> {
        match self {
            DistributionSpec::BetaProduct { d, offset, scale, .. } => {
                let per = offset.abs().max((1.0 - offset).abs());
                Some(scale * per * (*d as f64).sqrt())
            }
            DistributionSpec::GaussianIso { sigma, mu } if *sigma == 0.0 => Some(crate::stream::norm(mu)),
            DistributionSpec::PointMass { x } => Some(crate::stream::norm(x)),
            DistributionSpec::HuberMix { base, eps, contaminant } => {
                let b = base.norm_bound()?;
                if *eps == 0.0 {
                    Some(b)
                } else {
                    Some(b.max(contaminant.norm_bound()?))
                }
            }
            _ => None,
        }
    }

    pub fn sampler(&self) -> Result<Sampler> {
        self.validate()?;
        Ok(match self {
            DistributionSpec::BetaProduct { a, b, offset, scale, .. } => Sampler::Beta {
                dist: Beta::new(*a, *b).map_err(|e| Error::Config(e.to_string()))?,
                offset: *offset,
                scale: *scale,
            },
            DistributionSpec::GaussianIso { mu, sigma } => Sampler::GaussianIso { mu: mu.clone(), sigma: *sigma },
            DistributionSpec::GaussianCov { mu, sigma } => {
                let chol = Cholesky::new(sigma.clone()).ok_or(Error::NotPositiveDefinite)?;
                Sampler::GaussianCov { mu: mu.clone(), chol, z: vec![0.0; mu.len()] }
            }
            DistributionSpec::HeavyTail { p_moment, v, .. } => Sampler::HeavyTail {
                inv_shape: 1.0 / heavy_tail_shape(*p_moment),
                scale: heavy_tail_scale(*p_moment, *v),
            },
            DistributionSpec::PointMass { x } => Sampler::PointMass(x.clone()),
            DistributionSpec::HuberMix { base, eps, contaminant } => Sampler::Mix {
                base: Box::new(base.sampler()?),
                eps: *eps,
                contaminant: Box::new(contaminant.sampler()?),
            },
        })
    }
}

/// Prepared sampler for a [`DistributionSpec`].
#[derive(Debug, Clone)]
pub enum Sampler {
    Beta { dist: Beta<f64>, offset: f64, scale: f64 },
    GaussianIso { mu: Vec<f64>, sigma: f64 },
    GaussianCov { mu: Vec<f64>, chol: Cholesky<f64, Dyn>, z: Vec<f64> },
    HeavyTail { inv_shape: f64, scale: f64 },
    PointMass(Vec<f64>),
    Mix { base: Box<Sampler>, eps: f64, contaminant: Box<Sampler> },
}

impl Sampler {
    /// Fills `out` with one draw; returns true when a mixture drew from its
    /// contaminant.
    pub fn sample_into<R: Rng + ?Sized>(&mut self, rng: &mut R, out: &mut [f64]) -> bool {
        match self {
            Sampler::Beta { dist, offset, scale } => {
                for o in out.iter_mut() {
                    *o = *scale * (dist.sample(rng) - *offset);
                }
                false
            }
            Sampler::GaussianIso { mu, sigma } => {
                for (o, m) in out.iter_mut().zip(mu.iter()) {
                    let z: f64 = rng.sample(StandardNormal);
                    *o = m + *sigma * z;
                }
                false
            }
            Sampler::GaussianCov { mu, chol, z } => {
                for zi in z.iter_mut() {
                    *zi = rng.sample(StandardNormal);
                }
                let l = chol.l_dirty();
                for i in 0..out.len() {
                    let mut acc = mu[i];
                    for j in 0..=i {
                        acc += l[(i, j)] * z[j];
                    }
                    out[i] = acc;
                }
                false
            }
            Sampler::HeavyTail { inv_shape, scale } => {
                let mut n2 = 0.0;
                while n2 == 0.0 {
                    for o in out.iter_mut() {
                        *o = rng.sample(StandardNormal);
                    }
                    n2 = out.iter().map(|v| v * v).sum();
                }
                // 1 - U lies in (0, 1], so the power is finite
                let u: f64 = 1.0 - rng.random::<f64>();
                let r = *scale * u.powf(-*inv_shape);
                let f = r / n2.sqrt();
                out.iter_mut().for_each(|v| *v *= f);
                false
            }
            Sampler::PointMass(x) => {
                out.copy_from_slice(x);
                false
            }
            Sampler::Mix { base, eps, contaminant } => {
                if rng.random::<f64>() < *eps {
                    contaminant.sample_into(rng, out);
                    true
                } else {
                    base.sample_into(rng, out);
                    false
                }
            }
        }
    }
}
