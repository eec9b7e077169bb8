//! Monte Carlo engines. Replications run in parallel, each with its own
//! estimator state and ChaCha substream; results are reduced in
//! replication order, so reports do not depend on the thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::DistributionSpec;
use crate::baselines::{mom_union_radius, MoMConfig};
use crate::estimators::{Estimator, EstimatorConfig};
use crate::stream::distance;
use crate::{Error, Result};

pub const DEFAULT_PER_DECADE: usize = 10;
pub const MAX_PER_DECADE: usize = 50;

/// RNG for replication `rep` under root seed `seed`.
pub fn replication_rng(seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    rng
}

/// `n` iid draws from `spec`, reproducible from `seed`.
pub fn generate(spec: &DistributionSpec, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let mut sampler = spec.sampler()?;
    let mut rng = replication_rng(seed, 0);
    let d = spec.dim();
    Ok((0..n)
        .map(|_| {
            let mut x = vec![0.0; d];
            sampler.sample_into(&mut rng, &mut x);
            x
        })
        .collect())
}

/// Log-spaced times in `[1, horizon]`, at most `per_decade` per decade
/// (capped at 50), always ending at `horizon`.
pub fn checkpoints(horizon: u64, per_decade: usize) -> Vec<u64> {
    let pd = per_decade.clamp(1, MAX_PER_DECADE) as f64;
    let mut out: Vec<u64> = Vec::new();
    for k in 0.. {
        let t = 10f64.powf(k as f64 / pd).round() as u64;
        if t > horizon {
            break;
        }
        if out.last() != Some(&t) {
            out.push(t);
        }
    }
    if horizon >= 1 && out.last() != Some(&horizon) {
        out.push(horizon);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub replications: u64,
    /// Replications where some `t <= horizon` had the target outside the region.
    pub miscovered: u64,
    pub coverage_hat: f64,
    pub binomial_se: f64,
    pub horizon: u64,
    pub seed: u64,
    /// First miscovering time per replication, in replication order.
    pub first_miscoverage: Vec<Option<u64>>,
}

impl CoverageReport {
    fn from_events(first_miscoverage: Vec<Option<u64>>, horizon: u64, seed: u64) -> Self {
        let replications = first_miscoverage.len() as u64;
        let miscovered = first_miscoverage.iter().filter(|e| e.is_some()).count() as u64;
        let coverage_hat = 1.0 - miscovered as f64 / replications as f64;
        let binomial_se = (coverage_hat * (1.0 - coverage_hat) / replications as f64).sqrt();
        Self { replications, miscovered, coverage_hat, binomial_se, horizon, seed, first_miscoverage }
    }

    /// `coverage_hat >= level - 2 se`.
    pub fn meets(&self, level: f64) -> bool {
        self.coverage_hat >= level - 2.0 * self.binomial_se
    }
}

fn check_compatible(cfg: &EstimatorConfig, spec: &DistributionSpec) -> Result<()> {
    spec.validate()?;
    if cfg.dim() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: cfg.dim(), got: spec.dim() });
    }
    if let Some(bound) = cfg.method().norm_bound() {
        match spec.norm_bound() {
            Some(nb) if nb <= bound * (1.0 + 1e-12) => {}
            Some(nb) => {
                return Err(Error::Config(format!(
                    "{} needs ||X|| <= {bound} but the distribution reaches {nb}",
                    cfg.method().name()
                )))
            }
            None => {
                return Err(Error::Config(format!(
                    "{} needs bounded observations but the distribution is unbounded",
                    cfg.method().name()
                )))
            }
        }
    }
    Ok(())
}

/// Streams `horizon` draws per replication through a fresh estimator and
/// records the first time (if any) the region excludes the target mean.
/// Coverage is checked after every observation.
pub fn run_coverage(
    cfg: &EstimatorConfig,
    spec: &DistributionSpec,
    horizon: u64,
    replications: u64,
    seed: u64,
) -> Result<CoverageReport> {
    check_compatible(cfg, spec)?;
    if horizon == 0 || replications == 0 {
        return Err(Error::InvalidInput("horizon and replications must be positive".into()));
    }
    let sampler = spec.sampler()?;
    let target = spec.mean();
    let d = spec.dim();
    let events = (0..replications)
        .into_par_iter()
        .map(|rep| -> Result<Option<u64>> {
            let mut rng = replication_rng(seed, rep);
            let mut sampler = sampler.clone();
            let mut est = Estimator::new(cfg.clone())?;
            let mut x = vec![0.0; d];
            let mut center = vec![0.0; d];
            for t in 1..=horizon {
                sampler.sample_into(&mut rng, &mut x);
                est.observe(&x)?;
                let r = est.radius()?;
                if r.is_finite() {
                    est.center_into(&mut center)?;
                    if distance(&center, &target) > r {
                        return Ok(Some(t));
                    }
                }
            }
            Ok(None)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoverageReport::from_events(events, horizon, seed))
}

/// One curve in a width study.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveSource {
    Estimator { label: String, cfg: EstimatorConfig },
    /// Union-bound median-of-means radius; data-independent.
    MomUnion { label: String, cfg: MoMConfig },
}

impl CurveSource {
    pub fn estimator(cfg: EstimatorConfig) -> Self {
        CurveSource::Estimator { label: cfg.method().name().to_string(), cfg }
    }

    pub fn label(&self) -> &str {
        match self {
            CurveSource::Estimator { label, .. } | CurveSource::MomUnion { label, .. } => label,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WidthRecord {
    pub t: u64,
    pub method: String,
    pub mean_radius: f64,
    pub radius_se: f64,
}

/// Mean radius across replications at log-spaced checkpoints, rows ordered
/// by checkpoint and then by source order. All estimators in a replication
/// see the same stream.
pub fn run_width_curve(
    sources: &[CurveSource],
    spec: &DistributionSpec,
    horizon: u64,
    replications: u64,
    seed: u64,
    per_decade: usize,
) -> Result<Vec<WidthRecord>> {
    if sources.is_empty() {
        return Err(Error::InvalidInput("width run needs at least one curve".into()));
    }
    if horizon == 0 || replications == 0 {
        return Err(Error::InvalidInput("horizon and replications must be positive".into()));
    }
    spec.validate()?;
    for s in sources {
        match s {
            CurveSource::Estimator { cfg, .. } => check_compatible(cfg, spec)?,
            CurveSource::MomUnion { cfg, .. } => cfg.validate()?,
        }
    }
    let cps = checkpoints(horizon, per_decade);
    let sampler = spec.sampler()?;
    let d = spec.dim();
    let needs_data = sources.iter().any(|s| matches!(s, CurveSource::Estimator { .. }));

    // radii[rep][checkpoint * n_sources + source]
    let radii = (0..replications)
        .into_par_iter()
        .map(|rep| -> Result<Vec<f64>> {
            let mut rng = replication_rng(seed, rep);
            let mut sampler = sampler.clone();
            let mut ests = sources
                .iter()
                .map(|s| match s {
                    CurveSource::Estimator { cfg, .. } => Estimator::new(cfg.clone()).map(Some),
                    CurveSource::MomUnion { .. } => Ok(None),
                })
                .collect::<Result<Vec<_>>>()?;
            let mut x = vec![0.0; d];
            let mut out = Vec::with_capacity(cps.len() * sources.len());
            let mut t = 0u64;
            for &cp in &cps {
                while needs_data && t < cp {
                    sampler.sample_into(&mut rng, &mut x);
                    for e in ests.iter_mut().flatten() {
                        e.observe(&x)?;
                    }
                    t += 1;
                }
                for (s, e) in sources.iter().zip(&ests) {
                    out.push(match (s, e) {
                        (CurveSource::MomUnion { cfg, .. }, _) => mom_union_radius(cp, cfg),
                        (_, Some(e)) => e.radius()?,
                        _ => unreachable!(),
                    });
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;

    let n = replications as f64;
    let mut records = Vec::with_capacity(cps.len() * sources.len());
    for (ci, &t) in cps.iter().enumerate() {
        for (si, s) in sources.iter().enumerate() {
            let idx = ci * sources.len() + si;
            let vals: Vec<f64> = radii.iter().map(|r| r[idx]).collect();
            let mean = vals.iter().sum::<f64>() / n;
            let se = if !mean.is_finite() {
                f64::INFINITY
            } else if replications < 2 || vals.iter().all(|v| *v == vals[0]) {
                0.0
            } else {
                let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
                (var / n).sqrt()
            };
            records.push(WidthRecord { t, method: s.label().to_string(), mean_radius: mean, radius_se: se });
        }
    }
    Ok(records)
}
