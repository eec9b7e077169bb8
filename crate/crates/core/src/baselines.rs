//! Median-of-means baseline made anytime-valid by a union bound over time.

use crate::stream::distance;
use crate::{Error, Result};

/// How many blocks to use at time `t` given the per-time budget `alpha_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlockRule {
    /// `k_t = ceil(mult * log(1/alpha_t))`.
    LogBudget { mult: f64 },
    Fixed(usize),
}

impl Default for BlockRule {
    fn default() -> Self {
        BlockRule::LogBudget { mult: 8.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoMConfig {
    pub alpha: f64,
    pub trace_sigma: f64,
    pub block_rule: BlockRule,
}

impl MoMConfig {
    pub fn new(alpha: f64, trace_sigma: f64) -> Result<Self> {
        let cfg = Self { alpha, trace_sigma, block_rule: BlockRule::default() };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config("alpha must lie in (0,1)".into()));
        }
        if !(self.trace_sigma > 0.0 && self.trace_sigma.is_finite()) {
            return Err(Error::Config("trace_sigma must be positive".into()));
        }
        match self.block_rule {
            BlockRule::LogBudget { mult } if !(mult > 0.0 && mult.is_finite()) => {
                Err(Error::Config("block multiplier must be positive".into()))
            }
            BlockRule::Fixed(0) => Err(Error::Config("block count must be at least 1".into())),
            _ => Ok(()),
        }
    }
}

/// Per-time budget `alpha / (t + t^2)`; these sum to exactly `alpha`.
pub fn union_budget(t: u64, alpha: f64) -> f64 {
    let t = t as f64;
    alpha / (t + t * t)
}

/// Block count at time `t`, clamped to `[1, t]`.
pub fn blocks_at(t: u64, cfg: &MoMConfig) -> usize {
    let k = match cfg.block_rule {
        BlockRule::LogBudget { mult } => (mult * (1.0 / union_budget(t, cfg.alpha)).ln()).ceil() as usize,
        BlockRule::Fixed(k) => k,
    };
    k.clamp(1, t.max(1) as usize)
}

/// Fixed-time radius at budget `alpha_t`:
/// `2 sqrt(2) sqrt(Tr(Sigma) (1 + 2 log(1/alpha_t)) / t)`.
///
/// The constant is a baseline convention of the same order as the
/// geometric median-of-means bound, not a sharp value.
pub fn mom_union_radius(t: u64, cfg: &MoMConfig) -> f64 {
    let t = t.max(1);
    let log_inv = (1.0 / union_budget(t, cfg.alpha)).ln();
    2.0 * 2f64.sqrt() * (cfg.trace_sigma * (1.0 + 2.0 * log_inv) / t as f64).sqrt()
}

/// Geometric median of the means of `k` contiguous blocks. The first
/// `n mod k` blocks hold one extra sample.
pub fn mom_estimate<S: AsRef<[f64]>>(samples: &[S], k: usize) -> Result<Vec<f64>> {
    let n = samples.len();
    if n == 0 {
        return Err(Error::InvalidInput("median of means needs at least one sample".into()));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("block count {k} must lie in [1, {n}]")));
    }
    let d = samples[0].as_ref().len();
    if let Some(bad) = samples.iter().find(|s| s.as_ref().len() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: bad.as_ref().len() });
    }
    let (base, extra) = (n / k, n % k);
    let mut means = Vec::with_capacity(k);
    let mut start = 0;
    for b in 0..k {
        let len = base + usize::from(b < extra);
        let mut m = vec![0.0; d];
        for s in &samples[start..start + len] {
            for (mi, xi) in m.iter_mut().zip(s.as_ref()) {
                *mi += xi;
            }
        }
        m.iter_mut().for_each(|v| *v /= len as f64);
        means.push(m);
        start += len;
    }
    Ok(geometric_median(&means))
}

const WEISZFELD_TOL: f64 = 1e-9;
const COLLISION_JITTER: f64 = 1e-8;
const MAX_ITER: usize = 10_000;

/// Weiszfeld iteration started from the coordinate mean. When an iterate
/// lands on a data point, that point is returned if it satisfies the
/// optimality condition, otherwise the iterate is nudged and restarted.
pub fn geometric_median(points: &[Vec<f64>]) -> Vec<f64> {
    let d = points[0].len();
    let n = points.len() as f64;
    if points.len() == 1 {
        return points[0].clone();
    }
    let mut y = vec![0.0; d];
    for p in points {
        for (yi, pi) in y.iter_mut().zip(p) {
            *yi += pi / n;
        }
    }
    let mut next = vec![0.0; d];
    for _ in 0..MAX_ITER {
        if let Some(j) = points.iter().position(|p| distance(p, &y) < 1e-12) {
            if is_median_at(points, j) {
                return points[j].clone();
            }
            y.iter_mut().for_each(|v| *v += COLLISION_JITTER);
            continue;
        }
        next.iter_mut().for_each(|v| *v = 0.0);
        let mut wsum = 0.0;
        for p in points {
            let w = 1.0 / distance(p, &y);
            wsum += w;
            for (ni, pi) in next.iter_mut().zip(p) {
                *ni += w * pi;
            }
        }
        next.iter_mut().for_each(|v| *v /= wsum);
        let step = distance(&next, &y);
        std::mem::swap(&mut y, &mut next);
        if step < WEISZFELD_TOL {
            break;
        }
        // Weiszfeld converges sublinearly towards a data point; snap once the
        // nearest point is optimal.
        if let Some((j, dist)) = nearest(points, &y) {
            if dist < 1e-6 && is_median_at(points, j) {
                return points[j].clone();
            }
        }
    }
    y
}

fn nearest(points: &[Vec<f64>], y: &[f64]) -> Option<(usize, f64)> {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| (i, distance(p, y)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

/// A data point `x_j` of multiplicity `m` minimizes the sum of distances
/// iff the unit-vector pull of the other points has norm at most `m`.
fn is_median_at(points: &[Vec<f64>], j: usize) -> bool {
    let xj = &points[j];
    let mut pull = vec![0.0; xj.len()];
    let mut mult = 0.0;
    for p in points {
        let r = distance(p, xj);
        if r < 1e-12 {
            mult += 1.0;
            continue;
        }
        for (g, (pi, xi)) in pull.iter_mut().zip(p.iter().zip(xj)) {
            *g += (pi - xi) / r;
        }
    }
    crate::stream::norm(&pull) <= mult
}
