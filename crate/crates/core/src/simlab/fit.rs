//! Least-squares rate fits on radius trajectories.

use super::WidthRecord;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateModel {
    /// Predictor `sqrt(log t / t)`.
    SqrtLogTOverT,
    /// Predictor `sqrt(log log t / t)`.
    Lil,
}

impl RateModel {
    pub fn predictor(&self, t: f64) -> f64 {
        match self {
            RateModel::SqrtLogTOverT => (t.ln() / t).sqrt(),
            RateModel::Lil => (t.ln().ln() / t).sqrt(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RateModel::SqrtLogTOverT => "sqrt_log_t_over_t",
            RateModel::Lil => "lil",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

/// Extracts `(t, mean_radius)` for one method.
pub fn trajectory(records: &[WidthRecord], method: &str) -> Vec<(u64, f64)> {
    records.iter().filter(|r| r.method == method).map(|r| (r.t, r.mean_radius)).collect()
}

/// Regresses `log r` on `log predictor(t)`. Needs at least 20 finite points
/// spanning three decades.
pub fn fit_rate(traj: &[(u64, f64)], model: RateModel) -> Result<RateFit> {
    let pts: Vec<(f64, f64)> = traj
        .iter()
        .filter(|(_, r)| r.is_finite() && *r > 0.0)
        .map(|&(t, r)| (t as f64, r))
        .collect();
    if pts.len() < 20 {
        return Err(Error::InvalidInput(format!("rate fit needs 20 finite points, got {}", pts.len())));
    }
    let (lo, hi) = pts.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), p| (lo.min(p.0), hi.max(p.0)));
    if hi / lo < 1e3 {
        return Err(Error::InvalidInput("rate fit needs a span of at least three decades".into()));
    }
    let xy = pts
        .iter()
        .map(|&(t, r)| {
            let p = model.predictor(t);
            if p > 0.0 && p.is_finite() {
                Ok((p.ln(), r.ln()))
            } else {
                Err(Error::InvalidInput(format!("predictor undefined at t = {t}")))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    Ok(RateFit { slope, intercept: my - slope * mx, points: xy.len() })
}

/// `max / min` of `r(t) / predictor(t)` over checkpoints in `[t_min, t_max]`.
pub fn normalized_spread(traj: &[(u64, f64)], model: RateModel, t_min: u64, t_max: u64) -> Result<f64> {
    let vals: Vec<f64> = traj
        .iter()
        .filter(|(t, _)| (t_min..=t_max).contains(t))
        .map(|&(t, r)| r / model.predictor(t as f64))
        .collect();
    if vals.len() < 2 || vals.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return Err(Error::InvalidInput("spread needs finite positive radii in range".into()));
    }
    let max = vals.iter().cloned().fold(f64::MIN, f64::max);
    let min = vals.iter().cloned().fold(f64::MAX, f64::min);
    Ok(max / min)
}
