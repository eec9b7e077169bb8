//! Predictable weight sequences `(lambda_t)`.
//!
//! Every variant computes `lambda_t` from the stream state *before* the
//! `t`-th observation is consumed, so the weights are predictable.

use crate::stream::StreamState;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaSchedule {
    Constant { lambda: f64 },
    /// `min(cap, sqrt(c log(1/alpha) / (sigma_hat_{t-1}^2 n)))`, `sigma_hat_0^2 = 1`.
    FixedTimeEb { n: u64, alpha: f64, c: f64, cap: f64 },
    /// `min(cap, sqrt(log(1/alpha) / (sigma_hat_{t-1}^2 t log(t+1))))`.
    AnytimeEb { alpha: f64, cap: f64 },
    /// `sqrt(log(1/alpha) / (v^{2/p} t log(t+1)))`.
    AnytimeCg { alpha: f64, v: f64, p: f64 },
    /// `sqrt(log(1/alpha) / (v^{2/p} n))`.
    FixedTimeCg { n: u64, alpha: f64, v: f64, p: f64 },
    /// `min(cap, 1 / (b sigma_hat_{t-1}))`.
    RobustVar { b: f64, cap: f64 },
    /// `min(cap, (B / sigma_hat_{t-1}) sqrt(log(1/alpha)/n + eps))`.
    RobustFixedTime { n: u64, alpha: f64, eps: f64, bound: f64, cap: f64 },
}

/// Cap used by [`LambdaSchedule::RobustVar`] by default: below it
/// `psi_E(l) <= l^2`.
pub const ROBUST_VAR_CAP: f64 = 0.68;

/// `c* = 2 + 8 / (3 log(1/alpha))`, the constant minimising the asymptotic
/// fixed-time empirical-Bernstein width bound.
pub fn optimal_fixed_time_c(alpha: f64) -> f64 {
    2.0 + 8.0 / (3.0 * (1.0 / alpha).ln())
}

/// `zeta_alpha = sqrt(9/2 + 6 / log(1/alpha))`, the width multiplier at `c*`.
pub fn fixed_time_width_multiplier(alpha: f64) -> f64 {
    (4.5 + 6.0 / (1.0 / alpha).ln()).sqrt()
}

impl LambdaSchedule {
    pub fn robust_var(b: f64) -> Self {
        LambdaSchedule::RobustVar { b, cap: ROBUST_VAR_CAP }
    }

    /// Weight for the next observation given everything seen so far.
    pub fn next(&self, state: &StreamState) -> f64 {
        let t = (state.t() + 1) as f64;
        let var_prev = state.sigma_hat_sq();
        match *self {
            LambdaSchedule::Constant { lambda } => lambda,
            LambdaSchedule::FixedTimeEb { n, alpha, c, cap } => {
                cap_at(cap, (c * log_inv(alpha) / (var_prev * n as f64)).sqrt())
            }
            LambdaSchedule::AnytimeEb { alpha, cap } => {
                cap_at(cap, (log_inv(alpha) / (var_prev * t * (t + 1.0).ln())).sqrt())
            }
            LambdaSchedule::AnytimeCg { alpha, v, p } => {
                (log_inv(alpha) / (v.powf(2.0 / p) * t * (t + 1.0).ln())).sqrt()
            }
            LambdaSchedule::FixedTimeCg { n, alpha, v, p } => {
                (log_inv(alpha) / (v.powf(2.0 / p) * n as f64)).sqrt()
            }
            LambdaSchedule::RobustVar { b, cap } => cap_at(cap, 1.0 / (b * var_prev.sqrt())),
            LambdaSchedule::RobustFixedTime { n, alpha, eps, bound, cap } => cap_at(
                cap,
                bound / var_prev.sqrt() * (log_inv(alpha) / n as f64 + eps).sqrt(),
            ),
        }
    }

    /// True when `lambda_t` does not depend on the data.
    pub fn is_deterministic(&self) -> bool {
        matches!(
            self,
            LambdaSchedule::Constant { .. }
                | LambdaSchedule::AnytimeCg { .. }
                | LambdaSchedule::FixedTimeCg { .. }
        )
    }

    /// Largest value the schedule can ever emit.
    pub fn max_lambda(&self) -> f64 {
        match *self {
            LambdaSchedule::Constant { lambda } => lambda,
            LambdaSchedule::FixedTimeEb { cap, .. }
            | LambdaSchedule::AnytimeEb { cap, .. }
            | LambdaSchedule::RobustVar { cap, .. }
            | LambdaSchedule::RobustFixedTime { cap, .. } => cap,
            LambdaSchedule::AnytimeCg { alpha, v, p } => {
                (log_inv(alpha) / (v.powf(2.0 / p) * 2f64.ln())).sqrt()
            }
            LambdaSchedule::FixedTimeCg { n, alpha, v, p } => {
                (log_inv(alpha) / (v.powf(2.0 / p) * n as f64)).sqrt()
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(format!("schedule {self:?}: {what}")));
        let alpha_ok = |a: f64| a > 0.0 && a < 1.0;
        let pos = |x: f64| x.is_finite() && x > 0.0;
        match *self {
            LambdaSchedule::Constant { lambda } if !pos(lambda) => bad("lambda must be positive"),
            LambdaSchedule::FixedTimeEb { n, alpha, c, cap } => {
                if n == 0 || !alpha_ok(alpha) || !pos(c) || !pos(cap) {
                    bad("need n >= 1, alpha in (0,1), c > 0, cap > 0")
                } else {
                    Ok(())
                }
            }
            LambdaSchedule::AnytimeEb { alpha, cap } if !alpha_ok(alpha) || !pos(cap) => {
                bad("need alpha in (0,1), cap > 0")
            }
            LambdaSchedule::AnytimeCg { alpha, v, p } if !alpha_ok(alpha) || !pos(v) || !pos(p) => {
                bad("need alpha in (0,1), v > 0, p > 0")
            }
            LambdaSchedule::FixedTimeCg { n, alpha, v, p } if n == 0 || !alpha_ok(alpha) || !pos(v) || !pos(p) => {
                bad("need n >= 1, alpha in (0,1), v > 0, p > 0")
            }
            LambdaSchedule::RobustVar { b, cap } if !pos(b) || !pos(cap) => bad("need b > 0, cap > 0"),
            LambdaSchedule::RobustFixedTime { n, alpha, eps, bound, cap } => {
                if n == 0 || !alpha_ok(alpha) || !(eps >= 0.0) || !pos(bound) || !pos(cap) {
                    bad("need n >= 1, alpha in (0,1), eps >= 0, B > 0, cap > 0")
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

#[inline]
fn log_inv(alpha: f64) -> f64 {
    (1.0 / alpha).ln()
}

#[inline]
fn cap_at(cap: f64, value: f64) -> f64 {
    // NaN (0/0) and +inf both mean "no information yet": use the cap
    if value.is_nan() {
        cap
    } else {
        value.min(cap)
    }
}
