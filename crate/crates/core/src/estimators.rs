//! Confidence sphere sequences as online estimators.
//!
//! Each method pairs an accumulator mode with a closed-form radius. The
//! radius functions are pure in the stream state, so a cloned
//! [`StreamState`] snapshot can be queried from any thread.

use std::f64::consts::PI;

use crate::region::{ConfidenceRegion, Shape, Whitening};
use crate::schedule::LambdaSchedule;
use crate::special::{bessel_ratio, psi_eval, psi_gamma_inverse, PsiKind};
use crate::stream::{norm, threshold_factor, AccumulatorMode, StreamState};
use crate::{Error, Result};

/// `zeta(2) = pi^2 / 6`.
pub const ZETA_2: f64 = PI * PI / 6.0;

/// Largest epoch weight for which the stitched empirical-Bernstein bound is
/// evaluated (`psi_E(l) <= l^2` holds below it).
pub const STITCHED_EB_MAX_LAMBDA: f64 = 0.68;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Bounded observations `||X|| <= bound`. `kappa` defaults to `sqrt(d)`;
    /// `conservative` replaces `A_d(sqrt d)` by its lower bound `2/(3 sqrt d)`.
    EmpiricalBernstein { bound: f64, kappa: Option<f64>, conservative: bool },
    /// Sub-psi observations; requires a deterministic schedule.
    SubPsi { psi: PsiKind },
    /// Thresholded weighted mean under `E||X||^p <= v`.
    CatoniGiulini { v: f64, p: f64, beta: f64 },
    /// Bounded base law observed through an `eps` total-variation contamination.
    RobustEb { bound: f64, eps: f64 },
    /// Heavy tails with known `Tr(Sigma)`.
    SemiEmpirical { v: f64, p: f64, trace_sigma: f64 },
    /// Empirical Bernstein stitched over epochs `[2^m, 2^{m+1})`.
    StitchedEb { bound: f64 },
    /// Sub-Gamma bound stitched over epochs; `psi` must be `Gamma`.
    StitchedSubGamma { psi: PsiKind },
}

impl Method {
    pub fn empirical_bernstein(bound: f64) -> Self {
        Method::EmpiricalBernstein { bound, kappa: None, conservative: false }
    }

    pub fn catoni_giulini(v: f64, p: f64) -> Self {
        Method::CatoniGiulini { v, p, beta: 1.0 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::EmpiricalBernstein { .. } => "eb",
            Method::SubPsi { .. } => "subpsi",
            Method::CatoniGiulini { .. } => "cg",
            Method::RobustEb { .. } => "robust_eb",
            Method::SemiEmpirical { .. } => "semi_empirical",
            Method::StitchedEb { .. } => "stitched_eb",
            Method::StitchedSubGamma { .. } => "stitched_subgamma",
        }
    }

    /// Bound on `||X||` the method needs, if any.
    pub fn norm_bound(&self) -> Option<f64> {
        match *self {
            Method::EmpiricalBernstein { bound, .. }
            | Method::RobustEb { bound, .. }
            | Method::StitchedEb { bound } => Some(bound),
            _ => None,
        }
    }

    fn needs_vmf(&self) -> bool {
        !matches!(self, Method::CatoniGiulini { .. } | Method::SemiEmpirical { .. })
    }

    fn is_stitched(&self) -> bool {
        matches!(self, Method::StitchedEb { .. } | Method::StitchedSubGamma { .. })
    }

    fn accumulator(&self) -> AccumulatorMode {
        match *self {
            Method::EmpiricalBernstein { .. } => AccumulatorMode::Bernstein,
            Method::RobustEb { .. } => AccumulatorMode::RobustBernstein,
            Method::SubPsi { psi } => AccumulatorMode::SubPsi(psi),
            Method::CatoniGiulini { .. } => AccumulatorMode::Threshold,
            Method::SemiEmpirical { v, p, .. } => AccumulatorMode::SemiEmpirical { v_pow: v.powf(2.0 / p) },
            Method::StitchedEb { .. } | Method::StitchedSubGamma { .. } => AccumulatorMode::Plain,
        }
    }
}

/// A validated method + dimension + level + weight schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorConfig {
    method: Method,
    dim: usize,
    alpha: f64,
    schedule: LambdaSchedule,
}

impl EstimatorConfig {
    pub fn new(method: Method, dim: usize, alpha: f64, schedule: LambdaSchedule) -> Result<Self> {
        let cfg = Self { method, dim, alpha, schedule };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Stitched methods choose their own per-epoch weights.
    pub fn stitched(method: Method, dim: usize, alpha: f64) -> Result<Self> {
        if !method.is_stitched() {
            return Err(Error::Config(format!("{} is not a stitched method", method.name())));
        }
        Self::new(method, dim, alpha, LambdaSchedule::Constant { lambda: 1.0 })
    }

    pub fn method(&self) -> &Method {
        &self.method
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn schedule(&self) -> &LambdaSchedule {
        &self.schedule
    }

    fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return fail("alpha must lie in (0,1)".into());
        }
        if self.dim == 0 {
            return fail("d must be at least 1".into());
        }
        if self.method.needs_vmf() && self.dim < 2 {
            return fail(format!("{} requires d >= 2", self.method.name()));
        }
        if !self.method.is_stitched() {
            self.schedule.validate()?;
        }
        let pos = |x: f64| x.is_finite() && x > 0.0;
        let max_l = self.schedule.max_lambda();
        match self.method {
            Method::EmpiricalBernstein { bound, kappa, .. } => {
                if !pos(bound) {
                    return fail("B must be positive".into());
                }
                if let Some(k) = kappa {
                    if !(k >= 0.0 && k.is_finite()) {
                        return fail("kappa must be non-negative".into());
                    }
                }
                if !(max_l < 1.0) {
                    return fail(format!("empirical Bernstein needs lambda < 1, schedule reaches {max_l}"));
                }
            }
            Method::RobustEb { bound, eps } => {
                if !pos(bound) {
                    return fail("B must be positive".into());
                }
                if !(eps >= 0.0 && eps.is_finite()) {
                    return fail("eps must be non-negative".into());
                }
                if !(max_l <= 0.8) {
                    return fail(format!("robust empirical Bernstein needs lambda <= 0.8, schedule reaches {max_l}"));
                }
            }
            Method::SubPsi { psi } => {
                psi.validate()?;
                if !self.schedule.is_deterministic() {
                    return fail("sub-psi bound requires a deterministic schedule".into());
                }
                if !(max_l < psi.lambda_max()) {
                    return fail(format!("schedule reaches {max_l}, psi domain ends at {}", psi.lambda_max()));
                }
            }
            Method::CatoniGiulini { v, p, beta } => {
                if !pos(v) || !(p >= 2.0 && p.is_finite()) || !pos(beta) {
                    return fail("Catoni-Giulini needs v > 0, p >= 2, beta > 0".into());
                }
            }
            Method::SemiEmpirical { v, p, trace_sigma } => {
                if !pos(v) || !(p >= 2.0 && p.is_finite()) {
                    return fail("semi-empirical bound needs v > 0, p >= 2".into());
                }
                if !(trace_sigma >= 0.0 && trace_sigma.is_finite()) {
                    return fail("trace_sigma must be non-negative".into());
                }
            }
            Method::StitchedEb { bound } => {
                if !pos(bound) {
                    return fail("B must be positive".into());
                }
            }
            Method::StitchedSubGamma { psi } => match psi {
                PsiKind::Gamma { .. } => psi.validate()?,
                _ => return fail("stitched sub-Gamma bound requires a Gamma psi".into()),
            },
        }
        Ok(())
    }
}

/// Per-configuration constants, computed once.
#[derive(Debug, Clone, Copy)]
struct Constants {
    sqrt_d: f64,
    kappa: f64,
    a_d: f64,
    log_inv_alpha: f64,
}

impl Constants {
    fn new(cfg: &EstimatorConfig) -> Result<Self> {
        let sqrt_d = (cfg.dim as f64).sqrt();
        let kappa = match cfg.method {
            Method::EmpiricalBernstein { kappa: Some(k), .. } => k,
            _ => sqrt_d,
        };
        let a_d = if cfg.method.needs_vmf() { bessel_ratio(cfg.dim, kappa)? } else { f64::NAN };
        Ok(Self {
            sqrt_d,
            kappa,
            a_d,
            log_inv_alpha: (1.0 / cfg.alpha).ln(),
        })
    }
}

fn require_data(state: &StreamState) -> Result<()> {
    if state.t() == 0 {
        Err(Error::NoEstimate)
    } else {
        Ok(())
    }
}

fn eb_radius_with(state: &StreamState, cfg: &EstimatorConfig, k: &Constants) -> Result<f64> {
    let Method::EmpiricalBernstein { bound, conservative, .. } = cfg.method else {
        return Err(Error::Config("eb_radius needs the empirical Bernstein method".into()));
    };
    require_data(state)?;
    let q = state.quad_sum();
    let sl = state.sum_lambda();
    let l = k.log_inv_alpha;
    if conservative {
        let s = k.sqrt_d;
        Ok((s / (2.0 * bound) * q + 4.0 * bound * s + 2.0 * bound * s * l) / (2.0 / 3.0 * sl))
    } else {
        let a = k.a_d;
        if a == 0.0 {
            return Ok(f64::INFINITY);
        }
        Ok((q / (2.0 * bound) + 4.0 * bound * k.kappa * a + 2.0 * bound * l) / (a * sl))
    }
}

/// Empirical-Bernstein radius:
/// `[(1/2B) sum psi_E(l_i) Z_i^2 + 4 B kappa A_d(kappa) + 2 B log(1/alpha)] / (A_d(kappa) sum l_i)`.
pub fn eb_radius(state: &StreamState, cfg: &EstimatorConfig) -> Result<f64> {
    eb_radius_with(state, cfg, &Constants::new(cfg)?)
}

fn subpsi_radius_with(state: &StreamState, cfg: &EstimatorConfig, k: &Constants) -> Result<f64> {
    if !matches!(cfg.method, Method::SubPsi { .. }) {
        return Err(Error::Config("subpsi_radius needs the sub-psi method".into()));
    }
    require_data(state)?;
    let s = k.sqrt_d;
    Ok((s * state.quad_sum() + 2.0 * s + s * k.log_inv_alpha) / (2.0 / 3.0 * state.sum_lambda()))
}

/// Sub-psi radius `[sqrt(d) sum psi(l_i) + 2 sqrt(d) + sqrt(d) log(1/alpha)] / ((2/3) sum l_i)`.
pub fn subpsi_radius(state: &StreamState, cfg: &EstimatorConfig) -> Result<f64> {
    subpsi_radius_with(state, cfg, &Constants::new(cfg)?)
}

/// `th(x) = ((l ||x||) ^ 1) / (l ||x||) x`, with `th(0) = 0`.
pub fn cg_threshold(x: &[f64], lambda: f64) -> Vec<f64> {
    let f = threshold_factor(norm(x), lambda);
    x.iter().map(|v| v * f).collect()
}

fn cg_radius_with(state: &StreamState, cfg: &EstimatorConfig, k: &Constants) -> Result<f64> {
    let Method::CatoniGiulini { v, p, beta } = cfg.method else {
        return Err(Error::Config("cg_radius needs the Catoni-Giulini method".into()));
    };
    require_data(state)?;
    let mult = v.powf(2.0 / p) * (2.0 * (2.0 / beta + 2.0).exp() + 1.0);
    Ok((mult * state.sum_lambda_sq() + beta / 2.0 + k.log_inv_alpha) / state.sum_lambda())
}

/// Catoni-Giulini radius
/// `[v^{2/p} (2 e^{2/beta + 2} + 1) sum l_i^2 + beta/2 + log(1/alpha)] / sum l_i`.
pub fn cg_radius(state: &StreamState, cfg: &EstimatorConfig) -> Result<f64> {
    cg_radius_with(state, cfg, &Constants::new(cfg)?)
}

fn robust_eb_radius_with(state: &StreamState, cfg: &EstimatorConfig, k: &Constants) -> Result<f64> {
    let Method::RobustEb { bound, eps } = cfg.method else {
        return Err(Error::Config("robust_eb_radius needs the robust method".into()));
    };
    require_data(state)?;
    let s = k.sqrt_d;
    let t = state.t() as f64;
    let num = s / (2.0 * bound) * state.quad_sum()
        + 6.0 * bound * s * k.log_inv_alpha
        + 2.0 * bound * s * t * (std::f64::consts::E.powi(2) * eps).ln_1p();
    Ok(num / (2.0 / 3.0 * state.sum_lambda()))
}

/// Contamination-robust empirical-Bernstein radius. With `eps > 0` the
/// `t log(1 + e^2 eps)` term keeps the radius bounded away from zero.
pub fn robust_eb_radius(state: &StreamState, cfg: &EstimatorConfig) -> Result<f64> {
    robust_eb_radius_with(state, cfg, &Constants::new(cfg)?)
}

fn semi_empirical_radius_with(state: &StreamState, cfg: &EstimatorConfig, k: &Constants) -> Result<f64> {
    let Method::SemiEmpirical { trace_sigma, .. } = cfg.method else {
        return Err(Error::Config("semi_empirical_radius needs the semi-empirical method".into()));
    };
    require_data(state)?;
    let sl = state.sum_lambda();
    Ok(state.quad_sum() / (6.0 * sl)
        + trace_sigma * state.sum_lambda_sq() / (3.0 * sl)
        + (k.sqrt_d / 2.0 + k.log_inv_alpha) / sl)
}

/// Semi-empirical heavy-tailed radius
/// `sum l_i^2 (||X_i||^2 + v^{2/p}) / (6 sum l_i) + Tr(Sigma) sum l_i^2 / (3 sum l_i) + (sqrt(d)/2 + log(1/alpha)) / sum l_i`.
pub fn semi_empirical_radius(state: &StreamState, cfg: &EstimatorConfig) -> Result<f64> {
    semi_empirical_radius_with(state, cfg, &Constants::new(cfg)?)
}

/// Stitching weight `l(m) = (m + 1)^2 zeta(2)`; `sum_m 1/l(m) = 1`.
pub fn stitching_weight(m: u32) -> f64 {
    let k = m as f64 + 1.0;
    k * k * ZETA_2
}

/// Epoch index `floor(log2 t)` for `t >= 1`.
pub fn epoch(t: u64) -> u32 {
    63 - t.leading_zeros()
}

/// `r_m = log(l(m) / alpha)`.
pub fn epoch_log_budget(m: u32, alpha: f64) -> f64 {
    (stitching_weight(m) / alpha).ln()
}

/// Epoch weight `sqrt(r_m / 2^m)` for the stitched empirical-Bernstein bound.
pub fn stitched_eb_lambda(m: u32, alpha: f64) -> f64 {
    (epoch_log_budget(m, alpha) / 2f64.powi(m as i32)).sqrt()
}

fn stitched_eb_radius_with(t: u64, v_t: f64, cfg: &EstimatorConfig, k: &Constants) -> Result<f64> {
    let Method::StitchedEb { bound } = cfg.method else {
        return Err(Error::Config("stitched_eb_radius needs the stitched EB method".into()));
    };
    if t == 0 {
        return Err(Error::NoEstimate);
    }
    let m = epoch(t);
    let r = epoch_log_budget(m, cfg.alpha);
    let lambda = (r / 2f64.powi(m as i32)).sqrt();
    if lambda > STITCHED_EB_MAX_LAMBDA {
        return Ok(f64::INFINITY);
    }
    let psi = psi_eval(PsiKind::Exponential, lambda)?;
    let a = k.a_d;
    // Observations are rescaled by 1/(2B) inside the epoch bound, hence the
    // 2B factors; at B = 1/2 this is (psi V + 2 kappa A + r) / (lambda A t).
    Ok((psi * v_t + 4.0 * bound * k.kappa * a + 2.0 * bound * r) / (lambda * a * t as f64))
}

/// Stitched empirical-Bernstein boundary at time `t` for the variance
/// process `V_t = (1/2B) sum ||X_i - mean_{i-1}||^2`, centered at the running
/// mean. Early epochs whose weight exceeds 0.68 give `+inf`.
pub fn stitched_eb_radius(t: u64, v_t: f64, cfg: &EstimatorConfig) -> Result<f64> {
    stitched_eb_radius_with(t, v_t, cfg, &Constants::new(cfg)?)
}

fn stitched_subgamma_radius_with(t: u64, cfg: &EstimatorConfig, k: &Constants) -> Result<f64> {
    let Method::StitchedSubGamma { psi } = cfg.method else {
        return Err(Error::Config("stitched_subgamma_radius needs the stitched sub-Gamma method".into()));
    };
    let PsiKind::Gamma { c } = psi else {
        return Err(Error::Config("stitched sub-Gamma bound requires a Gamma psi".into()));
    };
    if t == 0 {
        return Err(Error::NoEstimate);
    }
    let m = epoch(t);
    let r = epoch_log_budget(m, cfg.alpha);
    let lambda = psi_gamma_inverse(c, r / 2f64.powi(m as i32))?;
    let psi_val = psi_eval(psi, lambda)?;
    let a = k.a_d;
    let t = t as f64;
    Ok((psi_val * t + 2.0 * k.kappa * a + r) / (lambda * a * t))
}

/// Stitched sub-Gamma boundary with `V_t = t` and epoch weight
/// `psi_G^{-1}(r_m / 2^m)`.
pub fn stitched_subgamma_radius(t: u64, cfg: &EstimatorConfig) -> Result<f64> {
    stitched_subgamma_radius_with(t, cfg, &Constants::new(cfg)?)
}

/// A streaming confidence sphere sequence.
#[derive(Debug, Clone)]
pub struct Estimator {
    cfg: EstimatorConfig,
    state: StreamState,
    mode: AccumulatorMode,
    consts: Constants,
}

impl Estimator {
    pub fn new(cfg: EstimatorConfig) -> Result<Self> {
        let consts = Constants::new(&cfg)?;
        Ok(Self {
            state: StreamState::new(cfg.dim),
            mode: cfg.method.accumulator(),
            consts,
            cfg,
        })
    }

    pub fn config(&self) -> &EstimatorConfig {
        &self.cfg
    }

    pub fn state(&self) -> &StreamState {
        &self.state
    }

    pub fn t(&self) -> u64 {
        self.state.t()
    }

    /// Weight the next observation will receive.
    pub fn next_lambda(&self) -> f64 {
        if self.cfg.method.is_stitched() {
            1.0
        } else {
            self.cfg.schedule.next(&self.state)
        }
    }

    pub fn observe(&mut self, x: &[f64]) -> Result<()> {
        if let Some(bound) = self.cfg.method.norm_bound() {
            let n = norm(x);
            // NaN falls through to the update's finiteness check
            if n > bound {
                return Err(Error::OutOfBall { norm: n, bound });
            }
        }
        let lambda = self.next_lambda();
        self.state.update(x, lambda, self.mode)
    }

    pub fn radius(&self) -> Result<f64> {
        let (s, c, k) = (&self.state, &self.cfg, &self.consts);
        match self.cfg.method {
            Method::EmpiricalBernstein { .. } => eb_radius_with(s, c, k),
            Method::SubPsi { .. } => subpsi_radius_with(s, c, k),
            Method::CatoniGiulini { .. } => cg_radius_with(s, c, k),
            Method::RobustEb { .. } => robust_eb_radius_with(s, c, k),
            Method::SemiEmpirical { .. } => semi_empirical_radius_with(s, c, k),
            Method::StitchedEb { bound } => {
                stitched_eb_radius_with(s.t(), s.var_sum() / (2.0 * bound), c, k)
            }
            Method::StitchedSubGamma { .. } => stitched_subgamma_radius_with(s.t(), c, k),
        }
    }

    /// Writes the current center into `out` without allocating.
    pub fn center_into(&self, out: &mut [f64]) -> Result<()> {
        if self.cfg.method.is_stitched() {
            if self.state.t() == 0 {
                return Err(Error::NoEstimate);
            }
            self.state.running_mean_into(out);
            Ok(())
        } else {
            self.state.weighted_mean_into(out)
        }
    }

    pub fn center(&self) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.cfg.dim];
        self.center_into(&mut out)?;
        Ok(out)
    }

    pub fn region(&self) -> Result<ConfidenceRegion> {
        Ok(ConfidenceRegion {
            center: self.center()?,
            radius: self.radius()?,
            t: self.state.t(),
            alpha: self.cfg.alpha,
            shape: Shape::Sphere,
        })
    }
}

/// Runs an isotropic estimator on `Sigma^{-1/2} X`, giving confidence
/// ellipsoids `||W (center - mu)|| <= radius` in the original coordinates.
#[derive(Debug, Clone)]
pub struct WhitenedEstimator {
    inner: Estimator,
    whitening: Whitening,
}

impl WhitenedEstimator {
    pub fn new(cfg: EstimatorConfig, whitening: Whitening) -> Result<Self> {
        if whitening.dim() != cfg.dim {
            return Err(Error::DimensionMismatch {
                expected: cfg.dim,
                got: whitening.dim(),
            });
        }
        Ok(Self {
            inner: Estimator::new(cfg)?,
            whitening,
        })
    }

    pub fn observe(&mut self, x: &[f64]) -> Result<()> {
        let y = self.whitening.whiten(x)?;
        self.inner.observe(&y)
    }

    pub fn inner(&self) -> &Estimator {
        &self.inner
    }

    pub fn region(&self) -> Result<ConfidenceRegion> {
        let r = self.inner.region()?;
        Ok(ConfidenceRegion {
            center: self.whitening.unwhiten(&r.center)?,
            shape: Shape::Ellipsoid(self.whitening.clone()),
            ..r
        })
    }
}
