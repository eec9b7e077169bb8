//! Online accumulators shared by every estimator.

use crate::special::{psi_eval, psi_exponential, PsiKind};
use crate::{Error, Result};

/// Compensated (Neumaier) running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// What the quadratic accumulator and the weighted sum collect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AccumulatorMode {
    /// `quad += psi_E(l) ||X - mean_{t-1}||^2`; requires `l < 1`.
    Bernstein,
    /// Same accumulation as `Bernstein` with the hard cap `l <= 0.8`.
    RobustBernstein,
    /// `quad += psi(l)`; requires `l < psi.lambda_max()`.
    SubPsi(PsiKind),
    /// The weighted sum collects `th(X)` instead of `X`; `quad` unused.
    Threshold,
    /// `quad += l^2 (||X||^2 + v_pow)` where `v_pow = v^{2/p}`.
    SemiEmpirical { v_pow: f64 },
    /// Only running mean and variance proxy; `l` is recorded but unchecked
    /// beyond positivity.
    Plain,
}

impl AccumulatorMode {
    /// `(cap, inclusive)` for the admissible lambda range.
    pub fn lambda_cap(&self) -> (f64, bool) {
        match self {
            AccumulatorMode::Bernstein => (1.0, false),
            AccumulatorMode::RobustBernstein => (0.8, true),
            AccumulatorMode::SubPsi(psi) => (psi.lambda_max(), false),
            AccumulatorMode::Threshold
            | AccumulatorMode::SemiEmpirical { .. }
            | AccumulatorMode::Plain => (f64::INFINITY, false),
        }
    }

    fn check_lambda(&self, lambda: f64) -> Result<()> {
        let (cap, inclusive) = self.lambda_cap();
        let ok = lambda > 0.0 && lambda.is_finite() && if inclusive { lambda <= cap } else { lambda < cap };
        if ok {
            Ok(())
        } else {
            Err(Error::LambdaOutOfRange {
                lambda,
                cap,
                close: if inclusive { ']' } else { ')' },
            })
        }
    }
}

/// Running sums for one observation stream.
///
/// The mean used for the deviation `||X_t - mean_{t-1}||` is the mean of the
/// observations strictly before `X_t`, with `mean_0 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamState {
    dim: usize,
    t: u64,
    sum_lambda: KahanSum,
    sum_lambda_sq: KahanSum,
    weighted_sum: Vec<KahanSum>,
    running_sum: Vec<KahanSum>,
    quad_sum: KahanSum,
    var_sum: KahanSum,
}

impl StreamState {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            t: 0,
            sum_lambda: KahanSum::default(),
            sum_lambda_sq: KahanSum::default(),
            weighted_sum: vec![KahanSum::default(); dim],
            running_sum: vec![KahanSum::default(); dim],
            quad_sum: KahanSum::default(),
            var_sum: KahanSum::default(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn sum_lambda(&self) -> f64 {
        self.sum_lambda.value()
    }

    pub fn sum_lambda_sq(&self) -> f64 {
        self.sum_lambda_sq.value()
    }

    pub fn quad_sum(&self) -> f64 {
        self.quad_sum.value()
    }

    pub fn var_sum(&self) -> f64 {
        self.var_sum.value()
    }

    pub fn weighted_sum(&self) -> Vec<f64> {
        self.weighted_sum.iter().map(KahanSum::value).collect()
    }

    pub fn running_sum(&self) -> Vec<f64> {
        self.running_sum.iter().map(KahanSum::value).collect()
    }

    /// `sigma_hat_t^2 = var_sum / t`, or 1 before any data.
    pub fn sigma_hat_sq(&self) -> f64 {
        if self.t == 0 {
            1.0
        } else {
            self.var_sum() / self.t as f64
        }
    }

    /// Mean of everything seen so far (the zero vector when `t = 0`).
    pub fn running_mean_into(&self, out: &mut [f64]) {
        let n = self.t.max(1) as f64;
        for (o, s) in out.iter_mut().zip(&self.running_sum) {
            *o = if self.t == 0 { 0.0 } else { s.value() / n };
        }
    }

    pub fn running_mean(&self) -> Result<Vec<f64>> {
        if self.t == 0 {
            return Err(Error::NoEstimate);
        }
        let mut out = vec![0.0; self.dim];
        self.running_mean_into(&mut out);
        Ok(out)
    }

    /// Consumes one observation with weight `lambda`.
    pub fn update(&mut self, x: &[f64], lambda: f64, mode: AccumulatorMode) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        mode.check_lambda(lambda)?;

        // squared deviation from the mean of strictly earlier observations
        let prev = self.t as f64;
        let dev_sq: f64 = x
            .iter()
            .zip(&self.running_sum)
            .map(|(xi, s)| {
                let m = if self.t == 0 { 0.0 } else { s.value() / prev };
                (xi - m) * (xi - m)
            })
            .sum();

        match mode {
            AccumulatorMode::Bernstein | AccumulatorMode::RobustBernstein => {
                let psi = psi_eval(PsiKind::Exponential, lambda)?;
                debug_assert_eq!(psi, psi_exponential(lambda));
                self.quad_sum.add(psi * dev_sq);
            }
            AccumulatorMode::SubPsi(kind) => self.quad_sum.add(psi_eval(kind, lambda)?),
            AccumulatorMode::SemiEmpirical { v_pow } => {
                let nsq: f64 = x.iter().map(|v| v * v).sum();
                self.quad_sum.add(lambda * lambda * (nsq + v_pow));
            }
            AccumulatorMode::Threshold | AccumulatorMode::Plain => {}
        }

        if let AccumulatorMode::Threshold = mode {
            let n = norm(x);
            let scale = threshold_factor(n, lambda);
            for (w, xi) in self.weighted_sum.iter_mut().zip(x) {
                w.add(lambda * scale * xi);
            }
        } else {
            for (w, xi) in self.weighted_sum.iter_mut().zip(x) {
                w.add(lambda * xi);
            }
        }
        for (s, xi) in self.running_sum.iter_mut().zip(x) {
            s.add(*xi);
        }
        self.sum_lambda.add(lambda);
        self.sum_lambda_sq.add(lambda * lambda);
        self.var_sum.add(dev_sq);
        self.t += 1;
        Ok(())
    }

    pub fn weighted_mean_into(&self, out: &mut [f64]) -> Result<()> {
        if self.t == 0 {
            return Err(Error::NoEstimate);
        }
        let sl = self.sum_lambda();
        for (o, w) in out.iter_mut().zip(&self.weighted_sum) {
            *o = w.value() / sl;
        }
        Ok(())
    }

    /// `sum l_i g_i(X_i) / sum l_i`.
    pub fn weighted_mean(&self) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim];
        self.weighted_mean_into(&mut out)?;
        Ok(out)
    }
}

/// `(l ||x|| ^ 1) / (l ||x||)`, taken as 1 at `x = 0`.
#[inline]
pub(crate) fn threshold_factor(norm: f64, lambda: f64) -> f64 {
    let s = lambda * norm;
    if s <= 1.0 {
        1.0
    } else {
        1.0 / s
    }
}
