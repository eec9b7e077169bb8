//! Scalar special functions used by the radii: the psi family of cumulant
//! bounds, the von Mises-Fisher mean multiplier `A_d(kappa)`, and the
//! sub-Gamma inverse used by stitching.

use crate::{Error, Result};

/// Distance from 1 at which `psi_E` refuses to evaluate.
const PSI_E_SINGULARITY_GUARD: f64 = 1e-12;

/// Relative change below which the Bessel-ratio continued fraction stops.
const CF_TOLERANCE: f64 = 1e-15;
const CF_TINY: f64 = 1e-300;

/// Cumulant-generating bound `psi` of a sub-psi family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PsiKind {
    /// `psi_E(l) = -log(1 - l) - l`, defined on `[0, 1)`.
    Exponential,
    /// `l^2 sigma^2 / 2` on `[0, inf)`.
    Gaussian { sigma: f64 },
    /// `l^2 / (2 (1 - c l))` on `[0, 1/c)`.
    Gamma { c: f64 },
    /// `l^2 sigma^2 / 2` restricted to `[0, lambda_max)`.
    ExponentialTail { sigma: f64, lambda_max: f64 },
}

impl PsiKind {
    /// Upper end of the domain (exclusive).
    pub fn lambda_max(&self) -> f64 {
        match *self {
            PsiKind::Exponential => 1.0,
            PsiKind::Gaussian { .. } => f64::INFINITY,
            PsiKind::Gamma { c } => {
                if c == 0.0 {
                    f64::INFINITY
                } else {
                    1.0 / c
                }
            }
            PsiKind::ExponentialTail { lambda_max, .. } => lambda_max,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            PsiKind::Exponential => true,
            PsiKind::Gaussian { sigma } => sigma.is_finite() && sigma > 0.0,
            PsiKind::Gamma { c } => c.is_finite() && c >= 0.0,
            PsiKind::ExponentialTail { sigma, lambda_max } => {
                sigma.is_finite() && sigma > 0.0 && lambda_max > 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid psi parameters {self:?}")))
        }
    }

    pub fn eval(&self, lambda: f64) -> Result<f64> {
        psi_eval(*self, lambda)
    }
}

/// Evaluates `psi(lambda)` for the given family.
pub fn psi_eval(kind: PsiKind, lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0) || lambda >= kind.lambda_max() {
        return Err(Error::Domain(format!(
            "lambda = {lambda} for {kind:?} (domain [0, {}))",
            kind.lambda_max()
        )));
    }
    Ok(match kind {
        PsiKind::Exponential => {
            if lambda >= 1.0 - PSI_E_SINGULARITY_GUARD {
                return Err(Error::Domain(format!(
                    "lambda = {lambda} too close to the psi_E singularity at 1"
                )));
            }
            psi_exponential(lambda)
        }
        PsiKind::Gaussian { sigma } | PsiKind::ExponentialTail { sigma, .. } => {
            0.5 * lambda * lambda * sigma * sigma
        }
        PsiKind::Gamma { c } => lambda * lambda / (2.0 * (1.0 - c * lambda)),
    })
}

/// `psi_E` without domain checks; callers guarantee `0 <= lambda < 1`.
#[inline]
pub(crate) fn psi_exponential(lambda: f64) -> f64 {
    // -ln(1 - l) - l, with ln_1p to keep precision for small lambda
    (-(-lambda).ln_1p() - lambda).abs()
}

/// `A_d(kappa) = I_{d/2}(kappa) / I_{d/2 - 1}(kappa)`.
///
/// Evaluated as the continued fraction
/// `I_nu / I_{nu-1} = 1 / (2 nu / k + 1 / (2 (nu + 1) / k + ...))` with the
/// modified Lentz algorithm, so no Bessel function is ever formed and large
/// `d` cannot overflow.
pub fn bessel_ratio(d: usize, kappa: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::Domain(format!("dimension d = {d} (need d >= 2)")));
    }
    if !kappa.is_finite() || kappa < 0.0 {
        return Err(Error::Domain(format!("kappa = {kappa}")));
    }
    if kappa == 0.0 {
        return Ok(0.0);
    }
    let nu = d as f64 / 2.0;
    let term = |k: usize| 2.0 * (nu + k as f64) / kappa;

    let mut f = term(0);
    let mut c = f;
    let mut dd = 0.0;
    // The fraction needs roughly kappa terms before the partial
    // denominators start to dominate.
    let max_iter = 10_000 + 4 * kappa.ceil() as usize;
    for k in 1..=max_iter {
        let b = term(k);
        dd += b;
        if dd.abs() < CF_TINY {
            dd = CF_TINY;
        }
        c = b + 1.0 / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        dd = 1.0 / dd;
        let delta = c * dd;
        f *= delta;
        if (delta - 1.0).abs() < CF_TOLERANCE {
            break;
        }
    }
    Ok(1.0 / f)
}

/// Upper bound `2 kappa A_d(kappa)` on the KL divergence between two vMF
/// laws with common concentration `kappa`.
pub fn vmf_kl_bound(d: usize, kappa: f64) -> Result<f64> {
    Ok(2.0 * kappa * bessel_ratio(d, kappa)?)
}

/// Inverse of `psi_G(l) = l^2 / (2 (1 - c l))`: `2 / (c + sqrt(c^2 + 2/u))`.
pub fn psi_gamma_inverse(c: f64, u: f64) -> Result<f64> {
    if !(u > 0.0) || !u.is_finite() {
        return Err(Error::Domain(format!("u = {u} (need u > 0)")));
    }
    if !(c >= 0.0) || !c.is_finite() {
        return Err(Error::Domain(format!("c = {c} (need c >= 0)")));
    }
    Ok(2.0 / (c + (c * c + 2.0 / u).sqrt()))
}
