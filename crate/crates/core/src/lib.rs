//! Time-uniform confidence sphere sequences for the mean of random vectors.
//!
//! A confidence sphere sequence is a family of balls `(C_t)` with
//! `P(mu in C_t for all t >= 1) >= 1 - alpha`. The crate provides streaming
//! estimators for several distributional regimes:
//!
//! | method | assumption | center |
//! |---|---|---|
//! | empirical Bernstein | `||X|| <= B` | lambda-weighted mean |
//! | sub-psi | directional MGF bounded by `e^psi` | lambda-weighted mean |
//! | Catoni-Giulini | `E||X||^p <= v`, `p >= 2` | weighted mean of thresholded points |
//! | robust empirical Bernstein | bounded base law, TV-contaminated stream | lambda-weighted mean |
//! | semi-empirical | `E||X||^p <= v`, known `Tr(Sigma)` | lambda-weighted mean |
//! | stitched (EB / sub-Gamma) | as above | running mean, LIL rate |
//!
//! plus a median-of-means baseline, data generators and Monte Carlo harnesses
//! ([`simlab`]) and the configuration / CSV layer used by the `confsphere`
//! binary ([`cli`]).
//!
//! ```
//! use confsphere::{EstimatorConfig, Estimator, LambdaSchedule, Method};
//!
//! let cfg = EstimatorConfig::new(
//!     Method::empirical_bernstein(1.0),
//!     3,
//!     0.05,
//!     LambdaSchedule::AnytimeEb { alpha: 0.05, cap: 0.5 },
//! )
//! .unwrap();
//! let mut est = Estimator::new(cfg).unwrap();
//! for i in 0..1000 {
//!     let s = (i as f64 * 0.7).sin() * 0.5;
//!     est.observe(&[s, -s, 0.1]).unwrap();
//! }
//! let region = est.region().unwrap();
//! assert!(region.radius > 0.0);
//! ```

// Negated comparisons reject NaN inputs along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod cli;
mod error;
pub mod estimators;
pub mod region;
pub mod schedule;
pub mod simlab;
pub mod special;
pub mod stream;

pub use error::{Error, Result};
pub use estimators::{Estimator, EstimatorConfig, Method};
pub use region::{ConfidenceRegion, Shape, Whitening};
pub use schedule::LambdaSchedule;
pub use special::PsiKind;
pub use stream::{AccumulatorMode, StreamState};
