//! Simulation harness: generators, Monte Carlo coverage and width studies,
//! and rate fits.

mod distributions;
mod engine;
mod fit;

pub use distributions::{heavy_tail_scale, heavy_tail_shape, DistributionSpec, Sampler};
pub use engine::{
    checkpoints, generate, replication_rng, run_coverage, run_width_curve, CoverageReport, CurveSource,
    WidthRecord, DEFAULT_PER_DECADE, MAX_PER_DECADE,
};
pub use fit::{fit_rate, normalized_spread, trajectory, RateFit, RateModel};
