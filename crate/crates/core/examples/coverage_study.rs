//! Monte Carlo check of time-uniform coverage.

use confsphere::simlab::{run_coverage, DistributionSpec};
use confsphere::{EstimatorConfig, LambdaSchedule, Method};

fn main() -> confsphere::Result<()> {
    let d = 10;
    let cfg = EstimatorConfig::new(
        Method::empirical_bernstein(0.5 * (d as f64).sqrt()),
        d,
        0.1,
        LambdaSchedule::AnytimeEb { alpha: 0.1, cap: 0.5 },
    )?;
    let report = run_coverage(&cfg, &DistributionSpec::beta_centered(d, 1.0, 1.0), 10_000, 200, 9)?;
    println!(
        "coverage {:.3} +- {:.3} over {} replications (target {}), meets target: {}",
        report.coverage_hat,
        report.binomial_se,
        report.replications,
        0.9,
        report.meets(0.9)
    );
    Ok(())
}
