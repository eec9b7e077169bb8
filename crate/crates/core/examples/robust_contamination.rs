//! Contamination-robust spheres against a point mass on the boundary.

use confsphere::simlab::{run_coverage, DistributionSpec};
use confsphere::{EstimatorConfig, LambdaSchedule, Method};

fn main() -> confsphere::Result<()> {
    let d = 2;
    let eps = 0.05;
    let bound = 0.5 * (d as f64).sqrt();
    let spec = DistributionSpec::huber(
        DistributionSpec::beta_centered(d, 1.0, 1.0),
        eps,
        DistributionSpec::PointMass { x: vec![bound, 0.0] },
    );
    let robust = EstimatorConfig::new(Method::RobustEb { bound, eps }, d, 0.1, LambdaSchedule::robust_var(1.0))?;
    let plain = EstimatorConfig::new(
        Method::empirical_bernstein(bound),
        d,
        0.1,
        LambdaSchedule::AnytimeEb { alpha: 0.1, cap: 0.5 },
    )?;
    for (name, cfg) in [("robust", &robust), ("plain", &plain)] {
        let r = run_coverage(cfg, &spec, 30_000, 100, 5)?;
        println!("{name:>6}: coverage of the clean mean {:.3} (se {:.3})", r.coverage_hat, r.binomial_se);
    }
    Ok(())
}
