//! Anytime empirical-Bernstein spheres for bounded vectors.

use confsphere::simlab::{generate, DistributionSpec};
use confsphere::{Estimator, EstimatorConfig, LambdaSchedule, Method};

fn main() -> confsphere::Result<()> {
    let d = 5;
    let bound = 0.5 * (d as f64).sqrt();
    let spec = DistributionSpec::beta_centered(d, 2.0, 5.0);
    let mu = spec.mean();
    let schedule = LambdaSchedule::AnytimeEb { alpha: 0.05, cap: 0.5 };

    let mut exact = Estimator::new(EstimatorConfig::new(Method::empirical_bernstein(bound), d, 0.05, schedule)?)?;
    let conservative = Method::EmpiricalBernstein { bound, kappa: None, conservative: true };
    let mut cons = Estimator::new(EstimatorConfig::new(conservative, d, 0.05, schedule)?)?;

    println!("{:>8} {:>12} {:>12} {:>12}", "t", "radius", "conservative", "error");
    for (i, x) in generate(&spec, 100_000, 1)?.iter().enumerate() {
        exact.observe(x)?;
        cons.observe(x)?;
        let t = i + 1;
        if t.is_power_of_two() || t == 100_000 {
            let region = exact.region()?;
            println!(
                "{t:>8} {:>12.5} {:>12.5} {:>12.5}",
                region.radius,
                cons.radius()?,
                region.distance_to(&mu)?
            );
        }
    }
    Ok(())
}
