//! Heavy-tailed spheres using a known covariance trace.

use confsphere::simlab::{generate, DistributionSpec};
use confsphere::{Estimator, EstimatorConfig, LambdaSchedule, Method};

fn main() -> confsphere::Result<()> {
    let d = 8;
    let v = 2.0;
    let spec = DistributionSpec::HeavyTail { d, p_moment: 2.0, v };
    let trace = spec.centered_second_moment().expect("finite for p = 2");
    let schedule = LambdaSchedule::AnytimeCg { alpha: 0.05, v, p: 2.0 };
    let mut semi = Estimator::new(EstimatorConfig::new(
        Method::SemiEmpirical { v, p: 2.0, trace_sigma: trace },
        d,
        0.05,
        schedule,
    )?)?;
    let mut cg = Estimator::new(EstimatorConfig::new(Method::catoni_giulini(v, 2.0), d, 0.05, schedule)?)?;
    for (i, x) in generate(&spec, 100_000, 4)?.iter().enumerate() {
        semi.observe(x)?;
        cg.observe(x)?;
        if (i + 1) % 20_000 == 0 {
            println!("t = {:>6}  semi-empirical {:.4}  catoni-giulini {:.4}", i + 1, semi.radius()?, cg.radius()?);
        }
    }
    Ok(())
}
