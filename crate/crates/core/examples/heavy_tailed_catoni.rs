//! Catoni-Giulini spheres under a finite second moment only.

use confsphere::estimators::cg_threshold;
use confsphere::simlab::{generate, DistributionSpec};
use confsphere::stream::norm;
use confsphere::{Estimator, EstimatorConfig, LambdaSchedule, Method};

fn main() -> confsphere::Result<()> {
    let d = 20;
    let v = 1.0;
    // Pareto radius with E||X||^2 = v and infinite moments beyond 2.5
    let spec = DistributionSpec::HeavyTail { d, p_moment: 2.0, v };
    let cfg = EstimatorConfig::new(
        Method::catoni_giulini(v, 2.0),
        d,
        0.05,
        LambdaSchedule::AnytimeCg { alpha: 0.05, v, p: 2.0 },
    )?;
    let mut est = Estimator::new(cfg)?;
    let data = generate(&spec, 200_000, 3)?;
    let mut sum = vec![0.0; d];
    for (i, x) in data.iter().enumerate() {
        est.observe(x)?;
        sum.iter_mut().zip(x).for_each(|(s, v)| *s += v);
        let t = i + 1;
        if t % 40_000 == 0 {
            let mean: Vec<f64> = sum.iter().map(|s| s / t as f64).collect();
            println!(
                "t = {t:>6}  radius {:.4}  |thresholded center| {:.4}  |sample mean| {:.4}",
                est.radius()?,
                norm(&est.center()?),
                norm(&mean)
            );
        }
    }
    let big = data.iter().map(|x| norm(x)).fold(0.0, f64::max);
    println!("largest observation norm {big:.2}; th clips it to {:.2} at lambda = 0.1", norm(&cg_threshold(&[big], 0.1)));
    Ok(())
}
