//! Radius trajectories: low vs high variance Beta data, and Catoni-Giulini
//! against the median-of-means baseline.

use confsphere::baselines::MoMConfig;
use confsphere::simlab::{run_width_curve, CurveSource, DistributionSpec};
use confsphere::{EstimatorConfig, LambdaSchedule, Method};

fn main() -> confsphere::Result<()> {
    let d = 10;
    let eb = EstimatorConfig::new(
        Method::empirical_bernstein(0.5 * (d as f64).sqrt()),
        d,
        0.05,
        LambdaSchedule::AnytimeEb { alpha: 0.05, cap: 0.5 },
    )?;
    let src = [CurveSource::estimator(eb)];
    let wide = run_width_curve(&src, &DistributionSpec::beta_centered(d, 1.0, 1.0), 100_000, 10, 1, 5)?;
    let narrow = run_width_curve(&src, &DistributionSpec::beta_centered(d, 50.0, 10.0), 100_000, 10, 1, 5)?;
    println!("{:>8} {:>12} {:>12}", "t", "Beta(1,1)", "Beta(50,10)");
    for (w, n) in wide.iter().zip(&narrow) {
        println!("{:>8} {:>12.5} {:>12.5}", w.t, w.mean_radius, n.mean_radius);
    }

    let d = 20;
    let spec = DistributionSpec::GaussianIso { mu: vec![0.0; d], sigma: 1.0 };
    let v = d as f64;
    let cg = EstimatorConfig::new(
        Method::catoni_giulini(v, 2.0),
        d,
        0.05,
        LambdaSchedule::AnytimeCg { alpha: 0.05, v, p: 2.0 },
    )?;
    let sources = [
        CurveSource::estimator(cg),
        CurveSource::MomUnion { label: "mom".into(), cfg: MoMConfig::new(0.05, v)? },
    ];
    println!("\n{:>8} {:>8} {:>12}", "t", "method", "radius");
    for r in run_width_curve(&sources, &spec, 100_000, 3, 2, 2)? {
        println!("{:>8} {:>8} {:>12.5}", r.t, r.method, r.mean_radius);
    }
    Ok(())
}
