//! Fitting radius trajectories to sqrt(log t / t) and sqrt(log log t / t).

use confsphere::simlab::{fit_rate, normalized_spread, run_width_curve, trajectory, CurveSource, DistributionSpec, RateModel};
use confsphere::{EstimatorConfig, LambdaSchedule, Method};

fn main() -> confsphere::Result<()> {
    let d = 6;
    let bound = 0.5 * (d as f64).sqrt();
    let eb = EstimatorConfig::new(
        Method::empirical_bernstein(bound),
        d,
        0.05,
        LambdaSchedule::AnytimeEb { alpha: 0.05, cap: 0.5 },
    )?;
    let st = EstimatorConfig::stitched(Method::StitchedEb { bound }, d, 0.05)?;
    let recs = run_width_curve(
        &[CurveSource::estimator(eb), CurveSource::estimator(st)],
        &DistributionSpec::beta_centered(d, 1.0, 1.0),
        1_000_000,
        1,
        3,
        10,
    )?;
    let eb_traj: Vec<_> = trajectory(&recs, "eb").into_iter().filter(|p| p.0 >= 100).collect();
    let fit = fit_rate(&eb_traj, RateModel::SqrtLogTOverT)?;
    println!("eb: slope {:.4}, intercept {:.4} against sqrt(log t / t)", fit.slope, fit.intercept);
    let st_traj = trajectory(&recs, "stitched_eb");
    println!(
        "stitched: max/min of r sqrt(t / log log t) on [1e3, 1e6] = {:.3}",
        normalized_spread(&st_traj, RateModel::Lil, 1_000, 1_000_000)?
    );
    Ok(())
}
