//! Stitched boundaries with iterated-logarithm width.

use confsphere::estimators::{epoch, stitched_eb_lambda, stitched_subgamma_radius};
use confsphere::simlab::{generate, DistributionSpec};
use confsphere::{Estimator, EstimatorConfig, Method, PsiKind};

fn main() -> confsphere::Result<()> {
    let d = 4;
    let bound = 0.5 * (d as f64).sqrt();
    let mut est = Estimator::new(EstimatorConfig::stitched(Method::StitchedEb { bound }, d, 0.05)?)?;
    let gamma = EstimatorConfig::stitched(Method::StitchedSubGamma { psi: PsiKind::Gamma { c: 0.1 } }, d, 0.05)?;
    let spec = DistributionSpec::beta_centered(d, 1.0, 1.0);
    for (i, x) in generate(&spec, 1 << 20, 6)?.iter().enumerate() {
        est.observe(x)?;
        let t = (i + 1) as u64;
        if t.is_power_of_two() && t >= 4 {
            let r = est.radius()?;
            let lil = r / ((t as f64).ln().ln().max(1e-9) / t as f64).sqrt();
            println!(
                "t = {t:>8}  epoch {:>2}  lambda_m {:.3}  eb radius {r:>10.5}  normalized {lil:>8.3}  sub-gamma {:.5}",
                epoch(t),
                stitched_eb_lambda(epoch(t), 0.05),
                stitched_subgamma_radius(t, &gamma)?
            );
        }
    }
    Ok(())
}
