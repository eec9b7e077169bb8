//! Sub-Gaussian spheres with a deterministic weight sequence.

use confsphere::simlab::{generate, DistributionSpec};
use confsphere::{Estimator, EstimatorConfig, LambdaSchedule, Method, PsiKind};

fn main() -> confsphere::Result<()> {
    let sigma = 2.0;
    let mu = vec![1.0, -1.0, 0.0, 3.0];
    let spec = DistributionSpec::GaussianIso { mu: mu.clone(), sigma };
    // lambda_t = sqrt(log(1/alpha) / (sigma^2 t log(t+1)))
    let schedule = LambdaSchedule::AnytimeCg { alpha: 0.05, v: sigma * sigma, p: 2.0 };
    let cfg = EstimatorConfig::new(Method::SubPsi { psi: PsiKind::Gaussian { sigma } }, 4, 0.05, schedule)?;
    let mut est = Estimator::new(cfg)?;
    for (i, x) in generate(&spec, 50_000, 2)?.iter().enumerate() {
        est.observe(x)?;
        if [10, 100, 1_000, 10_000, 50_000].contains(&(i + 1)) {
            let r = est.region()?;
            println!("t = {:>6}  radius {:.4}  covers mu: {}", i + 1, r.radius, r.contains(&mu)?);
        }
    }
    Ok(())
}
