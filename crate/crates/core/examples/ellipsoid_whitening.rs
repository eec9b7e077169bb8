//! Confidence ellipsoids by whitening with a known covariance.

use confsphere::estimators::WhitenedEstimator;
use confsphere::simlab::{generate, DistributionSpec};
use confsphere::{EstimatorConfig, LambdaSchedule, Method, PsiKind, Whitening};
use nalgebra::DMatrix;

fn main() -> confsphere::Result<()> {
    let sigma = DMatrix::from_row_slice(3, 3, &[9.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.25]);
    let mu = vec![2.0, 0.0, -1.0];
    let spec = DistributionSpec::GaussianCov { mu: mu.clone(), sigma: sigma.clone() };
    let cfg = EstimatorConfig::new(
        Method::SubPsi { psi: PsiKind::Gaussian { sigma: 1.0 } },
        3,
        0.05,
        LambdaSchedule::AnytimeCg { alpha: 0.05, v: 1.0, p: 2.0 },
    )?;
    let mut est = WhitenedEstimator::new(cfg, Whitening::from_covariance(&sigma)?)?;
    for x in generate(&spec, 10_000, 7)? {
        est.observe(&x)?;
    }
    let region = est.region()?;
    println!("center {:?}", region.center);
    println!("Mahalanobis radius {:.4}; contains mu: {}", region.radius, region.contains(&mu)?);
    for axis in 0..3 {
        let mut probe = region.center.clone();
        probe[axis] += 0.5;
        println!("center + 0.5 e{axis} inside: {}", region.contains(&probe)?);
    }
    Ok(())
}
