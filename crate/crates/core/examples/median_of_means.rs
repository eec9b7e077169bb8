//! Geometric median-of-means with a union bound over time.

use confsphere::baselines::{blocks_at, mom_estimate, mom_union_radius, MoMConfig};
use confsphere::simlab::{generate, DistributionSpec};
use confsphere::stream::norm;

fn main() -> confsphere::Result<()> {
    let d = 20;
    let spec = DistributionSpec::GaussianIso { mu: vec![0.0; d], sigma: 1.0 };
    let cfg = MoMConfig::new(0.05, d as f64)?;
    let data = generate(&spec, 100_000, 8)?;
    for t in [100usize, 1_000, 10_000, 100_000] {
        let k = blocks_at(t as u64, &cfg);
        let est = mom_estimate(&data[..t], k)?;
        println!(
            "t = {t:>6}  blocks {k:>3}  radius {:.4}  error {:.4}",
            mom_union_radius(t as u64, &cfg),
            norm(&est)
        );
    }
    Ok(())
}
