use confsphere::baselines::MoMConfig;
use confsphere::simlab::{
    checkpoints, generate, heavy_tail_scale, replication_rng, run_coverage, run_width_curve, CurveSource,
    DistributionSpec, Sampler,
};
use confsphere::{EstimatorConfig, LambdaSchedule, Method};
use nalgebra::DMatrix;

fn mean_of(xs: &[Vec<f64>]) -> Vec<f64> {
    let d = xs[0].len();
    (0..d).map(|j| xs.iter().map(|x| x[j]).sum::<f64>() / xs.len() as f64).collect()
}

/// Checks the sample mean and `E||X - mu||^2` against closed forms within
/// five standard errors.
fn check_moments(spec: &DistributionSpec, seed: u64) {
    let n = 100_000;
    let xs = generate(spec, n, seed).unwrap();
    let mu = spec.sampled_mean();
    let m = mean_of(&xs);
    let d = spec.dim();
    for j in 0..d {
        let var_j = xs.iter().map(|x| (x[j] - m[j]).powi(2)).sum::<f64>() / n as f64;
        let se = (var_j / n as f64).sqrt().max(1e-15);
        assert!((m[j] - mu[j]).abs() <= 5.0 * se, "{spec:?} coord {j}: {} vs {}", m[j], mu[j]);
    }
    if let Some(s2) = spec.centered_second_moment() {
        let sq: Vec<f64> = xs.iter().map(|x| x.iter().zip(&mu).map(|(a, b)| (a - b).powi(2)).sum()).collect();
        let est = sq.iter().sum::<f64>() / n as f64;
        let var = sq.iter().map(|v| (v - est).powi(2)).sum::<f64>() / n as f64;
        let se = (var / n as f64).sqrt().max(1e-15);
        assert!((est - s2).abs() <= 5.0 * se, "{spec:?}: E||X-mu||^2 {est} vs {s2}");
    }
}

#[test]
fn generator_moments() {
    let specs = [DistributionSpec::beta_product(10, 1.0, 1.0),
        DistributionSpec::beta_product(10, 50.0, 10.0),
        DistributionSpec::beta_centered(3, 2.0, 5.0),
        DistributionSpec::GaussianIso { mu: vec![1.0, -2.0, 3.0], sigma: 0.5 },
        DistributionSpec::GaussianCov {
            mu: vec![0.5, 0.0],
            sigma: DMatrix::from_row_slice(2, 2, &[2.0, 0.6, 0.6, 1.0]),
        },
        DistributionSpec::HeavyTail { d: 5, p_moment: 5.0, v: 2.0 },
        DistributionSpec::huber(
            DistributionSpec::GaussianIso { mu: vec![0.0, 0.0], sigma: 1.0 },
            0.2,
            DistributionSpec::PointMass { x: vec![3.0, -1.0] },
        )];
    for (i, s) in specs.iter().enumerate() {
        check_moments(s, 40 + i as u64);
    }
}

#[test]
fn beta_coordinate_means() {
    let xs = generate(&DistributionSpec::beta_product(10, 1.0, 1.0), 100_000, 1).unwrap();
    assert!(mean_of(&xs).iter().all(|m| (m - 0.5).abs() < 0.005));
    let xs = generate(&DistributionSpec::beta_product(10, 50.0, 10.0), 100_000, 2).unwrap();
    assert!(mean_of(&xs).iter().all(|m| (m - 5.0 / 6.0).abs() < 0.002));
    assert!(xs.iter().all(|x| x.iter().all(|v| (0.0..=1.0).contains(v))));
}

#[test]
fn huber_contamination_rate() {
    let spec = DistributionSpec::huber(
        DistributionSpec::GaussianIso { mu: vec![0.0; 3], sigma: 1.0 },
        0.1,
        DistributionSpec::PointMass { x: vec![5.0, 5.0, 5.0] },
    );
    let mut sampler: Sampler = spec.sampler().unwrap();
    let mut rng = replication_rng(9, 0);
    let mut x = vec![0.0; 3];
    let n = 100_000;
    let hits = (0..n).filter(|_| sampler.sample_into(&mut rng, &mut x)).count();
    let rate = hits as f64 / n as f64;
    assert!((rate - 0.1).abs() < 0.01, "{rate}");
    assert_eq!(spec.mean(), vec![0.0; 3]);
}

#[test]
fn heavy_tail_calibration() {
    // E R^p = s^p a / (a - p) with a = p + 1/2
    for &(p, v) in &[(2.0, 1.0), (3.0, 5.0), (4.0, 0.3)] {
        let s: f64 = heavy_tail_scale(p, v);
        let a = p + 0.5;
        assert!((s.powf(p) * a / (a - p) - v).abs() < 1e-12);
    }
    let spec = DistributionSpec::HeavyTail { d: 20, p_moment: 2.0, v: 1.0 };
    assert!((spec.centered_second_moment().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn invalid_specs() {
    assert!(DistributionSpec::beta_product(3, 0.0, 1.0).validate().is_err());
    assert!(DistributionSpec::beta_product(3, 1.0, -1.0).validate().is_err());
    let bad_eps = DistributionSpec::huber(
        DistributionSpec::beta_product(2, 1.0, 1.0),
        1.5,
        DistributionSpec::PointMass { x: vec![0.0, 0.0] },
    );
    assert!(bad_eps.validate().is_err());
    assert!(generate(&DistributionSpec::beta_product(2, 1.0, 1.0), 0, 1).is_err());
    let not_pd = DistributionSpec::GaussianCov { mu: vec![0.0; 2], sigma: DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]) };
    assert!(not_pd.validate().is_err());
}

#[test]
fn generation_is_reproducible() {
    let spec = DistributionSpec::HeavyTail { d: 4, p_moment: 2.0, v: 1.0 };
    assert_eq!(generate(&spec, 500, 77).unwrap(), generate(&spec, 500, 77).unwrap());
    assert_ne!(generate(&spec, 500, 77).unwrap(), generate(&spec, 500, 78).unwrap());
}

fn eb_cfg(d: usize, alpha: f64) -> EstimatorConfig {
    EstimatorConfig::new(
        Method::empirical_bernstein(0.5 * (d as f64).sqrt()),
        d,
        alpha,
        LambdaSchedule::AnytimeEb { alpha, cap: 0.5 },
    )
    .unwrap()
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let spec = DistributionSpec::beta_centered(3, 1.0, 1.0);
    // a loose constant schedule so that some replications miscover
    let cfg = EstimatorConfig::new(
        Method::RobustEb { bound: 0.5 * 3f64.sqrt(), eps: 0.0 },
        3,
        0.9,
        LambdaSchedule::Constant { lambda: 0.8 },
    )
    .unwrap();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let cov = run_coverage(&cfg, &spec, 2_000, 64, 5).unwrap();
            let width = run_width_curve(&[CurveSource::estimator(eb_cfg(3, 0.1))], &spec, 2_000, 16, 5, 10).unwrap();
            (cov, width)
        })
    };
    let (c1, w1) = run(1);
    let (c4, w4) = run(4);
    assert_eq!(c1, c4);
    assert_eq!(w1, w4);
}

#[test]
fn miscoverage_is_monotone_in_horizon() {
    let spec = DistributionSpec::huber(
        DistributionSpec::beta_centered(2, 1.0, 1.0),
        0.2,
        DistributionSpec::PointMass { x: vec![0.7, 0.0] },
    );
    let cfg = EstimatorConfig::new(
        Method::empirical_bernstein(0.72),
        2,
        0.1,
        LambdaSchedule::AnytimeEb { alpha: 0.1, cap: 0.5 },
    )
    .unwrap();
    let mut prev = 0;
    for h in [100, 1_000, 5_000, 20_000] {
        let r = run_coverage(&cfg, &spec, h, 50, 12).unwrap();
        assert!(r.miscovered >= prev);
        assert_eq!(r.coverage_hat, 1.0 - r.miscovered as f64 / 50.0);
        assert!((r.binomial_se - (r.coverage_hat * (1.0 - r.coverage_hat) / 50.0).sqrt()).abs() < 1e-15);
        prev = r.miscovered;
    }
    assert!(prev > 0, "contamination should eventually break the plain bound");
}

#[test]
fn point_mass_is_always_covered() {
    let spec = DistributionSpec::PointMass { x: vec![0.3, -0.2, 0.1] };
    let r = run_coverage(&eb_cfg(3, 0.1), &spec, 5_000, 20, 3).unwrap();
    assert_eq!(r.coverage_hat, 1.0);
    assert_eq!(r.binomial_se, 0.0);
}

#[test]
fn incompatible_pairs_are_rejected() {
    let gauss = DistributionSpec::GaussianIso { mu: vec![0.0; 3], sigma: 1.0 };
    assert!(run_coverage(&eb_cfg(3, 0.1), &gauss, 10, 2, 1).is_err());
    let too_wide = DistributionSpec::beta_product(3, 1.0, 1.0);
    assert!(run_coverage(&eb_cfg(3, 0.1), &too_wide, 10, 2, 1).is_err());
    let wrong_dim = DistributionSpec::beta_centered(4, 1.0, 1.0);
    assert!(run_coverage(&eb_cfg(3, 0.1), &wrong_dim, 10, 2, 1).is_err());
}

#[test]
fn checkpoint_layout() {
    let cps = checkpoints(1_000_000, 50);
    assert_eq!(cps[0], 1);
    assert_eq!(*cps.last().unwrap(), 1_000_000);
    assert!(cps.windows(2).all(|w| w[0] < w[1]));
    for k in 0..6u32 {
        let lo = 10u64.pow(k);
        let per = cps.iter().filter(|&&t| t >= lo && t < lo * 10).count();
        assert!(per <= 50);
    }
    // a cap above 50 is clamped
    assert_eq!(checkpoints(10_000, 500), checkpoints(10_000, 50));
    assert_eq!(checkpoints(37, 10).last(), Some(&37));
}

#[test]
fn single_replication_width_smoke() {
    let spec = DistributionSpec::beta_centered(2, 1.0, 1.0);
    let recs = run_width_curve(&[CurveSource::estimator(eb_cfg(2, 0.1))], &spec, 10_000, 1, 1, 10).unwrap();
    assert_eq!(recs.len(), checkpoints(10_000, 10).len());
    assert!(recs.iter().all(|r| r.radius_se == 0.0 && r.method == "eb"));
    let late: Vec<f64> = recs.iter().filter(|r| r.t >= 100).map(|r| r.mean_radius).collect();
    assert!(late.windows(2).all(|w| w[1] < w[0]), "{late:?}");
}

#[test]
fn compare_rows_are_interleaved() {
    let spec = DistributionSpec::GaussianIso { mu: vec![0.0; 4], sigma: 1.0 };
    let cg = EstimatorConfig::new(
        Method::catoni_giulini(4.0, 2.0),
        4,
        0.05,
        LambdaSchedule::AnytimeCg { alpha: 0.05, v: 4.0, p: 2.0 },
    )
    .unwrap();
    let mom = MoMConfig::new(0.05, 4.0).unwrap();
    let sources = [CurveSource::estimator(cg), CurveSource::MomUnion { label: "mom".into(), cfg: mom }];
    let recs = run_width_curve(&sources, &spec, 1_000, 3, 2, 5).unwrap();
    for pair in recs.chunks(2) {
        assert_eq!(pair[0].t, pair[1].t);
        assert_eq!(pair[0].method, "cg");
        assert_eq!(pair[1].method, "mom");
    }
}
