use confsphere::estimators::{
    cg_radius, eb_radius, epoch, stitched_eb_radius, stitched_subgamma_radius, stitching_weight, WhitenedEstimator,
};
use confsphere::simlab::{generate, DistributionSpec};
use confsphere::special::psi_gamma_inverse;
use confsphere::{Estimator, EstimatorConfig, LambdaSchedule, Method, PsiKind, Shape, Whitening};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn bounded_stream(d: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
    generate(&DistributionSpec::beta_centered(d, 2.0, 3.0), n, seed).unwrap()
}

fn normalized_max(est: &mut Estimator, data: &[Vec<f64>]) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for (i, x) in data.iter().enumerate() {
        est.observe(x).unwrap();
        let t = (i + 1) as f64;
        if t >= 100.0 {
            let v = est.radius().unwrap() * (t / (t + 1.0).ln()).sqrt();
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    (lo, hi)
}

#[test]
fn anytime_radii_decay_at_the_log_rate() {
    let d = 3;
    let bound = 0.5 * (d as f64).sqrt();
    let data = bounded_stream(d, 1_000_000, 1);
    let v = DistributionSpec::beta_centered(d, 2.0, 3.0).centered_second_moment().unwrap() + 0.75;
    let cfgs = [
        EstimatorConfig::new(Method::empirical_bernstein(bound), d, 0.05, LambdaSchedule::AnytimeEb { alpha: 0.05, cap: 0.5 }),
        EstimatorConfig::new(Method::catoni_giulini(v, 2.0), d, 0.05, LambdaSchedule::AnytimeCg { alpha: 0.05, v, p: 2.0 }),
        EstimatorConfig::new(
            Method::SubPsi { psi: PsiKind::Gaussian { sigma: bound } },
            d,
            0.05,
            LambdaSchedule::AnytimeCg { alpha: 0.05, v: bound * bound, p: 2.0 },
        ),
        EstimatorConfig::new(
            Method::SemiEmpirical { v, p: 2.0, trace_sigma: v },
            d,
            0.05,
            LambdaSchedule::AnytimeCg { alpha: 0.05, v, p: 2.0 },
        ),
    ];
    for cfg in cfgs {
        let cfg = cfg.unwrap();
        let name = cfg.method().name();
        let (lo, hi) = normalized_max(&mut Estimator::new(cfg).unwrap(), &data);
        // bounded up to log log factors: the normalized radius may drift but not blow up
        assert!(hi.is_finite() && hi / lo < 5.0, "{name}: normalized radius in [{lo}, {hi}]");
    }
}

#[test]
fn exact_radius_never_exceeds_conservative() {
    let d = 6;
    let bound = 0.5 * (d as f64).sqrt();
    let sched = LambdaSchedule::AnytimeEb { alpha: 0.1, cap: 0.5 };
    let exact = EstimatorConfig::new(Method::empirical_bernstein(bound), d, 0.1, sched).unwrap();
    let cons = EstimatorConfig::new(
        Method::EmpiricalBernstein { bound, kappa: None, conservative: true },
        d,
        0.1,
        sched,
    )
    .unwrap();
    let mut est = Estimator::new(exact.clone()).unwrap();
    for x in bounded_stream(d, 5_000, 2) {
        est.observe(&x).unwrap();
        assert!(eb_radius(est.state(), &exact).unwrap() <= eb_radius(est.state(), &cons).unwrap());
    }
}

#[test]
fn robust_floor_and_eps_zero_comparison() {
    let d = 4;
    let bound = 1.0;
    let data = bounded_stream(d, 100_000, 3);
    let mk = |eps: f64| {
        Estimator::new(
            EstimatorConfig::new(Method::RobustEb { bound, eps }, d, 0.05, LambdaSchedule::Constant { lambda: 0.5 })
                .unwrap(),
        )
        .unwrap()
    };
    let (mut floor, mut zero) = (mk(0.02), mk(0.0));
    let mut plain = Estimator::new(
        EstimatorConfig::new(Method::empirical_bernstein(bound), d, 0.05, LambdaSchedule::Constant { lambda: 0.5 })
            .unwrap(),
    )
    .unwrap();
    let mut inf_floor = f64::INFINITY;
    for x in &data {
        floor.observe(x).unwrap();
        zero.observe(x).unwrap();
        plain.observe(x).unwrap();
        inf_floor = inf_floor.min(floor.radius().unwrap());
        let ratio = zero.radius().unwrap() / plain.radius().unwrap();
        assert!(ratio > 0.1 && ratio < 10.0, "ratio {ratio}");
    }
    let e2 = std::f64::consts::E.powi(2);
    let pure_floor = 2.0 * bound * 2.0 * (e2 * 0.02f64).ln_1p() / (2.0 / 3.0 * 0.5);
    assert!(inf_floor >= pure_floor, "{inf_floor} < {pure_floor}");
}

#[test]
fn robust_var_schedule_limit() {
    // lambda_t -> 1/(b sigma); the radius converges to
    // [(sqrt d/2B) psi_E(l) sigma^2 + 2B sqrt d log(1 + e^2 eps)] / ((2/3) l)
    let d = 4;
    let bound = 1.0;
    let eps = 0.01;
    let b = 3.0;
    let spec = DistributionSpec::beta_centered(d, 1.0, 1.0);
    let sigma2 = spec.centered_second_moment().unwrap();
    let cfg = EstimatorConfig::new(Method::RobustEb { bound, eps }, d, 0.05, LambdaSchedule::robust_var(b)).unwrap();
    let mut est = Estimator::new(cfg).unwrap();
    for x in generate(&spec, 200_000, 4).unwrap() {
        est.observe(&x).unwrap();
    }
    let l: f64 = (1.0 / (b * sigma2.sqrt())).min(0.68);
    let psi = -(1.0 - l).ln() - l;
    let sd = (d as f64).sqrt();
    let limit = (sd / (2.0 * bound) * psi * sigma2 + 2.0 * bound * sd * (std::f64::consts::E.powi(2) * eps).ln_1p())
        / (2.0 / 3.0 * l);
    let r = est.radius().unwrap();
    assert!((r - limit).abs() / limit < 0.03, "{r} vs {limit}");
}

#[test]
fn stitched_eb_rate_and_center() {
    let d = 3;
    let bound = 0.5 * (d as f64).sqrt();
    let alpha = 0.05;
    let cfg = EstimatorConfig::stitched(Method::StitchedEb { bound }, d, alpha).unwrap();
    let mut est = Estimator::new(cfg.clone()).unwrap();
    let data = bounded_stream(d, 1 << 20, 5);
    let mut sum = vec![0.0; d];
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for (i, x) in data.iter().enumerate() {
        est.observe(x).unwrap();
        for (s, v) in sum.iter_mut().zip(x) {
            *s += v;
        }
        let t = (i + 1) as u64;
        let r = est.radius().unwrap();
        if t < 16 {
            assert!(r.is_infinite());
        } else {
            let m = epoch(t);
            let norm = r * (t as f64 / ((stitching_weight(m)).ln() + (1.0 / alpha).ln())).sqrt();
            lo = lo.min(norm);
            hi = hi.max(norm);
        }
        if t.is_power_of_two() {
            let c = est.center().unwrap();
            for j in 0..d {
                assert!((c[j] - sum[j] / t as f64).abs() < 1e-12);
            }
            let v = est.state().var_sum() / (2.0 * bound);
            assert_eq!(r, stitched_eb_radius(t, v, &cfg).unwrap());
        }
    }
    assert!(hi / lo < 10.0, "normalized stitched radius in [{lo}, {hi}]");
}

#[test]
fn stitched_subgamma_quarter_ratio() {
    let d = 4;
    let cfg = EstimatorConfig::stitched(Method::StitchedSubGamma { psi: PsiKind::Gamma { c: 0.2 } }, d, 0.05).unwrap();
    for m in 6..=18u32 {
        let t = 1u64 << m;
        let ratio = stitched_subgamma_radius(t, &cfg).unwrap() / stitched_subgamma_radius(4 * t, &cfg).unwrap();
        assert!(ratio > 1.6 && ratio < 2.4, "t = {t}: ratio {ratio}");
    }
    // sub-Gaussian epoch weight
    let u = 0.01;
    assert!((psi_gamma_inverse(0.0, u).unwrap() - (2.0 * u).sqrt()).abs() < 1e-15);
}

#[test]
fn whitened_estimator_gives_ellipsoids() {
    let sigma = DMatrix::from_row_slice(2, 2, &[4.0, 1.0, 1.0, 1.0]);
    let w = Whitening::from_covariance(&sigma).unwrap();
    let mu = vec![1.0, -1.0];
    let spec = DistributionSpec::GaussianCov { mu: mu.clone(), sigma: sigma.clone() };
    let cfg = EstimatorConfig::new(
        Method::SubPsi { psi: PsiKind::Gaussian { sigma: 1.0 } },
        2,
        0.05,
        LambdaSchedule::AnytimeCg { alpha: 0.05, v: 1.0, p: 2.0 },
    )
    .unwrap();
    let mut est = WhitenedEstimator::new(cfg, w).unwrap();
    for x in generate(&spec, 20_000, 6).unwrap() {
        est.observe(&x).unwrap();
    }
    let region = est.region().unwrap();
    assert!(matches!(region.shape, Shape::Ellipsoid(_)));
    assert!(region.contains(&mu).unwrap());
    // a point far along the low-variance axis is excluded
    assert!(!region.contains(&[mu[0], mu[1] + 10.0 * region.radius]).unwrap());
}

#[test]
fn cg_radius_is_deterministic_under_anytime_schedule() {
    let d = 5;
    let cfg = EstimatorConfig::new(
        Method::catoni_giulini(2.0, 2.0),
        d,
        0.1,
        LambdaSchedule::AnytimeCg { alpha: 0.1, v: 2.0, p: 2.0 },
    )
    .unwrap();
    let mut a = Estimator::new(cfg.clone()).unwrap();
    let mut b = Estimator::new(cfg.clone()).unwrap();
    let spec = DistributionSpec::HeavyTail { d, p_moment: 2.0, v: 2.0 };
    for (x, y) in generate(&spec, 2000, 7).unwrap().iter().zip(generate(&spec, 2000, 8).unwrap()) {
        a.observe(x).unwrap();
        b.observe(&y).unwrap();
    }
    assert_eq!(cg_radius(a.state(), &cfg).unwrap(), b.radius().unwrap());
    assert_ne!(a.center().unwrap(), b.center().unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn radius_query_does_not_mutate(
        pts in proptest::collection::vec(proptest::collection::vec(-0.5f64..0.5, 2), 1..60),
    ) {
        let cfg = EstimatorConfig::new(
            Method::empirical_bernstein(1.0),
            2,
            0.1,
            LambdaSchedule::AnytimeEb { alpha: 0.1, cap: 0.5 },
        )
        .unwrap();
        let mut est = Estimator::new(cfg).unwrap();
        for p in &pts {
            est.observe(p).unwrap();
        }
        let snapshot = est.state().clone();
        let r1 = est.radius().unwrap();
        let r2 = est.radius().unwrap();
        prop_assert_eq!(r1, r2);
        prop_assert_eq!(&snapshot, est.state());
        prop_assert!(r1 > 0.0);
    }
}
