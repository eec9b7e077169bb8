use std::path::Path;
use std::process::Command as Proc;

use confsphere::cli::{emit_csv, execute, parse_config, Command, CoverageRow, RateRow};
use confsphere::simlab::{CurveSource, DistributionSpec, RateModel, WidthRecord};
use confsphere::Method;
use sha2::{Digest, Sha256};

const MINIMAL: &str = r#"
command = "coverage"
horizon = 10000
replications = 500
seed = 7

[[estimator]]
method = "eb"
d = 10
alpha = 0.1
B = 1.58
schedule = "anytime_eb"

[distribution]
kind = "beta_product"
a = 1
b = 1
"#;

#[test]
fn minimal_config_parses() {
    let cfg = parse_config(MINIMAL).unwrap();
    assert_eq!(cfg.command, Command::Coverage);
    assert_eq!((cfg.horizon, cfg.replications, cfg.seed), (10_000, 500, 7));
    match &cfg.estimators[0] {
        CurveSource::Estimator { cfg, .. } => {
            assert_eq!(cfg.dim(), 10);
            assert!(matches!(cfg.method(), Method::EmpiricalBernstein { bound, .. } if *bound == 1.58));
        }
        other => panic!("{other:?}"),
    }
    assert_eq!(cfg.distribution, DistributionSpec::beta_product(10, 1.0, 1.0));
}

fn err(text: &str) -> String {
    parse_config(text).unwrap_err().to_string()
}

#[test]
fn missing_cg_v_is_named() {
    let text = MINIMAL.replace("method = \"eb\"", "method = \"cg\"\np = 2").replace("schedule = \"anytime_eb\"", "schedule = \"anytime_cg\"");
    let e = err(&text);
    assert!(e.contains("estimator[0].v: missing required parameter"), "{e}");
}

#[test]
fn alpha_range_message() {
    let e = err(&MINIMAL.replace("alpha = 0.1", "alpha = 1.5"));
    assert!(e.contains("alpha must lie in (0,1)"), "{e}");
}

#[test]
fn every_invalid_field_is_reported() {
    let text = MINIMAL
        .replace("alpha = 0.1", "alpha = 0.0")
        .replace("horizon = 10000", "horizon = 0")
        .replace("a = 1\n", "a = -1\n");
    let e = err(&text);
    for needle in ["horizon", "estimator[0].alpha", "distribution.a"] {
        assert!(e.contains(needle), "{needle} not in {e}");
    }
}

#[test]
fn unknown_method_and_negative_eps() {
    let e = err(&MINIMAL.replace("method = \"eb\"", "method = \"bogus\""));
    assert!(e.contains("unknown method"), "{e}");
    let text = MINIMAL.replace("method = \"eb\"", "method = \"robust_eb\"\neps = -0.1");
    let e = err(&text);
    assert!(e.contains("estimator[0].eps: eps must be non-negative"), "{e}");
}

#[test]
fn mom_rejected_for_coverage() {
    let doc = r#"
command = "coverage"
horizon = 10
replications = 2

[[estimator]]
method = "mom"
alpha = 0.1
trace_sigma = 1.0

[distribution]
kind = "gaussian_iso"
d = 2
sigma = 1.0
"#;
    assert!(err(doc).contains("mom is only available"));
}

#[test]
fn nested_huber_config() {
    let text = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/robust_coverage.toml")).unwrap();
    let cfg = parse_config(&text).unwrap();
    assert_eq!(cfg.estimators.len(), 2);
    assert!(matches!(cfg.distribution, DistributionSpec::HuberMix { eps, .. } if eps == 0.05));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        parse_config(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}

#[test]
fn empty_record_stream_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("w.csv");
    emit_csv::<WidthRecord>(&[], &p).unwrap();
    assert_eq!(std::fs::read_to_string(&p).unwrap(), "t,method,mean_radius,radius_se\n");
    let p = dir.path().join("c.csv");
    emit_csv(
        &[CoverageRow { method: "eb".into(), replication: 0, first_miscoverage_t: None }],
        &p,
    )
    .unwrap();
    assert_eq!(std::fs::read_to_string(&p).unwrap(), "method,replication,first_miscoverage_t\neb,0,-1\n");
    let p = dir.path().join("r.csv");
    emit_csv(
        &[RateRow { method: "cg".into(), model: RateModel::Lil, slope: 1.0 / 3.0, intercept: 0.0, points: 20, spread: 1.5 }],
        &p,
    )
    .unwrap();
    assert_eq!(std::fs::read_to_string(&p).unwrap().lines().nth(1), Some("cg,lil,0.333333333333,0,20,1.5"));
}

#[test]
fn unwritable_path_errors_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("missing_dir").join("out.csv");
    assert!(emit_csv::<WidthRecord>(&[], &p).is_err());
    assert!(!p.exists());
}

const COMPARE: &str = r#"
command = "compare"
horizon = 2000
replications = 3
seed = 4
per_decade = 5

[[estimator]]
method = "cg"
d = 3
alpha = 0.05
v = 3.0
p = 2.0
schedule = "anytime_cg"

[[estimator]]
method = "mom"
alpha = 0.05
trace_sigma = 3.0

[distribution]
kind = "gaussian_iso"
sigma = 1.0
"#;

fn sha(path: &Path) -> Vec<u8> {
    Sha256::digest(std::fs::read(path).unwrap()).to_vec()
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = parse_config(COMPARE).unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    cfg.output_path = a.clone();
    execute(&cfg).unwrap();
    cfg.output_path = b.clone();
    execute(&cfg).unwrap();
    assert_eq!(sha(&a), sha(&b));
    let text = std::fs::read_to_string(&a).unwrap();
    let methods: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert!(methods.chunks(2).all(|c| c == ["cg", "mom"]));
}

fn bin() -> Proc {
    Proc::new(env!("CARGO_BIN_EXE_confsphere"))
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.toml");
    std::fs::write(
        &good,
        MINIMAL
            .replace("horizon = 10000", "horizon = 500")
            .replace("replications = 500", "replications = 20")
            .replace("B = 1.58", "B = 1.5812")
            .replace("b = 1\n", "b = 1\nrecenter = true\n"),
    )
    .unwrap();
    let out = dir.path().join("cov.csv");
    let status = bin()
        .args(["coverage", "--config"])
        .arg(&good)
        .args(["--assert", "--threads", "2", "--seed", "3", "--out"])
        .arg(&out)
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 21);

    // contaminated stream: the plain bound fails the threshold under --assert
    let bad = dir.path().join("bad.toml");
    std::fs::write(
        &bad,
        r#"
horizon = 30000
replications = 10
seed = 5
[[estimator]]
method = "eb"
d = 2
alpha = 0.1
B = 0.7072
schedule = "anytime_eb"
[distribution]
kind = "huber_mix"
eps = 0.05
base = { kind = "beta_product", a = 1.0, b = 1.0, recenter = true }
contaminant = { kind = "point_mass", x = [0.7071, 0.0] }
"#,
    )
    .unwrap();
    let out_bad = dir.path().join("bad.csv");
    let run = |assert: bool| {
        let mut c = bin();
        c.args(["coverage", "--config"]).arg(&bad).arg("--out").arg(&out_bad);
        if assert {
            c.arg("--assert");
        }
        c.output().unwrap().status
    };
    assert_eq!(run(true).code(), Some(1));
    assert!(run(false).success());

    // config error: nonzero, nothing written
    let broken = dir.path().join("broken.toml");
    std::fs::write(&broken, MINIMAL.replace("alpha = 0.1", "alpha = 1.5")).unwrap();
    let out_broken = dir.path().join("never.csv");
    let o = bin().args(["coverage", "--config"]).arg(&broken).arg("--out").arg(&out_broken).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("alpha must lie in (0,1)"));
    assert!(!out_broken.exists());

    // subcommand disagreeing with the config
    let o = bin().args(["width", "--config"]).arg(&good).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn rate_command_rows() {
    let doc = r#"
command = "rate"
horizon = 100000
replications = 1
seed = 2
per_decade = 10

[[estimator]]
method = "cg"
d = 2
alpha = 0.05
v = 2.0
p = 2.0
schedule = "anytime_cg"

[distribution]
kind = "gaussian_iso"
sigma = 1.0
"#;
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = parse_config(doc).unwrap();
    cfg.output_path = dir.path().join("rate.csv");
    let outcome = execute(&cfg).unwrap();
    let text = std::fs::read_to_string(&cfg.output_path).unwrap();
    assert!(text.starts_with("method,model,slope,intercept,points,spread\ncg,sqrt_log_t_over_t,"));
    assert!(outcome.passes());
}
