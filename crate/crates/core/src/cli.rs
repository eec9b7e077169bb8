//! Run configuration, experiment dispatch and CSV output for the
//! `confsphere` binary.
//!
//! # Config grammar (TOML)
//!
//! ```toml
//! command = "coverage"        # coverage | width | compare | rate
//! horizon = 10000
//! replications = 500
//! seed = 7
//! out = "coverage.csv"
//! per_decade = 10             # checkpoint density for width/compare/rate (<= 50)
//! model = "sqrt_log_t_over_t" # rate only: or "lil"
//! fit_from = 100              # rate only: first checkpoint used in the fit
//!
//! [[estimator]]               # one or more
//! method = "eb"               # eb | subpsi | cg | robust_eb | semi_empirical
//!                             # | stitched_eb | stitched_subgamma | mom
//! d = 10
//! alpha = 0.1
//! B = 1.5812
//! schedule = "anytime_eb"     # constant | fixed_time_eb | anytime_eb | anytime_cg
//!                             # | fixed_time_cg | robust_var | robust_fixed_time
//!
//! [distribution]
//! kind = "beta_product"       # beta_product | gaussian_iso | gaussian_cov
//!                             # | heavy_tail | point_mass | huber_mix
//! a = 1.0
//! b = 1.0
//! recenter = true
//! ```
//!
//! Method keys: `B`, `kappa`, `conservative` (eb); `B`, `eps` (robust_eb);
//! `psi = { kind = "gaussian", sigma = 1.0 }` (subpsi; kinds `exponential`,
//! `gaussian`, `gamma` with `c`, `exponential_tail` with `sigma`,
//! `lambda_max`); `v`, `p`, `beta` (cg); `v`, `p`, `trace_sigma`
//! (semi_empirical); `B` (stitched_eb); `psi` of kind gamma
//! (stitched_subgamma); `trace_sigma`, `blocks` or `block_mult` (mom).
//! Schedule keys: `lambda` (constant); `cap`, `c`, `n` (eb schedules,
//! `c` defaults to `2 + 8/(3 log(1/alpha))`, `n` to the horizon); `b`, `cap`
//! (robust_var); `eps`, `B`, `n`, `cap` (robust_fixed_time). `label`
//! overrides the method column in output.
//!
//! Distribution keys: `d` (defaults to the first estimator's `d`); `a`, `b`,
//! `recenter` or `offset`, `scale` (beta_product); `mu`, `sigma`
//! (gaussian_iso, `sigma` a scalar; gaussian_cov, `sigma` a matrix);
//! `p`, `v` (heavy_tail); `x` (point_mass); `eps`, `base`, `contaminant`
//! (huber_mix, the last two are nested distribution tables).
//!
//! # CSV columns
//!
//! * coverage: `method,replication,first_miscoverage_t` (`-1` when covered)
//! * width / compare: `t,method,mean_radius,radius_se`
//! * rate: `method,model,slope,intercept,points,spread`
//!
//! Numbers are printed with 12 significant digits.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use toml::{Table, Value};

use crate::baselines::{BlockRule, MoMConfig};
use crate::estimators::{EstimatorConfig, Method};
use crate::schedule::{optimal_fixed_time_c, LambdaSchedule, ROBUST_VAR_CAP};
use crate::simlab::{
    fit_rate, normalized_spread, run_coverage, run_width_curve, trajectory, CoverageReport, CurveSource,
    DistributionSpec, RateModel, WidthRecord, DEFAULT_PER_DECADE, MAX_PER_DECADE,
};
use crate::special::PsiKind;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Coverage,
    Width,
    Compare,
    Rate,
}

impl Command {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "coverage" => Some(Command::Coverage),
            "width" => Some(Command::Width),
            "compare" => Some(Command::Compare),
            "rate" => Some(Command::Rate),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Coverage => "coverage",
            Command::Width => "width",
            Command::Compare => "compare",
            Command::Rate => "rate",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub estimators: Vec<CurveSource>,
    pub distribution: DistributionSpec,
    pub horizon: u64,
    pub replications: u64,
    pub seed: u64,
    pub output_path: PathBuf,
    pub per_decade: usize,
    pub model: RateModel,
    pub fit_from: u64,
}

/// Parses and validates a config. Every invalid field is reported, one per
/// line, in the error message.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_with(text, None)
}

/// As [`parse_config`], with `command` supplied by the caller when the
/// document omits it. A document command that disagrees is an error.
pub fn parse_config_with(text: &str, command: Option<Command>) -> Result<RunConfig> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
    let mut errs = Errors::default();

    let cmd = match (table.get("command"), command) {
        (None, Some(c)) => Some(c),
        (None, None) => {
            errs.push("command", "missing required parameter");
            None
        }
        (Some(v), given) => match v.as_str().and_then(Command::parse) {
            Some(c) if given.is_none_or(|g| g == c) => Some(c),
            Some(c) => {
                errs.push("command", &format!("config says {} but {} was requested", c.name(), given.unwrap().name()));
                None
            }
            None => {
                errs.push("command", "must be one of coverage, width, compare, rate");
                None
            }
        },
    };
    let horizon = errs.req_count(&table, "horizon", "horizon");
    let replications = errs.req_count(&table, "replications", "replications");
    let seed = errs.opt_count(&table, "seed", "seed").unwrap_or(0);
    let output_path = match table.get("out") {
        Some(Value::String(s)) => PathBuf::from(s),
        Some(_) => {
            errs.push("out", "must be a string");
            PathBuf::new()
        }
        None => PathBuf::from(format!("{}.csv", cmd.map_or("run", |c| c.name()))),
    };
    let per_decade = errs.opt_count(&table, "per_decade", "per_decade").unwrap_or(DEFAULT_PER_DECADE as u64) as usize;
    if per_decade == 0 || per_decade > MAX_PER_DECADE {
        errs.push("per_decade", &format!("must lie in [1, {MAX_PER_DECADE}]"));
    }
    let model = match table.get("model").map(|v| v.as_str()) {
        None => RateModel::SqrtLogTOverT,
        Some(Some("sqrt_log_t_over_t")) => RateModel::SqrtLogTOverT,
        Some(Some("lil")) => RateModel::Lil,
        Some(_) => {
            errs.push("model", "must be sqrt_log_t_over_t or lil");
            RateModel::SqrtLogTOverT
        }
    };
    let fit_from = errs.opt_count(&table, "fit_from", "fit_from").unwrap_or(100);

    let mut estimators = Vec::new();
    let mut first_d = None;
    match table.get("estimator") {
        Some(Value::Array(arr)) if !arr.is_empty() => {
            for (i, v) in arr.iter().enumerate() {
                let path = format!("estimator[{i}]");
                match v.as_table() {
                    Some(t) => {
                        if first_d.is_none() {
                            first_d = t.get("d").and_then(Value::as_integer).map(|d| d as usize);
                        }
                        if let Some(src) = parse_estimator(t, &path, horizon.unwrap_or(1), &mut errs) {
                            estimators.push(src);
                        }
                    }
                    None => errs.push(&path, "must be a table"),
                }
            }
        }
        _ => errs.push("estimator", "at least one [[estimator]] table is required"),
    }

    let distribution = match table.get("distribution") {
        Some(Value::Table(t)) => parse_distribution(t, "distribution", first_d, &mut errs),
        _ => {
            errs.push("distribution", "a [distribution] table is required");
            None
        }
    };

    if let Some(c) = cmd {
        match c {
            Command::Coverage => {
                if estimators.iter().any(|s| matches!(s, CurveSource::MomUnion { .. })) {
                    errs.push("estimator.method", "mom is only available for width, compare and rate runs");
                }
            }
            Command::Width if estimators.len() > 1 => {
                errs.push("estimator", "width takes a single estimator; use compare for several");
            }
            _ => {}
        }
    }

    errs.finish()?;
    Ok(RunConfig {
        command: cmd.unwrap(),
        estimators,
        distribution: distribution.unwrap(),
        horizon: horizon.unwrap(),
        replications: replications.unwrap(),
        seed,
        output_path,
        per_decade,
        model,
        fit_from,
    })
}

#[derive(Default)]
struct Errors(Vec<String>);

impl Errors {
    fn push(&mut self, field: &str, msg: &str) {
        self.0.push(format!("{field}: {msg}"));
    }

    fn finish(self) -> Result<()> {
        if self.0.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(self.0.join("\n")))
        }
    }

    fn num(&mut self, t: &Table, key: &str, path: &str) -> Option<f64> {
        match t.get(key) {
            None => None,
            Some(Value::Float(f)) => Some(*f),
            Some(Value::Integer(i)) => Some(*i as f64),
            Some(_) => {
                self.push(&field(path, key), "must be a number");
                None
            }
        }
    }

    fn req_num(&mut self, t: &Table, key: &str, path: &str) -> Option<f64> {
        if !t.contains_key(key) {
            self.push(&field(path, key), "missing required parameter");
        }
        self.num(t, key, path)
    }

    fn positive(&mut self, t: &Table, key: &str, path: &str) -> Option<f64> {
        let v = self.req_num(t, key, path)?;
        if v > 0.0 && v.is_finite() {
            Some(v)
        } else {
            self.push(&field(path, key), "must be positive");
            None
        }
    }

    fn opt_count(&mut self, t: &Table, key: &str, name: &str) -> Option<u64> {
        match t.get(key) {
            None => None,
            Some(Value::Integer(i)) if *i >= 0 => Some(*i as u64),
            Some(_) => {
                self.push(name, "must be a non-negative integer");
                None
            }
        }
    }

    fn req_count(&mut self, t: &Table, key: &str, name: &str) -> Option<u64> {
        match self.opt_count(t, key, name) {
            Some(0) => {
                self.push(name, "must be at least 1");
                None
            }
            Some(v) => Some(v),
            None => {
                if !t.contains_key(key) {
                    self.push(name, "missing required parameter");
                }
                None
            }
        }
    }

    fn bool(&mut self, t: &Table, key: &str, path: &str) -> bool {
        match t.get(key) {
            None => false,
            Some(Value::Boolean(b)) => *b,
            Some(_) => {
                self.push(&field(path, key), "must be true or false");
                false
            }
        }
    }

    fn vector(&mut self, t: &Table, key: &str, path: &str) -> Option<Vec<f64>> {
        let arr = t.get(key)?;
        let parsed = arr.as_array().and_then(|a| a.iter().map(value_f64).collect::<Option<Vec<f64>>>());
        if parsed.is_none() {
            self.push(&field(path, key), "must be an array of numbers");
        }
        parsed
    }
}

fn value_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Float(f) => Some(*f),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn field(path: &str, key: &str) -> String {
    format!("{path}.{key}")
}

fn parse_psi(t: &Table, path: &str, errs: &mut Errors) -> Option<PsiKind> {
    let Some(v) = t.get("psi") else {
        errs.push(&field(path, "psi"), "missing required parameter");
        return None;
    };
    let p = field(path, "psi");
    let Some(pt) = v.as_table() else {
        errs.push(&p, "must be a table such as { kind = \"gaussian\", sigma = 1.0 }");
        return None;
    };
    let kind = match pt.get("kind").and_then(Value::as_str) {
        Some("exponential") => PsiKind::Exponential,
        Some("gaussian") => PsiKind::Gaussian { sigma: errs.positive(pt, "sigma", &p)? },
        Some("gamma") => {
            let c = errs.req_num(pt, "c", &p)?;
            PsiKind::Gamma { c }
        }
        Some("exponential_tail") => PsiKind::ExponentialTail {
            sigma: errs.positive(pt, "sigma", &p)?,
            lambda_max: errs.positive(pt, "lambda_max", &p)?,
        },
        _ => {
            errs.push(&field(&p, "kind"), "must be exponential, gaussian, gamma or exponential_tail");
            return None;
        }
    };
    if let Err(e) = kind.validate() {
        errs.push(&p, &e.to_string());
        return None;
    }
    Some(kind)
}

fn parse_estimator(t: &Table, path: &str, horizon: u64, errs: &mut Errors) -> Option<CurveSource> {
    let n_before = errs.0.len();
    let method_name = match t.get("method").and_then(Value::as_str) {
        Some(m) => m.to_string(),
        None => {
            errs.push(&field(path, "method"), "missing required parameter");
            return None;
        }
    };
    let alpha = errs.req_num(t, "alpha", path);
    if let Some(a) = alpha {
        if !(a > 0.0 && a < 1.0) {
            errs.push(&field(path, "alpha"), "alpha must lie in (0,1)");
        }
    }
    let label = t.get("label").and_then(Value::as_str).map(str::to_string);

    if method_name == "mom" {
        let trace_sigma = errs.positive(t, "trace_sigma", path);
        let block_rule = match (t.get("blocks"), errs.num(t, "block_mult", path)) {
            (Some(Value::Integer(k)), None) if *k >= 1 => BlockRule::Fixed(*k as usize),
            (Some(_), None) => {
                errs.push(&field(path, "blocks"), "must be a positive integer");
                BlockRule::default()
            }
            (None, Some(m)) => BlockRule::LogBudget { mult: m },
            (None, None) => BlockRule::default(),
            (Some(_), Some(_)) => {
                errs.push(&field(path, "blocks"), "give either blocks or block_mult, not both");
                BlockRule::default()
            }
        };
        if errs.0.len() > n_before {
            return None;
        }
        let cfg = MoMConfig { alpha: alpha?, trace_sigma: trace_sigma?, block_rule };
        if let Err(e) = cfg.validate() {
            errs.push(path, &e.to_string());
            return None;
        }
        return Some(CurveSource::MomUnion { label: label.unwrap_or_else(|| "mom".into()), cfg });
    }

    let d = match t.get("d") {
        Some(Value::Integer(d)) if *d >= 1 => Some(*d as usize),
        Some(_) => {
            errs.push(&field(path, "d"), "must be a positive integer");
            None
        }
        None => {
            errs.push(&field(path, "d"), "missing required parameter");
            None
        }
    };
    let method = match method_name.as_str() {
        "eb" => {
            let bound = errs.positive(t, "B", path);
            let kappa = errs.num(t, "kappa", path);
            let conservative = errs.bool(t, "conservative", path);
            bound.map(|bound| Method::EmpiricalBernstein { bound, kappa, conservative })
        }
        "subpsi" => parse_psi(t, path, errs).map(|psi| Method::SubPsi { psi }),
        "cg" => {
            let v = errs.positive(t, "v", path);
            let p = errs.positive(t, "p", path);
            let beta = errs.num(t, "beta", path).unwrap_or(1.0);
            Some(Method::CatoniGiulini { v: v?, p: p?, beta })
        }
        "robust_eb" => {
            let bound = errs.positive(t, "B", path);
            let eps = errs.req_num(t, "eps", path);
            if eps.is_some_and(|e| e < 0.0) {
                errs.push(&field(path, "eps"), "eps must be non-negative");
            }
            Some(Method::RobustEb { bound: bound?, eps: eps? })
        }
        "semi_empirical" => {
            let v = errs.positive(t, "v", path);
            let p = errs.positive(t, "p", path);
            let trace_sigma = errs.req_num(t, "trace_sigma", path);
            Some(Method::SemiEmpirical { v: v?, p: p?, trace_sigma: trace_sigma? })
        }
        "stitched_eb" => errs.positive(t, "B", path).map(|bound| Method::StitchedEb { bound }),
        "stitched_subgamma" => parse_psi(t, path, errs).map(|psi| Method::StitchedSubGamma { psi }),
        other => {
            errs.push(&field(path, "method"), &format!("unknown method {other:?}"));
            None
        }
    };
    let schedule = parse_schedule(t, path, &method_name, alpha, method.as_ref(), horizon, errs);
    if errs.0.len() > n_before {
        return None;
    }
    let (method, d, alpha, schedule) = (method?, d?, alpha?, schedule?);
    match EstimatorConfig::new(method, d, alpha, schedule) {
        Ok(cfg) => Some(match label {
            Some(label) => CurveSource::Estimator { label, cfg },
            None => CurveSource::estimator(cfg),
        }),
        Err(e) => {
            errs.push(path, &e.to_string());
            None
        }
    }
}

fn parse_schedule(
    t: &Table,
    path: &str,
    method: &str,
    alpha: Option<f64>,
    parsed: Option<&Method>,
    horizon: u64,
    errs: &mut Errors,
) -> Option<LambdaSchedule> {
    if method.starts_with("stitched") {
        return Some(LambdaSchedule::Constant { lambda: 1.0 });
    }
    let name = match t.get("schedule").and_then(Value::as_str) {
        Some(s) => s,
        None => {
            errs.push(&field(path, "schedule"), "missing required parameter");
            return None;
        }
    };
    let alpha = alpha.unwrap_or(0.5);
    let n = || -> u64 {
        match t.get("n") {
            Some(Value::Integer(n)) if *n >= 1 => *n as u64,
            _ => horizon,
        }
    };
    let (v, p) = match parsed {
        Some(Method::CatoniGiulini { v, p, .. }) | Some(Method::SemiEmpirical { v, p, .. }) => (Some(*v), Some(*p)),
        _ => (None, None),
    };
    let cap_default = if method == "robust_eb" { ROBUST_VAR_CAP } else { 0.5 };
    let cap = errs.num(t, "cap", path).unwrap_or(cap_default);
    Some(match name {
        "constant" => LambdaSchedule::Constant { lambda: errs.positive(t, "lambda", path)? },
        "fixed_time_eb" => LambdaSchedule::FixedTimeEb {
            n: n(),
            alpha,
            c: errs.num(t, "c", path).unwrap_or_else(|| optimal_fixed_time_c(alpha)),
            cap,
        },
        "anytime_eb" => LambdaSchedule::AnytimeEb { alpha, cap },
        "anytime_cg" | "fixed_time_cg" => {
            let v = v.or_else(|| errs.positive(t, "v", path))?;
            let p = p.or_else(|| errs.positive(t, "p", path))?;
            if name == "anytime_cg" {
                LambdaSchedule::AnytimeCg { alpha, v, p }
            } else {
                LambdaSchedule::FixedTimeCg { n: n(), alpha, v, p }
            }
        }
        "robust_var" => LambdaSchedule::RobustVar {
            b: errs.positive(t, "b", path)?,
            cap: errs.num(t, "cap", path).unwrap_or(ROBUST_VAR_CAP),
        },
        "robust_fixed_time" => {
            let (eps, bound) = match parsed {
                Some(Method::RobustEb { bound, eps }) => (*eps, *bound),
                _ => (errs.req_num(t, "eps", path)?, errs.positive(t, "B", path)?),
            };
            LambdaSchedule::RobustFixedTime { n: n(), alpha, eps, bound, cap }
        }
        other => {
            errs.push(&field(path, "schedule"), &format!("unknown schedule {other:?}"));
            return None;
        }
    })
}

fn parse_distribution(t: &Table, path: &str, default_d: Option<usize>, errs: &mut Errors) -> Option<DistributionSpec> {
    let kind = match t.get("kind").and_then(Value::as_str) {
        Some(k) => k,
        None => {
            errs.push(&field(path, "kind"), "missing required parameter");
            return None;
        }
    };
    let d = match t.get("d") {
        Some(Value::Integer(d)) if *d >= 1 => Some(*d as usize),
        Some(_) => {
            errs.push(&field(path, "d"), "must be a positive integer");
            None
        }
        None => default_d,
    };
    let need_d = |errs: &mut Errors| {
        if d.is_none() {
            errs.push(&field(path, "d"), "missing required parameter");
        }
        d
    };
    let spec = match kind {
        "beta_product" => {
            let a = errs.positive(t, "a", path);
            let b = errs.positive(t, "b", path);
            let recenter = errs.bool(t, "recenter", path);
            let offset = errs.num(t, "offset", path);
            if recenter && offset.is_some() {
                errs.push(&field(path, "offset"), "give either recenter or offset, not both");
            }
            let offset = offset.unwrap_or(if recenter { 0.5 } else { 0.0 });
            let scale = errs.num(t, "scale", path).unwrap_or(1.0);
            let d = need_d(errs);
            DistributionSpec::BetaProduct { d: d?, a: a?, b: b?, offset, scale }
        }
        "gaussian_iso" => {
            let sigma = errs.req_num(t, "sigma", path);
            let mu = mean_vector(t, path, d, errs)?;
            DistributionSpec::GaussianIso { mu, sigma: sigma? }
        }
        "gaussian_cov" => {
            let mu = mean_vector(t, path, d, errs)?;
            let k = mu.len();
            let rows = t.get("sigma").and_then(Value::as_array).and_then(|rows| {
                rows.iter()
                    .map(|r| r.as_array().and_then(|r| r.iter().map(value_f64).collect::<Option<Vec<f64>>>()))
                    .collect::<Option<Vec<Vec<f64>>>>()
            });
            match rows {
                Some(rows) if rows.len() == k && rows.iter().all(|r| r.len() == k) => {
                    let sigma = DMatrix::from_fn(k, k, |i, j| rows[i][j]);
                    DistributionSpec::GaussianCov { mu, sigma }
                }
                _ => {
                    errs.push(&field(path, "sigma"), &format!("must be a {k}x{k} matrix"));
                    return None;
                }
            }
        }
        "heavy_tail" => {
            let p = errs.positive(t, "p", path);
            let v = errs.positive(t, "v", path);
            let d = need_d(errs);
            DistributionSpec::HeavyTail { d: d?, p_moment: p?, v: v? }
        }
        "point_mass" => match errs.vector(t, "x", path) {
            Some(x) => DistributionSpec::PointMass { x },
            None => {
                if !t.contains_key("x") {
                    errs.push(&field(path, "x"), "missing required parameter");
                }
                return None;
            }
        },
        "huber_mix" => {
            let eps = errs.req_num(t, "eps", path);
            let sub = |key: &str, errs: &mut Errors| match t.get(key) {
                Some(Value::Table(s)) => parse_distribution(s, &field(path, key), d, errs),
                _ => {
                    errs.push(&field(path, key), "missing required distribution table");
                    None
                }
            };
            let base = sub("base", errs);
            let contaminant = sub("contaminant", errs);
            DistributionSpec::huber(base?, eps?, contaminant?)
        }
        other => {
            errs.push(&field(path, "kind"), &format!("unknown distribution {other:?}"));
            return None;
        }
    };
    if let Err(e) = spec.validate() {
        errs.push(path, &e.to_string());
        return None;
    }
    Some(spec)
}

fn mean_vector(t: &Table, path: &str, d: Option<usize>, errs: &mut Errors) -> Option<Vec<f64>> {
    match (errs.vector(t, "mu", path), d) {
        (Some(mu), Some(d)) if mu.len() != d => {
            errs.push(&field(path, "mu"), &format!("has length {} but d = {d}", mu.len()));
            None
        }
        (Some(mu), _) => Some(mu),
        (None, Some(d)) if !t.contains_key("mu") => Some(vec![0.0; d]),
        (None, None) if !t.contains_key("mu") => {
            errs.push(&field(path, "d"), "missing required parameter");
            None
        }
        _ => None,
    }
}

/// `%.12g`-style formatting; infinities print as `inf` / `-inf`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    const SIG: i32 = 12;
    let sci = format!("{:.*e}", (SIG - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-4..SIG).contains(&exp) {
        let m = trim_zeros(mantissa);
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        trim_zeros(&format!("{:.*}", (SIG - 1 - exp) as usize, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A record type with a fixed CSV layout.
pub trait CsvRecord {
    fn header() -> &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

impl CsvRecord for WidthRecord {
    fn header() -> &'static [&'static str] {
        &["t", "method", "mean_radius", "radius_se"]
    }

    fn fields(&self) -> Vec<String> {
        vec![self.t.to_string(), self.method.clone(), fmt_num(self.mean_radius), fmt_num(self.radius_se)]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageRow {
    pub method: String,
    pub replication: u64,
    pub first_miscoverage_t: Option<u64>,
}

impl CsvRecord for CoverageRow {
    fn header() -> &'static [&'static str] {
        &["method", "replication", "first_miscoverage_t"]
    }

    fn fields(&self) -> Vec<String> {
        let t = self.first_miscoverage_t.map_or("-1".to_string(), |t| t.to_string());
        vec![self.method.clone(), self.replication.to_string(), t]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub method: String,
    pub model: RateModel,
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
    /// `max / min` of radius over the model predictor on the fitted range.
    pub spread: f64,
}

impl CsvRecord for RateRow {
    fn header() -> &'static [&'static str] {
        &["method", "model", "slope", "intercept", "points", "spread"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.method.clone(),
            self.model.name().to_string(),
            fmt_num(self.slope),
            fmt_num(self.intercept),
            self.points.to_string(),
            fmt_num(self.spread),
        ]
    }
}

/// Writes a header and one row per record. The file is written to a
/// temporary sibling and renamed, so a failed run leaves no partial output.
pub fn emit_csv<R: CsvRecord>(records: &[R], path: &Path) -> Result<()> {
    let mut buf = R::header().join(",");
    buf.push('\n');
    for r in records {
        let _ = writeln!(buf, "{}", r.fields().join(","));
    }
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(buf.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Result of [`execute`].
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Coverage(Vec<(String, f64, CoverageReport)>),
    Width(Vec<WidthRecord>),
    Rate(Vec<RateRow>),
}

impl Outcome {
    /// True when every coverage run meets `1 - alpha - 2 se`; non-coverage
    /// runs always pass.
    pub fn passes(&self) -> bool {
        match self {
            Outcome::Coverage(runs) => runs.iter().all(|(_, alpha, r)| r.meets(1.0 - alpha)),
            _ => true,
        }
    }

    /// Human-readable summary lines.
    pub fn summary(&self) -> Vec<String> {
        match self {
            Outcome::Coverage(runs) => runs
                .iter()
                .map(|(m, alpha, r)| {
                    format!(
                        "{m}: coverage {:.4} (se {:.4}, {} of {} miscovered, target {:.3}) {}",
                        r.coverage_hat,
                        r.binomial_se,
                        r.miscovered,
                        r.replications,
                        1.0 - alpha,
                        if r.meets(1.0 - alpha) { "ok" } else { "BELOW TARGET" }
                    )
                })
                .collect(),
            Outcome::Width(rows) => {
                let last_t = rows.last().map_or(0, |r| r.t);
                rows.iter()
                    .filter(|r| r.t == last_t)
                    .map(|r| format!("{}: mean radius {} at t = {}", r.method, fmt_num(r.mean_radius), r.t))
                    .collect()
            }
            Outcome::Rate(rows) => rows
                .iter()
                .map(|r| format!("{}: slope {:.4} vs {} (spread {:.3})", r.method, r.slope, r.model.name(), r.spread))
                .collect(),
        }
    }
}

/// Runs the experiment described by `cfg` and writes its CSV.
pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.command {
        Command::Coverage => {
            let mut runs = Vec::new();
            let mut rows = Vec::new();
            for src in &cfg.estimators {
                let CurveSource::Estimator { label, cfg: est } = src else {
                    return Err(Error::Config("coverage needs estimator methods".into()));
                };
                let report = run_coverage(est, &cfg.distribution, cfg.horizon, cfg.replications, cfg.seed)?;
                rows.extend(report.first_miscoverage.iter().enumerate().map(|(i, t)| CoverageRow {
                    method: label.clone(),
                    replication: i as u64,
                    first_miscoverage_t: *t,
                }));
                runs.push((label.clone(), est.alpha(), report));
            }
            emit_csv(&rows, &cfg.output_path)?;
            Ok(Outcome::Coverage(runs))
        }
        Command::Width | Command::Compare => {
            let recs = run_width_curve(
                &cfg.estimators,
                &cfg.distribution,
                cfg.horizon,
                cfg.replications,
                cfg.seed,
                cfg.per_decade,
            )?;
            emit_csv(&recs, &cfg.output_path)?;
            Ok(Outcome::Width(recs))
        }
        Command::Rate => {
            let recs = run_width_curve(
                &cfg.estimators,
                &cfg.distribution,
                cfg.horizon,
                cfg.replications,
                cfg.seed,
                cfg.per_decade,
            )?;
            let mut rows = Vec::new();
            for src in &cfg.estimators {
                let traj: Vec<(u64, f64)> =
                    trajectory(&recs, src.label()).into_iter().filter(|p| p.0 >= cfg.fit_from).collect();
                let fit = fit_rate(&traj, cfg.model)?;
                let spread = normalized_spread(&traj, cfg.model, cfg.fit_from, cfg.horizon)?;
                rows.push(RateRow {
                    method: src.label().to_string(),
                    model: cfg.model,
                    slope: fit.slope,
                    intercept: fit.intercept,
                    points: fit.points,
                    spread,
                });
            }
            emit_csv(&rows, &cfg.output_path)?;
            Ok(Outcome::Rate(rows))
        }
    }
}
