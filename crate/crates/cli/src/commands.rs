//! Subcommand bodies: config in, tables and summary out.

use hamlab::experiments::{
    asclt_experiment, clt_experiment, covariance_decay_experiment, dyadic, il_criterion_scan,
    lemma1_demo, poincare_gamma_check, AscltConfig, AscltMode, CltConfig, CovDecayConfig,
    IlConfig, Lemma1Config, PoincareConfig, Setup, TestFunction,
};
use hamlab::fields::{integral_series, standardize, ThetaGrid};
use hamlab::levy::{sample_prm, SpaceTimeWindow};
use hamlab::oracle::MomentOracle;
use hamlab::output::Table;
use hamlab::rng::Purpose;
use hamlab::row;
use hamlab::solver::solve_fast;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::CliError;

/// Tables (the first is the main one; the others are named companions),
/// the serialized report and the pass/fail flags.
pub struct Output {
    pub tables: Vec<(String, Table)>,
    pub report: Value,
    pub checks: Value,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn list_text(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",")
}

pub fn apply_defaults(name: &str, c: &mut ExperimentConfig) {
    match name {
        "oracle" => {
            c.set_default("theta", "1,2,5,10,100,200");
            c.set_default("ws", list_text(&dyadic(4.0, 256.0)));
        }
        "simulate" => {
            c.set_default("theta_max", 10);
            c.set_default("per_decade", 64);
        }
        "clt" | "calibrate" => {
            c.set_default("theta", "2,8,32");
            c.set_default("reps", 10_000);
        }
        "asclt" => {
            c.set_default("theta_max", 2000);
            c.set_default("reps", 5);
            c.set_default("per_decade", 64);
            c.set_default("mode", "model");
        }
        "il" => {
            c.set_default("reps", 400);
            c.set_default("per_decade", 64);
            c.set_default("zero_field", false);
        }
        "cov-decay" => {
            c.set_default("theta", 1);
            c.set_default("ws", list_text(&dyadic(4.0, 256.0)));
            c.set_default("reps", 0);
        }
        "lemma1" => {
            c.set_default("theta_max", 2000);
            c.set_default("reps", 5);
            c.set_default("per_decade", 64);
            c.set_default("f", "cos");
        }
        "poincare" => {
            c.set_default("reps", 1000);
            c.set_default("perturbations", 16);
        }
        _ => unreachable!("unknown subcommand {name}"),
    }
}

fn setup(c: &ExperimentConfig, threads: Option<usize>) -> Result<Setup, CliError> {
    let model = c.model()?;
    let t0 = c.f64("t0")?;
    if !(t0 > 0.0 && t0.is_finite()) {
        return Err(CliError::Config(format!("t0 must be positive and finite, got {t0}")));
    }
    let mut s = Setup::new(model, t0, c.u64("seed")?);
    if let Some(n) = threads {
        s = s.with_threads(n);
    }
    Ok(s)
}

fn test_function(text: &str) -> Result<TestFunction, CliError> {
    match text.split_once(':') {
        None if text == "cos" => Ok(TestFunction::Cosine),
        Some(("clip", m)) => match m.trim().parse::<f64>() {
            Ok(bound) if bound > 0.0 => Ok(TestFunction::ClippedIdentity { bound }),
            _ => Err(CliError::Config(format!("f: clip bound must be positive, got {m:?}"))),
        },
        _ => Err(CliError::Config(format!("f must be cos or clip:M, got {text:?}"))),
    }
}

pub fn dispatch(name: &str, c: &ExperimentConfig, threads: Option<usize>) -> Result<Output, CliError> {
    let setup = setup(c, threads)?;
    match name {
        "oracle" => oracle(c, &setup),
        "simulate" => simulate(c, &setup),
        "clt" => clt(c, setup, false),
        "calibrate" => clt(c, setup, true),
        "asclt" => asclt(c, setup),
        "il" => il(c, setup),
        "cov-decay" => cov_decay(c, setup),
        "lemma1" => lemma1(c, setup),
        "poincare" => poincare(c, setup),
        _ => unreachable!("unknown subcommand {name}"),
    }
}

fn oracle(c: &ExperimentConfig, setup: &Setup) -> Result<Output, CliError> {
    let oracle = setup.oracle()?;
    let thetas = c.list("theta")?;
    let ws = c.list("ws")?;
    if thetas.iter().chain(&ws).any(|&x| !(x >= 0.0 && x.is_finite())) {
        return Err(CliError::Config("theta and ws must be finite and nonnegative".into()));
    }
    let mut sigma = Table::new(&["theta", "sigma2", "sigma2_over_theta"]);
    for &th in &thetas {
        let v = oracle.variance_f(th);
        sigma.push(row![th, v, v / th]);
    }
    let mut cov = Table::new(&["theta", "w", "cov", "corr", "bound_ratio"]);
    for &th in &thetas {
        for &w in ws.iter().filter(|&&w| w > th) {
            let corr = oracle.correlation_f(th, w).unwrap_or(f64::NAN);
            cov.push(row![th, w, oracle.covariance_f(th, w), corr, corr / (th / w).sqrt()]);
        }
    }
    let report = json!({
        "m2": oracle.m2(),
        "t0": oracle.t0(),
        "variance_slope": oracle.variance_slope(),
    });
    Ok(Output {
        tables: vec![("main".into(), sigma), ("cov".into(), cov)],
        report,
        checks: json!({}),
    })
}

fn simulate(c: &ExperimentConfig, setup: &Setup) -> Result<Output, CliError> {
    let theta_max = c.f64("theta_max")?;
    let grid = ThetaGrid::geometric(1.0, theta_max, c.usize("per_decade")?)?;
    let window = SpaceTimeWindow::covering(setup.t0, -theta_max, theta_max)?;
    let key = setup.key(0, Purpose::Noise);
    let config = sample_prm(&setup.model, &window, key);
    let field = solve_fast(&config).field();

    let mut pieces = Table::new(&["x", "u_at", "u_right"]);
    for ((x, at), right) in field
        .breakpoints()
        .iter()
        .zip(field.point_values())
        .zip(field.piece_values().skip(1))
    {
        pieces.push(row![*x, at, right]);
    }

    let oracle = MomentOracle::for_model(&setup.model, setup.t0)?;
    let raw = integral_series(&field, &grid)?;
    let standardized = if oracle.m2() > 0.0 {
        standardize(raw.clone(), &oracle)?.standardized
    } else {
        None
    };
    let mut series = Table::new(&["seed", "theta", "F", "F_std"]);
    for (i, (&th, &f)) in raw.thetas.iter().zip(&raw.values).enumerate() {
        let fs = standardized.as_ref().map_or(f64::NAN, |s| s[i]);
        series.push(row![setup.seed, th, f, fs]);
    }
    let report = json!({
        "atoms": config.len(),
        "breakpoints": field.breakpoints().len(),
        "ergodic_mean": 1.0 + raw.values.last().copied().unwrap_or(0.0) / (2.0 * grid.max()),
    });
    Ok(Output {
        tables: vec![("main".into(), pieces), ("series".into(), series)],
        report,
        checks: json!({}),
    })
}

fn clt(c: &ExperimentConfig, setup: Setup, calibration: bool) -> Result<Output, CliError> {
    let config = CltConfig {
        setup,
        thetas: c.list("theta")?,
        reps: c.usize("reps")?,
        calibration,
    };
    let report = clt_experiment(&config)?;
    let checks = json!({
        "decreasing": report.decreasing,
        "fit_defined": report.fit.is_some(),
        "negative_slope": report.fit.is_some_and(|f| f.slope < 0.0),
    });
    Ok(Output {
        tables: vec![("main".into(), report.table())],
        report: to_value(&report),
        checks,
    })
}

fn asclt(c: &ExperimentConfig, setup: Setup) -> Result<Output, CliError> {
    let mut config = AscltConfig::new(setup, c.f64("theta_max")?, c.usize("reps")?);
    config.per_decade = c.usize("per_decade")?;
    config.mode = match c.get("mode") {
        Some("model") => AscltMode::Model,
        Some("iid") => AscltMode::IidSums,
        other => return Err(CliError::Config(format!("mode must be model or iid, got {other:?}"))),
    };
    let report = asclt_experiment(&config)?;
    let n = report.curves.len();
    let checks = json!({
        "decreased": report.decreased,
        "trajectories": n,
        "decreased_all_but_one": report.decreased + 1 >= n,
        "median_late_below_0.15": report.median_late < 0.15,
    });
    Ok(Output {
        tables: vec![("main".into(), report.table())],
        report: to_value(&report),
        checks,
    })
}

fn il(c: &ExperimentConfig, setup: Setup) -> Result<Output, CliError> {
    let mut config = IlConfig::new(setup, c.usize("reps")?);
    config.per_decade = c.usize("per_decade")?;
    config.zero_field = c.bool("zero_field")?;
    let report = il_criterion_scan(&config)?;
    let checks = json!({ "nonincreasing_within_4se": report.nonincreasing_within(4.0) });
    Ok(Output {
        tables: vec![("main".into(), report.table())],
        report: to_value(&report),
        checks,
    })
}

fn cov_decay(c: &ExperimentConfig, setup: Setup) -> Result<Output, CliError> {
    let thetas = c.list("theta")?;
    let [theta] = thetas[..] else {
        return Err(CliError::Config(format!("cov-decay takes a single theta, got {thetas:?}")));
    };
    let config = CovDecayConfig {
        setup,
        theta,
        ws: c.list("ws")?,
        reps: c.usize("reps")?,
    };
    let report = covariance_decay_experiment(&config)?;
    let checks = json!({ "slope_within_0.1_of_-0.5": (report.fit.slope + 0.5).abs() <= 0.1 });
    Ok(Output {
        tables: vec![("main".into(), report.table())],
        report: to_value(&report),
        checks,
    })
}

fn lemma1(c: &ExperimentConfig, setup: Setup) -> Result<Output, CliError> {
    let f = test_function(c.get("f").unwrap_or("cos"))?;
    let mut config = Lemma1Config::new(setup, c.f64("theta_max")?, c.usize("reps")?, f);
    config.per_decade = c.usize("per_decade")?;
    let report = lemma1_demo(&config)?;
    let checks = json!({ "decreased": report.decreased, "trajectories": report.curves.len() });
    Ok(Output {
        tables: vec![("main".into(), report.table())],
        report: to_value(&report),
        checks,
    })
}

fn poincare(c: &ExperimentConfig, setup: Setup) -> Result<Output, CliError> {
    let mut config = PoincareConfig::new(setup, c.usize("reps")?);
    config.perturbations = c.usize("perturbations")?;
    let report = poincare_gamma_check(&config)?;
    let target = -(report.q - 1.0) / 2.0;
    let checks = json!({
        "poincare_holds": report.poincare.iter().all(|r| r.holds),
        "gamma3_slope_within_0.15": report.gamma3_fit.is_some_and(|f| (f.slope - target).abs() <= 0.15),
    });
    Ok(Output {
        tables: vec![("main".into(), report.table())],
        report: to_value(&report),
        checks,
    })
}
