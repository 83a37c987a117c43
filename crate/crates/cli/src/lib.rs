//! Command-line driver for the laboratory.
//!
//! Every subcommand reads an optional `key = value` config file, applies
//! flag overrides and per-experiment defaults, validates the model, runs,
//! and writes CSV tables plus a JSON summary. Each CSV starts with
//! `# key=value` lines carrying the version, seed, config hash and the full
//! effective config, so stripping the `# config.` prefix from those lines
//! gives a config file that reproduces the run.

pub mod config;
mod commands;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use hamlab::output::Table;
use hamlab::LabError;
use serde_json::json;

pub use commands::Output;
pub use config::ExperimentConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_COVERAGE: i32 = 4;
pub const EXIT_DOMAIN: i32 = 5;
pub const EXIT_IO: i32 = 6;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Lab(#[from] LabError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io(_) => EXIT_IO,
            CliError::Lab(e) => match e {
                LabError::InvalidModel(_) | LabError::NonCentered { .. } => EXIT_CONFIG,
                LabError::Coverage { .. } => EXIT_COVERAGE,
                LabError::Domain(_) | LabError::Degenerate(_) => EXIT_DOMAIN,
                LabError::Io(_) => EXIT_IO,
            },
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Config(_) => "invalid_config",
            CliError::Io(_) => "io",
            CliError::Lab(e) => match e {
                LabError::InvalidModel(_) => "invalid_model",
                LabError::NonCentered { .. } => "noncentered_model",
                LabError::Coverage { .. } => "coverage",
                LabError::Domain(_) => "domain",
                LabError::Degenerate(_) => "degenerate",
                LabError::Io(_) => "io",
            },
        }
    }

    /// One-line JSON record written to stderr on failure.
    pub fn record(&self) -> String {
        json!({
            "error": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        })
        .to_string()
    }
}

const MODEL_HELP: &str = "Models: two_point:size=1,mass=5 | uniform:half_width=1,mass=3 | atoms:1@0.5,-1@0.5 (size@mass). \
Config files hold one `key = value` per line; keys: model, alpha, t0, seed, reps, theta, theta_max, per_decade, ws, f, mode, perturbations, zero_field. Flags override the file.";

#[derive(Debug, Parser)]
#[command(name = "hamlab", version, about = "Monte Carlo laboratory for the hyperbolic Anderson model with Lévy noise", after_help = MODEL_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analytic variance and covariance of the spatial integral.
    #[command(after_help = "CSV: theta,sigma2,sigma2_over_theta\n\
Companion <out>.cov.csv: theta,w,cov,corr,bound_ratio (bound_ratio = corr / sqrt(theta/w))\n\
Config: theta (list), ws (list)")]
    Oracle(Flags),
    /// One trajectory: breakpoints of u(t0, .) and its spatial integrals.
    #[command(after_help = "CSV: x,u_at,u_right (value at the breakpoint and on the piece to its right)\n\
Companion <out>.series.csv: seed,theta,F,F_std\n\
Config: theta_max, per_decade")]
    Simulate(Flags),
    /// Distances of the law of the standardized integral from N(0,1).
    #[command(after_help = "CSV: theta,d_kol,d_w1,d_fm,R,floor\nConfig: theta (list), reps")]
    Clt(Flags),
    /// Same as clt with exact Gaussian samples, exposing the sampling floor.
    #[command(after_help = "CSV: theta,d_kol,d_w1,d_fm,R,floor\nConfig: theta (list), reps")]
    Calibrate(Flags),
    /// Log-averaged empirical measures along single trajectories.
    #[command(after_help = "CSV: trajectory,T,d_kol,d_w1,d_fm\n\
Config: theta_max, reps (trajectories), per_decade, mode (model | iid)")]
    Asclt(Flags),
    /// Replication-averaged |K_t(s)|^2 over dyadic t.
    #[command(after_help = "CSV: t,sup_mean_abs_k_sq,se,s_at_sup,partial_integral\n\
Config: reps, per_decade, zero_field")]
    Il(Flags),
    /// Decay of Corr(F_theta, F_w) in w.
    #[command(name = "cov-decay", after_help = "CSV: theta,w,corr,corr_mc,corr_mc_se\n\
Config: theta (single value), ws (list), reps (0 skips Monte Carlo)")]
    CovDecay(Flags),
    /// Log-averaged centred test functions along single trajectories.
    #[command(after_help = "CSV: trajectory,T,L_T,bias_scale\n\
Config: theta_max, reps (trajectories), per_decade, f (cos | clip:M)")]
    Lemma1(Flags),
    /// Poincaré inequality, gamma_3 decay and the assembled bound.
    #[command(after_help = "CSV: part,theta,w,value,se,reference\n\
Config: reps, perturbations")]
    Poincare(Flags),
}

#[derive(Debug, Clone, Default, Args)]
struct Flags {
    /// Config file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Replications (trajectories for asclt and lemma1).
    #[arg(long)]
    reps: Option<u64>,
    /// Comma-separated list of θ.
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    theta_max: Option<f64>,
    #[arg(long)]
    t0: Option<f64>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Output CSV path; companions and the JSON summary go next to it.
    /// Without it tables go to stdout and the summary to stderr.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads. Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

impl Flags {
    fn config(&self) -> Result<ExperimentConfig, CliError> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(v) = self.seed {
            c.set("seed", v);
        }
        if let Some(v) = self.reps {
            c.set("reps", v);
        }
        if let Some(v) = &self.theta {
            c.set("theta", v);
        }
        if let Some(v) = self.theta_max {
            c.set("theta_max", v);
        }
        if let Some(v) = self.t0 {
            c.set("t0", v);
        }
        if let Some(v) = &self.model {
            c.set("model", v);
        }
        if let Some(v) = self.alpha {
            c.set("alpha", v);
        }
        c.set_default("model", "two_point:size=1,mass=5");
        c.set_default("alpha", 1);
        c.set_default("t0", 1);
        c.set_default("seed", 1);
        Ok(c)
    }
}

/// Parses `argv` (including the program name), runs, and returns the exit
/// code. Output goes to the process's stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    run_with(argv, &mut out, &mut err)
}

/// [`run`] with explicit streams.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let err = CliError::Usage(e.render().to_string().trim_end().to_string());
                    let _ = writeln!(stderr, "{}", err.record());
                    err.exit_code()
                }
            };
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "{}", e.record());
            e.exit_code()
        }
    }
}

fn execute(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let (name, flags) = match &command {
        Command::Oracle(f) => ("oracle", f),
        Command::Simulate(f) => ("simulate", f),
        Command::Clt(f) => ("clt", f),
        Command::Calibrate(f) => ("calibrate", f),
        Command::Asclt(f) => ("asclt", f),
        Command::Il(f) => ("il", f),
        Command::CovDecay(f) => ("cov-decay", f),
        Command::Lemma1(f) => ("lemma1", f),
        Command::Poincare(f) => ("poincare", f),
    };
    if flags.threads == Some(0) {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let mut config = flags.config()?;
    commands::apply_defaults(name, &mut config);
    let output = commands::dispatch(name, &config, flags.threads)?;
    write_output(name, &config, &output, flags.out.as_deref(), stdout, stderr)
}

fn metadata(name: &str, config: &ExperimentConfig) -> Vec<(String, String)> {
    let mut meta = vec![
        ("experiment".to_string(), name.to_string()),
        ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("seed".to_string(), config.get("seed").unwrap_or("").to_string()),
        ("config_hash".to_string(), config.hash()),
    ];
    for (k, v) in config.canonical() {
        meta.push((format!("config.{k}"), v));
    }
    meta
}

fn companion(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) if suffix != "summary.json" => format!("{stem}.{suffix}.{}", ext.to_string_lossy()),
        _ => format!("{stem}.{suffix}"),
    };
    path.with_file_name(name)
}

fn write_output(
    name: &str,
    config: &ExperimentConfig,
    output: &Output,
    out: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let meta = metadata(name, config);
    let meta_refs: Vec<(&str, String)> = meta.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
    let csv = |t: &Table| t.to_csv(&meta_refs);
    let mut summary = json!({
        "experiment": name,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": config.get("seed"),
        "config_hash": config.hash(),
        "config": config.canonical().into_iter().collect::<std::collections::BTreeMap<_, _>>(),
        "checks": output.checks,
        "report": output.report,
    });
    let io = |p: &Path, e: std::io::Error| CliError::Io(format!("cannot write {}: {e}", p.display()));
    match out {
        Some(path) => {
            let (_, main) = &output.tables[0];
            std::fs::write(path, csv(main)).map_err(|e| io(path, e))?;
            let mut files = vec![path.display().to_string()];
            for (suffix, table) in &output.tables[1..] {
                let p = companion(path, suffix);
                std::fs::write(&p, csv(table)).map_err(|e| io(&p, e))?;
                files.push(p.display().to_string());
            }
            summary["files"] = json!(files);
            let p = companion(path, "summary.json");
            let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
            std::fs::write(&p, text + "\n").map_err(|e| io(&p, e))?;
        }
        None => {
            let w = |e: std::io::Error| CliError::Io(format!("cannot write to stdout: {e}"));
            for (i, (_, table)) in output.tables.iter().enumerate() {
                if i > 0 {
                    writeln!(stdout).map_err(w)?;
                }
                write!(stdout, "{}", csv(table)).map_err(w)?;
            }
            writeln!(stderr, "{summary}").map_err(w)?;
        }
    }
    Ok(())
}
