use serde::Serialize;

use super::Setup;
use crate::error::{LabError, Result};
use crate::fields::{simulate_series, ThetaGrid};
use crate::output::Table;
use crate::parallel::replicate;
use crate::rng::Purpose;
use crate::row;
use crate::stats::{covariance, log_log_fit, LinearFit};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CovDecayConfig {
    pub setup: Setup,
    pub theta: f64,
    pub ws: Vec<f64>,
    /// Monte Carlo replications; zero skips the simulation path.
    pub reps: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CovDecayRow {
    pub w: f64,
    pub analytic: f64,
    pub monte_carlo: Option<f64>,
    pub monte_carlo_se: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CovDecayReport {
    pub theta: f64,
    pub rows: Vec<CovDecayRow>,
    /// `log Corr = b + slope · log w`.
    pub fit: LinearFit,
    /// `C` in `Corr ≈ C (θ/w)^{-slope}`.
    pub constant: f64,
}

impl CovDecayReport {
    pub fn table(&self) -> Table {
        let mut t = Table::new(&["theta", "w", "corr", "corr_mc", "corr_mc_se"]);
        for r in &self.rows {
            t.push(row![
                self.theta,
                r.w,
                r.analytic,
                r.monte_carlo.unwrap_or(f64::NAN),
                r.monte_carlo_se.unwrap_or(f64::NAN)
            ]);
        }
        t
    }
}

/// Decay of `Corr(F̃_θ, F̃_w)` in `w` at fixed θ.
pub fn covariance_decay_experiment(config: &CovDecayConfig) -> Result<CovDecayReport> {
    let setup = &config.setup;
    let oracle = setup.nondegenerate_oracle()?;
    if config.ws.len() < 2 {
        return Err(LabError::Domain("need at least two values of w".into()));
    }
    let theta = config.theta;
    let analytic: Vec<f64> = config
        .ws
        .iter()
        .map(|&w| oracle.correlation_f(theta, w))
        .collect::<Result<_>>()?;

    let mut mc = vec![None; config.ws.len()];
    if config.reps > 0 {
        let mut all = config.ws.clone();
        all.push(theta);
        let grid = ThetaGrid::new(all)?;
        let samples = replicate(config.reps, setup.threads, |r| {
            let s = simulate_series(&setup.model, setup.t0, &grid, setup.key(r, Purpose::Noise))?;
            Ok(s.standardized_values()?.to_vec())
        })?;
        let pos = |x: f64| grid.thetas().iter().position(|&t| t == x).unwrap();
        let base: Vec<f64> = samples.iter().map(|s| s[pos(theta)]).collect();
        for (k, &w) in config.ws.iter().enumerate() {
            let other: Vec<f64> = samples.iter().map(|s| s[pos(w)]).collect();
            mc[k] = Some(covariance(&base, &other));
        }
    }

    let fit = log_log_fit(&config.ws, &analytic);
    let rows = config
        .ws
        .iter()
        .zip(&analytic)
        .zip(&mc)
        .map(|((&w, &a), m)| CovDecayRow {
            w,
            analytic: a,
            monte_carlo: m.map(|x| x.0),
            monte_carlo_se: m.map(|x| x.1),
        })
        .collect();
    Ok(CovDecayReport {
        theta,
        rows,
        constant: fit.intercept.exp() * theta.powf(fit.slope),
        fit,
    })
}
