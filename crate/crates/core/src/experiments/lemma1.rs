use serde::Serialize;

use super::log_average::log_mean;
use super::Setup;
use crate::error::{LabError, Result};
use crate::fields::{simulate_series, ThetaGrid};
use crate::output::Table;
use crate::parallel::replicate;
use crate::rng::Purpose;
use crate::row;

/// Bounded Lipschitz test functions `f` in `H_θ = f(F̃_θ) - E f(F̃_θ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum TestFunction {
    /// `x` clipped to `[-bound, bound]`.
    ClippedIdentity { bound: f64 },
    Cosine,
}

impl TestFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            TestFunction::ClippedIdentity { bound } => x.clamp(-bound, bound),
            TestFunction::Cosine => x.cos(),
        }
    }

    /// `∫ f dγ`, standing in for `E f(F̃_θ)`.
    pub fn gaussian_mean(&self) -> f64 {
        match *self {
            TestFunction::ClippedIdentity { .. } => 0.0,
            TestFunction::Cosine => (-0.5f64).exp(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Lemma1Point {
    pub t: f64,
    pub l_t: f64,
    /// `(1/log T) ∫_1^T θ^{-a} dθ/θ` with `a = α/(1+α)`: the log-average
    /// of the CLT rate, which bounds the bias of replacing `E f(F̃_θ)` by
    /// `∫ f dγ` up to a constant.
    pub bias_scale: f64,
}

/// `L_T = (1/log T) ∫_1^T H_θ dθ/θ` at each checkpoint.
pub fn lemma1_curve(
    thetas: &[f64],
    h: &[f64],
    checkpoints: &[f64],
    alpha: f64,
) -> Result<Vec<Lemma1Point>> {
    let a = alpha / (1.0 + alpha);
    checkpoints
        .iter()
        .map(|&t| {
            Ok(Lemma1Point {
                t,
                l_t: log_mean(thetas, h, t)?,
                bias_scale: (1.0 - t.powf(-a)) / (a * t.ln()),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma1Config {
    pub setup: Setup,
    pub theta_max: f64,
    pub per_decade: usize,
    pub trajectories: usize,
    pub f: TestFunction,
    pub checkpoints: Vec<f64>,
    pub compare: (f64, f64),
}

impl Lemma1Config {
    pub fn new(setup: Setup, theta_max: f64, trajectories: usize, f: TestFunction) -> Self {
        Self {
            setup,
            theta_max,
            per_decade: 64,
            trajectories,
            f,
            checkpoints: super::default_checkpoints(theta_max),
            compare: (20.0f64.min(theta_max), theta_max),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma1Report {
    pub curves: Vec<Vec<Lemma1Point>>,
    pub early: Vec<f64>,
    pub late: Vec<f64>,
    /// Trajectories with `|L_late| < |L_early|`.
    pub decreased: usize,
}

impl Lemma1Report {
    pub fn table(&self) -> Table {
        let mut t = Table::new(&["trajectory", "T", "L_T", "bias_scale"]);
        for (r, c) in self.curves.iter().enumerate() {
            for p in c {
                t.push(row![r, p.t, p.l_t, p.bias_scale]);
            }
        }
        t
    }
}

pub fn lemma1_demo(config: &Lemma1Config) -> Result<Lemma1Report> {
    let setup = &config.setup;
    setup.nondegenerate_oracle()?;
    let (early, late) = config.compare;
    let mut checkpoints = config.checkpoints.clone();
    checkpoints.extend([early, late]);
    checkpoints.sort_by(f64::total_cmp);
    checkpoints.dedup();
    if checkpoints.iter().any(|&t| !(t > 1.0 && t <= config.theta_max)) {
        return Err(LabError::Domain(format!(
            "checkpoints must lie in (1, {}]",
            config.theta_max
        )));
    }
    let grid = ThetaGrid::geometric(1.0, config.theta_max, config.per_decade)?;
    let centre = config.f.gaussian_mean();
    let curves = replicate(config.trajectories, setup.threads, |r| {
        let series = simulate_series(&setup.model, setup.t0, &grid, setup.key(r, Purpose::Noise))?;
        let h: Vec<f64> = series
            .standardized_values()?
            .iter()
            .map(|&x| config.f.eval(x) - centre)
            .collect();
        lemma1_curve(grid.thetas(), &h, &checkpoints, setup.model.alpha())
    })?;
    let at = |c: &Vec<Lemma1Point>, t: f64| c.iter().find(|p| p.t == t).unwrap().l_t;
    let early_v: Vec<f64> = curves.iter().map(|c| at(c, early)).collect();
    let late_v: Vec<f64> = curves.iter().map(|c| at(c, late)).collect();
    let decreased = early_v
        .iter()
        .zip(&late_v)
        .filter(|(e, l)| l.abs() < e.abs())
        .count();
    Ok(Lemma1Report {
        curves,
        early: early_v,
        late: late_v,
        decreased,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_integrands() {
        let g = ThetaGrid::geometric(1.0, 2000.0, 64).unwrap();
        let cps = [20.0, 2000.0];
        let zero = lemma1_curve(g.thetas(), &vec![0.0; g.len()], &cps, 1.0).unwrap();
        assert!(zero.iter().all(|p| p.l_t == 0.0));
        let one = lemma1_curve(g.thetas(), &vec![1.0; g.len()], &cps, 1.0).unwrap();
        assert!(one.iter().all(|p| (p.l_t - 1.0).abs() < 1e-14));
    }

    #[test]
    fn bias_scale_is_log_average_of_rate() {
        let g = ThetaGrid::geometric(1.0, 500.0, 256).unwrap();
        let h: Vec<f64> = g.thetas().iter().map(|t| t.powf(-0.5)).collect();
        let c = lemma1_curve(g.thetas(), &h, &[500.0], 1.0).unwrap();
        assert!((c[0].l_t - c[0].bias_scale).abs() < 1e-4);
    }

    #[test]
    fn gaussian_means() {
        assert_eq!(TestFunction::Cosine.gaussian_mean(), (-0.5f64).exp());
        assert_eq!(TestFunction::ClippedIdentity { bound: 2.0 }.eval(5.0), 2.0);
    }
}
