use serde::Serialize;

use super::Setup;
use crate::error::Result;
use crate::levy::{sample_atoms, sample_prm, SpaceTimeWindow};
use crate::oracle::{gamma_bound_quadrature, GammaMajorants};
use crate::output::Table;
use crate::parallel::replicate;
use crate::rng::Purpose;
use crate::row;
use crate::solver::{add_one_costs, solve_fast, Functional};
use crate::stats::{log_log_fit, mean, standard_error, LinearFit};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoincareConfig {
    pub setup: Setup,
    /// θ values for the first-order Poincaré check.
    pub variance_thetas: Vec<f64>,
    /// θ values for the `γ₃` Monte Carlo fit.
    pub gamma_thetas: Vec<f64>,
    /// `(θ, w)` pairs for the assembled bound on `(F̃_θ - F̃_w)/√2`.
    pub pairs: Vec<(f64, f64)>,
    pub reps: usize,
    /// Importance samples `ξ` per replication.
    pub perturbations: usize,
}

impl PoincareConfig {
    pub fn new(setup: Setup, reps: usize) -> Self {
        Self {
            setup,
            variance_thetas: vec![1.0, 5.0],
            gamma_thetas: vec![4.0, 8.0, 16.0, 32.0, 64.0],
            pairs: vec![(4.0, 16.0), (4.0, 64.0), (16.0, 64.0), (16.0, 256.0), (64.0, 256.0)],
            reps,
            perturbations: 16,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PoincareRow {
    pub theta: f64,
    /// Analytic `Var(F_θ)`.
    pub variance: f64,
    /// Monte Carlo `∫ E[(D_ξ F_θ)²] m(dξ)`.
    pub energy: f64,
    pub energy_se: f64,
    /// `variance <= energy + 4 SE`.
    pub holds: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Gamma3Row {
    pub theta: f64,
    /// Monte Carlo `2 ∫ E|D_ξ F̃_θ|^{q+1} m(dξ)`.
    pub gamma3: f64,
    pub gamma3_se: f64,
    /// Deterministic majorant with constants dropped.
    pub bound: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StructureRow {
    pub theta: f64,
    pub w: f64,
    /// `|Cov(F̃_θ, F̃_w)| = |1 - V_{θ,w}|`.
    pub covariance: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub total: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoincareReport {
    pub q: f64,
    pub poincare: Vec<PoincareRow>,
    pub gamma3: Vec<Gamma3Row>,
    /// Log-log fit of the `γ₃` estimates against θ.
    pub gamma3_fit: Option<LinearFit>,
    pub structure: Vec<StructureRow>,
}

impl PoincareReport {
    pub fn table(&self) -> Table {
        let mut t = Table::new(&["part", "theta", "w", "value", "se", "reference"]);
        for r in &self.poincare {
            t.push(row!["poincare", r.theta, f64::NAN, r.energy, r.energy_se, r.variance]);
        }
        for r in &self.gamma3 {
            t.push(row!["gamma3", r.theta, f64::NAN, r.gamma3, r.gamma3_se, r.bound]);
        }
        for r in &self.structure {
            t.push(row!["cov", r.theta, r.w, r.covariance, f64::NAN, f64::NAN]);
            t.push(row!["gamma1", r.theta, r.w, r.gamma1, f64::NAN, f64::NAN]);
            t.push(row!["gamma2", r.theta, r.w, r.gamma2, f64::NAN, f64::NAN]);
            t.push(row!["gamma3_bound", r.theta, r.w, r.gamma3, f64::NAN, f64::NAN]);
            t.push(row!["total", r.theta, r.w, r.total, f64::NAN, f64::NAN]);
        }
        t
    }
}

/// Per replication: `(mean D², mean |D|^{q+1})` over the importance samples,
/// each times `λ · area`.
fn derivative_moments(setup: &Setup, theta: f64, q: f64, reps: usize, m: usize) -> Result<Vec<(f64, f64)>> {
    let window = SpaceTimeWindow::covering(setup.t0, -theta, theta)?;
    let weight = setup.model.total_mass() * window.area();
    let functional = Functional::SpatialIntegral { theta };
    replicate(reps, setup.threads, |r| {
        let config = sample_prm(&setup.model, &window, setup.key(r, Purpose::Noise));
        let solution = solve_fast(&config);
        let xis = sample_atoms(&setup.model, &window, m, setup.key(r, Purpose::Perturbation))?;
        let d = add_one_costs(&solution, &xis, functional)?;
        let sq = d.iter().map(|x| x * x).sum::<f64>() / m as f64;
        let pq = d.iter().map(|x| x.abs().powf(q + 1.0)).sum::<f64>() / m as f64;
        Ok((weight * sq, weight * pq))
    })
}

/// Poincaré inequality, `γ₃` decay and the assembled three-term bound.
pub fn poincare_gamma_check(config: &PoincareConfig) -> Result<PoincareReport> {
    let setup = &config.setup;
    let oracle = setup.oracle()?;
    let alpha = setup.model.alpha();
    let q = (1.0 + 2.0 * alpha).min(2.0);
    let m = config.perturbations.max(1);

    if setup.model.total_mass() <= 0.0 {
        // no noise: Var(F_θ) = 0 and every derivative vanishes
        let poincare = config
            .variance_thetas
            .iter()
            .map(|&theta| PoincareRow {
                theta,
                variance: 0.0,
                energy: 0.0,
                energy_se: 0.0,
                holds: true,
            })
            .collect();
        return Ok(PoincareReport {
            q,
            poincare,
            gamma3: Vec::new(),
            gamma3_fit: None,
            structure: Vec::new(),
        });
    }

    let mut poincare = Vec::new();
    for &theta in &config.variance_thetas {
        let moments = derivative_moments(setup, theta, q, config.reps, m)?;
        let sq: Vec<f64> = moments.iter().map(|x| x.0).collect();
        let (energy, energy_se) = (mean(&sq), standard_error(&sq));
        let variance = oracle.variance_f(theta);
        poincare.push(PoincareRow {
            theta,
            variance,
            energy,
            energy_se,
            holds: variance <= energy + 4.0 * energy_se,
        });
    }

    let majorants = GammaMajorants::new(&setup.model, setup.t0)?;
    let mut gamma3 = Vec::new();
    for &theta in &config.gamma_thetas {
        let moments = derivative_moments(setup, theta, q, config.reps, m)?;
        let scale = 2.0 / oracle.sigma(theta).powf(q + 1.0);
        let g: Vec<f64> = moments.iter().map(|x| scale * x.1).collect();
        gamma3.push(Gamma3Row {
            theta,
            gamma3: mean(&g),
            gamma3_se: standard_error(&g),
            bound: majorants.g3(theta),
        });
    }
    let gamma3_fit = (gamma3.len() >= 2).then(|| {
        let xs: Vec<f64> = gamma3.iter().map(|r| r.theta).collect();
        let ys: Vec<f64> = gamma3.iter().map(|r| r.gamma3).collect();
        log_log_fit(&xs, &ys)
    });

    let mut structure = Vec::new();
    for &(theta, w) in &config.pairs {
        let b = gamma_bound_quadrature(&setup.model, setup.t0, theta, w)?;
        let covariance = oracle.correlation_f(theta, w)?.abs();
        structure.push(StructureRow {
            theta,
            w,
            covariance,
            gamma1: b.gamma1,
            gamma2: b.gamma2,
            gamma3: b.gamma3,
            total: covariance + b.gamma1 + b.gamma2 + b.gamma3,
        });
    }

    Ok(PoincareReport {
        q,
        poincare,
        gamma3,
        gamma3_fit,
        structure,
    })
}
