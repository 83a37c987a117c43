use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::Setup;
use crate::error::{LabError, Result};
use crate::fields::{simulate_series, ThetaGrid};
use crate::metrics::{distances, Distances, WeightedEmpiricalMeasure};
use crate::output::Table;
use crate::parallel::replicate;
use crate::rng::Purpose;
use crate::row;
use crate::stats::{log_log_fit, LinearFit};

pub const MIN_CLT_REPS: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CltConfig {
    pub setup: Setup,
    pub thetas: Vec<f64>,
    pub reps: usize,
    /// Replace `F̃_θ` by exact Gaussian draws to expose the sampling floor.
    pub calibration: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CltRow {
    pub theta: f64,
    pub distances: Distances,
    pub reps: usize,
    /// `2/√R`; distances at or below it are treated as saturated.
    pub floor: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CltReport {
    pub rows: Vec<CltRow>,
    /// Log-log fit of `d_Kol` against θ over non-saturated points, when
    /// there are at least two.
    pub fit: Option<LinearFit>,
    /// Whether `d_Kol` strictly decreases across the non-saturated points.
    pub decreasing: bool,
}

impl CltReport {
    pub fn table(&self) -> Table {
        let mut t = Table::new(&["theta", "d_kol", "d_w1", "d_fm", "R", "floor"]);
        for r in &self.rows {
            let d = r.distances;
            t.push(row![r.theta, d.kolmogorov, d.wasserstein1, d.fortet_mourier, r.reps, r.floor]);
        }
        t
    }
}

/// Distances of the empirical law of `F̃_θ` from `γ` over `R` independent
/// trajectories. One trajectory serves every θ.
pub fn clt_experiment(config: &CltConfig) -> Result<CltReport> {
    if config.reps < MIN_CLT_REPS {
        return Err(LabError::Domain(format!(
            "the CLT experiment needs R >= {MIN_CLT_REPS}, got {}",
            config.reps
        )));
    }
    let grid = ThetaGrid::new(config.thetas.clone())?;
    if grid.thetas()[0] <= 0.0 {
        return Err(LabError::Domain("θ must be > 0".into()));
    }
    let setup = &config.setup;
    let samples: Vec<Vec<f64>> = if config.calibration {
        replicate(config.reps, setup.threads, |r| {
            let mut rng = setup.key(r, Purpose::Calibration).rng();
            Ok((0..grid.len()).map(|_| rng.sample(StandardNormal)).collect())
        })?
    } else {
        setup.nondegenerate_oracle()?;
        replicate(config.reps, setup.threads, |r| {
            let series = simulate_series(&setup.model, setup.t0, &grid, setup.key(r, Purpose::Noise))?;
            Ok(series.standardized_values()?.to_vec())
        })?
    };
    let floor = 2.0 / (config.reps as f64).sqrt();
    let mut rows = Vec::with_capacity(grid.len());
    for (k, &theta) in grid.thetas().iter().enumerate() {
        let column: Vec<f64> = samples.iter().map(|s| s[k]).collect();
        let mu = WeightedEmpiricalMeasure::equal_weights(&column)?;
        rows.push(CltRow {
            theta,
            distances: distances(&mu),
            reps: config.reps,
            floor,
        });
    }
    let live: Vec<&CltRow> = rows.iter().filter(|r| r.distances.kolmogorov > floor).collect();
    let decreasing = live
        .windows(2)
        .all(|w| w[1].distances.kolmogorov < w[0].distances.kolmogorov);
    let fit = (live.len() >= 2).then(|| {
        let xs: Vec<f64> = live.iter().map(|r| r.theta).collect();
        let ys: Vec<f64> = live.iter().map(|r| r.distances.kolmogorov).collect();
        log_log_fit(&xs, &ys)
    });
    Ok(CltReport {
        rows,
        fit,
        decreasing,
    })
}
