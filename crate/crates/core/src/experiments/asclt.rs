use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::log_average::log_average;
use super::{dyadic, Setup};
use crate::error::{LabError, Result};
use crate::fields::{simulate_series, ThetaGrid};
use crate::metrics::{distances, Distances, WeightedEmpiricalMeasure};
use crate::output::Table;
use crate::parallel::replicate;
use crate::rng::Purpose;
use crate::row;
use crate::stats::median;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AscltMode {
    /// `F̃_θ` of the model along one trajectory.
    Model,
    /// Classical sanity check: `S_k/√k` for i.i.d. standard normal steps
    /// with discrete weights `1/k`.
    IidSums,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AscltConfig {
    pub setup: Setup,
    pub theta_max: f64,
    pub per_decade: usize,
    pub trajectories: usize,
    /// Values of `T` at which `ν_T` is measured.
    pub checkpoints: Vec<f64>,
    /// The pair compared in the summary, `(early, late)`.
    pub compare: (f64, f64),
    pub mode: AscltMode,
}

/// Dyadic `T` up to `theta_max`, plus `20` and `theta_max` itself.
pub fn default_checkpoints(theta_max: f64) -> Vec<f64> {
    let mut c = dyadic(2.0, theta_max);
    c.push(20.0f64.min(theta_max));
    c.push(theta_max);
    c.sort_by(f64::total_cmp);
    c.dedup();
    c
}

impl AscltConfig {
    pub fn new(setup: Setup, theta_max: f64, trajectories: usize) -> Self {
        Self {
            setup,
            theta_max,
            per_decade: 64,
            trajectories,
            checkpoints: default_checkpoints(theta_max),
            compare: (20.0f64.min(theta_max), theta_max),
            mode: AscltMode::Model,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AscltCurve {
    pub trajectory: u64,
    pub t: Vec<f64>,
    pub distances: Vec<Distances>,
}

impl AscltCurve {
    fn kolmogorov_at(&self, t: f64) -> Option<f64> {
        self.t
            .iter()
            .position(|&x| x == t)
            .map(|i| self.distances[i].kolmogorov)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AscltReport {
    pub curves: Vec<AscltCurve>,
    pub early: f64,
    pub late: f64,
    pub kolmogorov_early: Vec<f64>,
    pub kolmogorov_late: Vec<f64>,
    /// Trajectories whose `d_Kol` at `late` is below the one at `early`.
    pub decreased: usize,
    pub median_late: f64,
}

impl AscltReport {
    pub fn table(&self) -> Table {
        let mut t = Table::new(&["trajectory", "T", "d_kol", "d_w1", "d_fm"]);
        for c in &self.curves {
            for (x, d) in c.t.iter().zip(&c.distances) {
                t.push(row![c.trajectory, *x, d.kolmogorov, d.wasserstein1, d.fortet_mourier]);
            }
        }
        t
    }
}

/// Per-trajectory `T ↦ (d_Kol, d_W1, d_FM)(ν_T, γ)`.
pub fn asclt_experiment(config: &AscltConfig) -> Result<AscltReport> {
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
    let setup = &config.setup;
    let curves = match config.mode {
        AscltMode::Model => {
            setup.nondegenerate_oracle()?;
            let grid = ThetaGrid::geometric(1.0, config.theta_max, config.per_decade)?;
            replicate(config.trajectories, setup.threads, |r| {
                let key = setup.key(r, Purpose::Noise);
                let series = simulate_series(&setup.model, setup.t0, &grid, key)?;
                let values = series.standardized_values()?;
                let distances = checkpoints
                    .iter()
                    .map(|&t| Ok(distances(&log_average(grid.thetas(), values, t)?)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(AscltCurve {
                    trajectory: r,
                    t: checkpoints.clone(),
                    distances,
                })
            })?
        }
        AscltMode::IidSums => {
            let n = config.theta_max.floor() as usize;
            replicate(config.trajectories, setup.threads, |r| {
                let mut rng = setup.key(r, Purpose::IidSums).rng();
                let mut s = 0.0;
                let values: Vec<f64> = (1..=n)
                    .map(|k| {
                        let step: f64 = rng.sample(StandardNormal);
                        s += step;
                        s / (k as f64).sqrt()
                    })
                    .collect();
                let distances = checkpoints
                    .iter()
                    .map(|&t| {
                        let m = t.floor() as usize;
                        let weights: Vec<f64> = (1..=m).map(|k| 1.0 / k as f64).collect();
                        let mu = WeightedEmpiricalMeasure::normalized(values[..m].to_vec(), weights)?;
                        Ok(distances(&mu))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(AscltCurve {
                    trajectory: r,
                    t: checkpoints.clone(),
                    distances,
                })
            })?
        }
    };
    let kolmogorov_early: Vec<f64> = curves.iter().map(|c| c.kolmogorov_at(early).unwrap()).collect();
    let kolmogorov_late: Vec<f64> = curves.iter().map(|c| c.kolmogorov_at(late).unwrap()).collect();
    let decreased = kolmogorov_early
        .iter()
        .zip(&kolmogorov_late)
        .filter(|(e, l)| l < e)
        .count();
    Ok(AscltReport {
        median_late: median(&kolmogorov_late),
        curves,
        early,
        late,
        kolmogorov_early,
        kolmogorov_late,
        decreased,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::LevyModel;

    #[test]
    fn checkpoints_include_comparison_points() {
        let c = default_checkpoints(2000.0);
        assert!(c.contains(&20.0) && c.contains(&2000.0) && c.contains(&1024.0));
        assert!(c.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn degenerate_noise_is_reported() {
        let model = LevyModel::two_point(1.0, 0.0, 1.0).unwrap();
        let cfg = AscltConfig::new(Setup::new(model, 1.0, 1), 50.0, 1);
        assert!(matches!(asclt_experiment(&cfg), Err(LabError::Degenerate(_))));
    }

    #[test]
    fn small_run_shapes_and_thread_independence() {
        let model = LevyModel::two_point(1.0, 5.0, 1.0).unwrap();
        let mut cfg = AscltConfig::new(Setup::new(model, 1.0, 3).with_threads(1), 64.0, 3);
        let a = asclt_experiment(&cfg).unwrap();
        cfg.setup.threads = Some(3);
        let b = asclt_experiment(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.curves.len(), 3);
        for c in &a.curves {
            for d in &c.distances {
                assert!(d.kolmogorov <= 1.0 && d.fortet_mourier <= d.wasserstein1 + 1e-12);
            }
        }
    }

    #[test]
    fn iid_mode_runs() {
        let model = LevyModel::two_point(1.0, 5.0, 1.0).unwrap();
        let mut cfg = AscltConfig::new(Setup::new(model, 1.0, 3), 200.0, 2);
        cfg.mode = AscltMode::IidSums;
        let r = asclt_experiment(&cfg).unwrap();
        assert_eq!(r.kolmogorov_late.len(), 2);
    }
}
