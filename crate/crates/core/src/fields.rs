//! Spatial integrals `F_θ = ∫_{-θ}^{θ} (u(t0, x) - 1) dx` along one
//! trajectory, their standardization, and ergodic averages.

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::levy::{sample_prm, LevyModel, SpaceTimeWindow};
use crate::oracle::MomentOracle;
use crate::rng::StreamKey;
use crate::solver::{solve_fast, PiecewiseField};

/// Ascending grid of half-widths.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaGrid {
    thetas: Vec<f64>,
}

impl ThetaGrid {
    pub fn new(mut thetas: Vec<f64>) -> Result<Self> {
        if thetas.is_empty() {
            return Err(LabError::Domain("θ grid is empty".into()));
        }
        if thetas.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(LabError::Domain("θ grid values must be finite and >= 0".into()));
        }
        thetas.sort_by(f64::total_cmp);
        thetas.dedup();
        Ok(Self { thetas })
    }

    /// `θ_k = start · 10^{k / per_decade}` up to `stop`, with `stop` itself
    /// appended when it falls between grid points.
    pub fn geometric(start: f64, stop: f64, per_decade: usize) -> Result<Self> {
        if !(start > 0.0 && stop >= start && per_decade > 0) {
            return Err(LabError::Domain(format!(
                "geometric grid needs 0 < start <= stop and per_decade > 0, got {start}, {stop}, {per_decade}"
            )));
        }
        let mut thetas = Vec::new();
        let mut k = 0;
        loop {
            let t = start * 10f64.powf(k as f64 / per_decade as f64);
            if t > stop * (1.0 + 1e-12) {
                break;
            }
            thetas.push(t.min(stop));
            k += 1;
        }
        if *thetas.last().unwrap() < stop {
            thetas.push(stop);
        }
        Self::new(thetas)
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn max(&self) -> f64 {
        *self.thetas.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }
}

/// `F_θ` on a grid, optionally standardized.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpatialIntegralSeries {
    pub thetas: Vec<f64>,
    pub values: Vec<f64>,
    pub standardized: Option<Vec<f64>>,
    pub key: Option<StreamKey>,
}

impl SpatialIntegralSeries {
    /// `F̃_θ`, or an error when the series was never standardized.
    pub fn standardized_values(&self) -> Result<&[f64]> {
        self.standardized
            .as_deref()
            .ok_or_else(|| LabError::Domain("series has not been standardized".into()))
    }
}

pub fn spatial_integral(field: &PiecewiseField, theta: f64) -> Result<f64> {
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(LabError::Domain(format!("θ must be finite and >= 0, got {theta}")));
    }
    if theta == 0.0 {
        field.window().ensure_covers(0.0, 0.0)?;
        return Ok(0.0);
    }
    field.integral(-theta, theta)
}

pub fn integral_series(field: &PiecewiseField, grid: &ThetaGrid) -> Result<SpatialIntegralSeries> {
    field.window().ensure_covers(-grid.max(), grid.max())?;
    let values = grid
        .thetas()
        .iter()
        .map(|&t| spatial_integral(field, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpatialIntegralSeries {
        thetas: grid.thetas().to_vec(),
        values,
        standardized: None,
        key: None,
    })
}

/// `F̃_θ = F_θ / σ_θ` with the analytic `σ_θ`.
pub fn standardize(
    mut series: SpatialIntegralSeries,
    oracle: &MomentOracle,
) -> Result<SpatialIntegralSeries> {
    let mut out = Vec::with_capacity(series.values.len());
    for (&t, &f) in series.thetas.iter().zip(&series.values) {
        let sigma = oracle.sigma(t);
        if !(sigma > 0.0) {
            return Err(LabError::Degenerate(format!(
                "σ_θ = 0 at θ = {t}; the standardized integral is undefined"
            )));
        }
        out.push(f / sigma);
    }
    series.standardized = Some(out);
    Ok(series)
}

/// `(1/2θ) ∫_{-θ}^{θ} u(t0, x) dx = 1 + F_θ / (2θ)`.
pub fn ergodic_mean(field: &PiecewiseField, theta: f64) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(LabError::Domain(format!("θ must be > 0, got {theta}")));
    }
    Ok(1.0 + spatial_integral(field, theta)? / (2.0 * theta))
}

/// Samples one trajectory on the smallest window covering `[-θ_max, θ_max]`
/// and returns its standardized series.
pub fn simulate_series(
    model: &LevyModel,
    t0: f64,
    grid: &ThetaGrid,
    key: StreamKey,
) -> Result<SpatialIntegralSeries> {
    let oracle = MomentOracle::for_model(model, t0)?;
    let window = SpaceTimeWindow::covering(t0, -grid.max(), grid.max())?;
    let field = solve_fast(&sample_prm(model, &window, key)).field();
    let mut series = standardize(integral_series(&field, grid)?, &oracle)?;
    series.key = Some(key);
    Ok(series)
}
