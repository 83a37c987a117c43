use num_complex::Complex64;
use serde::Serialize;

use super::log_average::log_cells;
use super::{dyadic, Setup};
use crate::error::{LabError, Result};
use crate::fields::{simulate_series, ThetaGrid};
use crate::output::Table;
use crate::parallel::replicate;
use crate::rng::Purpose;
use crate::row;
use crate::stats::{mean, standard_error};

pub const MIN_IL_REPS: usize = 100;

/// `K_t(s) = (1/log t) ∫_1^t (e^{i s F_θ} - e^{-s²/2}) dθ/θ` by the
/// log-midpoint rule on the series grid.
pub fn il_statistic(thetas: &[f64], values: &[f64], t: f64, s: f64) -> Result<Complex64> {
    if !(t > 1.0) {
        return Err(LabError::Domain(format!("t must exceed 1, got {t}")));
    }
    if thetas.len() != values.len() {
        return Err(LabError::Domain("grid and values differ in length".into()));
    }
    let cells = log_cells(thetas, 1.0, t)?;
    let gauss = (-0.5 * s * s).exp();
    let mut k = Complex64::new(0.0, 0.0);
    for (&w, &f) in cells.iter().zip(values) {
        if w > 0.0 {
            k += w * (Complex64::from_polar(1.0, s * f) - gauss);
        }
    }
    let k = k / t.ln();
    assert!(k.norm() <= 2.0 + 1e-12, "|K_t(s)| = {} exceeds 2", k.norm());
    Ok(k)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IlConfig {
    pub setup: Setup,
    pub reps: usize,
    pub t_grid: Vec<f64>,
    pub s_grid: Vec<f64>,
    pub per_decade: usize,
    /// Replace the series by `F ≡ 0`.
    pub zero_field: bool,
}

impl IlConfig {
    /// Dyadic `t ∈ {4, …, 1024}` and `s ∈ [-3, 3]` in steps of `0.25`.
    pub fn new(setup: Setup, reps: usize) -> Self {
        Self {
            setup,
            reps,
            t_grid: dyadic(4.0, 1024.0),
            s_grid: (-12..=12).map(|k| 0.25 * k as f64).collect(),
            per_decade: 64,
            zero_field: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IlRow {
    pub t: f64,
    /// `sup_s` of the replication mean of `|K_t(s)|²`.
    pub sup_mean_sq: f64,
    /// Standard error of that mean at the maximizing `s`.
    pub se: f64,
    pub s_at_sup: f64,
    /// Running `∫ sup_s E|K_t(s)|² / (t log t) dt` from the first grid
    /// point, trapezoid rule in `log t`.
    pub partial_integral: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IlReport {
    pub rows: Vec<IlRow>,
    pub s_grid: Vec<f64>,
    /// Replication means of `|K_t(s)|²`, indexed `[t][s]`.
    pub mean_sq: Vec<Vec<f64>>,
    pub mean_sq_se: Vec<Vec<f64>>,
}

impl IlReport {
    pub fn table(&self) -> Table {
        let mut t = Table::new(&["t", "sup_mean_abs_k_sq", "se", "s_at_sup", "partial_integral"]);
        for r in &self.rows {
            t.push(row![r.t, r.sup_mean_sq, r.se, r.s_at_sup, r.partial_integral]);
        }
        t
    }

    /// Whether the sup curve never rises by more than `k` combined standard
    /// errors between consecutive `t`.
    pub fn nonincreasing_within(&self, k: f64) -> bool {
        self.rows.windows(2).all(|w| {
            let tol = k * (w[0].se.powi(2) + w[1].se.powi(2)).sqrt();
            w[1].sup_mean_sq <= w[0].sup_mean_sq + tol
        })
    }
}

/// Replication-averaged `|K_t(s)|²` on a `(t, s)` grid.
pub fn il_criterion_scan(config: &IlConfig) -> Result<IlReport> {
    if config.reps < MIN_IL_REPS {
        return Err(LabError::Domain(format!(
            "the IL scan needs R >= {MIN_IL_REPS}, got {}",
            config.reps
        )));
    }
    let t_max = config
        .t_grid
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let grid = ThetaGrid::geometric(1.0, t_max, config.per_decade)?;
    let setup = &config.setup;
    if !config.zero_field {
        setup.nondegenerate_oracle()?;
    }
    // per replication: |K_t(s)|² for every (t, s)
    let per_rep: Vec<Vec<Vec<f64>>> = replicate(config.reps, setup.threads, |r| {
        let values = if config.zero_field {
            vec![0.0; grid.len()]
        } else {
            let key = setup.key(r, Purpose::Noise);
            simulate_series(&setup.model, setup.t0, &grid, key)?
                .standardized_values()?
                .to_vec()
        };
        config
            .t_grid
            .iter()
            .map(|&t| {
                config
                    .s_grid
                    .iter()
                    .map(|&s| Ok(il_statistic(grid.thetas(), &values, t, s)?.norm_sqr()))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect()
    })?;

    let mut rows = Vec::new();
    let mut mean_sq = Vec::new();
    let mut mean_sq_se = Vec::new();
    let mut integral = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for (ti, &t) in config.t_grid.iter().enumerate() {
        let mut means = Vec::new();
        let mut ses = Vec::new();
        for si in 0..config.s_grid.len() {
            let xs: Vec<f64> = per_rep.iter().map(|r| r[ti][si]).collect();
            means.push(mean(&xs));
            ses.push(standard_error(&xs));
        }
        let (arg, &sup) = means
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty s grid");
        // ∫ f / (t log t) dt = ∫ f / log t d(log t)
        let g = sup / t.ln();
        if let Some((pt, pg)) = prev {
            integral += 0.5 * (g + pg) * (t.ln() - pt);
        }
        prev = Some((t.ln(), g));
        rows.push(IlRow {
            t,
            sup_mean_sq: sup,
            se: ses[arg],
            s_at_sup: config.s_grid[arg],
            partial_integral: integral,
        });
        mean_sq.push(means);
        mean_sq_se.push(ses);
    }
    Ok(IlReport {
        rows,
        s_grid: config.s_grid.clone(),
        mean_sq,
        mean_sq_se,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::LevyModel;

    #[test]
    fn statistic_trivial_cases() {
        let g = ThetaGrid::geometric(1.0, 100.0, 16).unwrap();
        let zeros = vec![0.0; g.len()];
        assert_eq!(il_statistic(g.thetas(), &zeros, 50.0, 0.0).unwrap().norm(), 0.0);
        let k = il_statistic(g.thetas(), &zeros, 50.0, 1.5).unwrap();
        assert!((k.re - (1.0 - (-1.125f64).exp())).abs() < 1e-14);
        assert!(k.im.abs() < 1e-15);
        assert!(il_statistic(g.thetas(), &zeros, 1.0, 1.0).is_err());
    }

    #[test]
    fn zero_field_scan_is_flat() {
        let setup = Setup::new(LevyModel::two_point(1.0, 5.0, 1.0).unwrap(), 1.0, 2);
        let mut cfg = IlConfig::new(setup, 100);
        cfg.zero_field = true;
        let r = il_criterion_scan(&cfg).unwrap();
        let expected = (1.0 - (-4.5f64).exp()).powi(2);
        for row in &r.rows {
            assert!((row.sup_mean_sq - expected).abs() < 1e-12);
            assert_eq!(row.s_at_sup.abs(), 3.0);
        }
    }
}
