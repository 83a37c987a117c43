//! Distances between weighted empirical measures and the standard Gaussian.

mod fortet_mourier;
mod kolmogorov;
mod wasserstein;

pub use fortet_mourier::{
    fortet_mourier, fortet_mourier_between, fortet_mourier_with_step, DEFAULT_FM_STEP,
};
pub use kolmogorov::{kolmogorov, kolmogorov_between};
pub use wasserstein::{wasserstein1, wasserstein1_between};

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{LabError, Result};
use crate::stats::CompensatedSum;

/// `Φ(x)`, accurate in both tails.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// `Φ⁻¹(p)` for `p ∈ (0, 1)`, polished by Newton steps on [`normal_cdf`].
pub fn normal_quantile(p: f64) -> f64 {
    let mut x = Normal::standard().inverse_cdf(p);
    for _ in 0..3 {
        let d = normal_pdf(x);
        if !(d > 0.0) {
            break;
        }
        x -= (normal_cdf(x) - p) / d;
    }
    x
}

/// `φ(x)`.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// `Ψ(x) = ∫_{-∞}^{x} Φ = x Φ(x) + φ(x)`.
pub(crate) fn normal_cdf_primitive(x: f64) -> f64 {
    x * normal_cdf(x) + normal_pdf(x)
}

/// Sorted points with nonnegative weights summing to one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightedEmpiricalMeasure {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl WeightedEmpiricalMeasure {
    /// Validates and sorts; equal points are merged. Weights must already sum
    /// to one within `1e-12`.
    pub fn new(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(LabError::Domain(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if points.is_empty() {
            return Err(LabError::Domain("empirical measure has empty support".into()));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(LabError::Domain("support points must be finite".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(LabError::Domain("weights must be finite and >= 0".into()));
        }
        let total = crate::stats::sum(&weights);
        if (total - 1.0).abs() > 1e-12 {
            return Err(LabError::Domain(format!("weights sum to {total}, not 1")));
        }
        let mut pairs: Vec<(f64, f64)> = points.into_iter().zip(weights).collect();
        pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
        let mut points: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut weights: Vec<f64> = Vec::with_capacity(pairs.len());
        for (p, w) in pairs {
            if points.last() == Some(&p) {
                *weights.last_mut().unwrap() += w;
            } else {
                points.push(p);
                weights.push(w);
            }
        }
        Ok(Self { points, weights })
    }

    /// Rescales nonnegative weights to total mass one.
    pub fn normalized(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let total = crate::stats::sum(&weights);
        if !(total > 0.0 && total.is_finite()) {
            return Err(LabError::Domain(format!("total weight must be > 0, got {total}")));
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        Self::new(points, weights)
    }

    pub fn equal_weights(points: &[f64]) -> Result<Self> {
        let n = points.len();
        Self::new(points.to_vec(), vec![1.0 / n as f64; n])
    }

    pub fn dirac(x: f64) -> Result<Self> {
        Self::new(vec![x], vec![1.0])
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `μ((-∞, x_k])` for each support point, clamped to `[0, 1]`.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = CompensatedSum::new();
        let n = self.weights.len();
        let mut out: Vec<f64> = self
            .weights
            .iter()
            .map(|&w| {
                acc.add(w);
                acc.value().clamp(0.0, 1.0)
            })
            .collect();
        out[n - 1] = 1.0;
        out
    }

    /// `μ((-∞, x])`.
    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.points.partition_point(|&p| p <= x);
        if k == 0 {
            0.0
        } else {
            self.cumulative()[k - 1]
        }
    }
}

/// `d_Kol`, `d_W1` and `d_FM` of one measure against `γ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Distances {
    pub kolmogorov: f64,
    pub wasserstein1: f64,
    pub fortet_mourier: f64,
}

pub fn distances(mu: &WeightedEmpiricalMeasure) -> Distances {
    Distances {
        kolmogorov: kolmogorov(mu),
        wasserstein1: wasserstein1(mu),
        fortet_mourier: fortet_mourier(mu),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_cdf_reference_values() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert!((normal_cdf(1.0) - 0.841_344_746_068_542_9).abs() < 1e-15, "{}", normal_cdf(1.0) - 0.841_344_746_068_542_9);
        assert!((normal_cdf(-8.0) - 6.220_960_574_271_785e-16).abs() < 1e-27);
        for p in [1e-9, 0.1, 0.5, 0.8, 0.999] {
            assert!((normal_cdf(normal_quantile(p)) - p).abs() < 1e-14 * p, "p = {p}");
        }
        assert!((normal_cdf_primitive(0.0) - normal_pdf(0.0)).abs() < 1e-17);
    }

    #[test]
    fn measure_validation() {
        assert!(WeightedEmpiricalMeasure::new(vec![], vec![]).is_err());
        assert!(WeightedEmpiricalMeasure::new(vec![0.0], vec![0.9]).is_err());
        assert!(WeightedEmpiricalMeasure::new(vec![0.0, 1.0], vec![1.5, -0.5]).is_err());
        let m = WeightedEmpiricalMeasure::new(vec![2.0, -1.0, 2.0], vec![0.25, 0.5, 0.25]).unwrap();
        assert_eq!(m.points(), &[-1.0, 2.0]);
        assert_eq!(m.weights(), &[0.5, 0.5]);
        assert_eq!(m.cdf(-2.0), 0.0);
        assert_eq!(m.cdf(-1.0), 0.5);
        assert_eq!(m.cdf(5.0), 1.0);
    }

    #[test]
    fn normalized_rescales() {
        let m = WeightedEmpiricalMeasure::normalized(vec![0.0, 1.0], vec![2.0, 6.0]).unwrap();
        assert_eq!(m.weights(), &[0.25, 0.75]);
    }
}
