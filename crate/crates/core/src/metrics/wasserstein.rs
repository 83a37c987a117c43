use super::{normal_cdf_primitive, normal_quantile, WeightedEmpiricalMeasure};
use crate::stats::CompensatedSum;

/// `∫_a^b |c - Φ(t)| dt` for a constant level `c ∈ [0, 1]`.
fn gap_integral(c: f64, a: f64, b: f64) -> f64 {
    let below = |lo: f64, hi: f64| c * (hi - lo) - (normal_cdf_primitive(hi) - normal_cdf_primitive(lo));
    let crossing = if c <= 0.0 {
        f64::NEG_INFINITY
    } else if c >= 1.0 {
        f64::INFINITY
    } else {
        normal_quantile(c)
    };
    if crossing <= a {
        -below(a, b)
    } else if crossing >= b {
        below(a, b)
    } else {
        below(a, crossing) - below(crossing, b)
    }
}

/// `∫ |μ((-∞, t]) - Φ(t)| dt`, integrated exactly between support points
/// with Gaussian tails `Ψ(x_1)` and `Ψ(-x_n)`.
pub fn wasserstein1(mu: &WeightedEmpiricalMeasure) -> f64 {
    let pts = mu.points();
    let cum = mu.cumulative();
    let n = pts.len();
    let mut total = CompensatedSum::new();
    total.add(normal_cdf_primitive(pts[0]));
    total.add(normal_cdf_primitive(-pts[n - 1]));
    for k in 0..n - 1 {
        total.add(gap_integral(cum[k], pts[k], pts[k + 1]).abs());
    }
    total.value()
}

/// Two-sample `∫ |F_μ - F_ν|`.
pub fn wasserstein1_between(mu: &WeightedEmpiricalMeasure, nu: &WeightedEmpiricalMeasure) -> f64 {
    let mut xs: Vec<f64> = mu.points().iter().chain(nu.points()).copied().collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut total = CompensatedSum::new();
    for w in xs.windows(2) {
        total.add((mu.cdf(w[0]) - nu.cdf(w[0])).abs() * (w[1] - w[0]));
    }
    total.value()
}
