//! The analytic moments against routes that share none of their algebra.

use hamlab::experiments::log_average;
use hamlab::fields::{simulate_series, ThetaGrid};
use hamlab::levy::LevyModel;
use hamlab::metrics::{fortet_mourier_with_step, kolmogorov, wasserstein1, WeightedEmpiricalMeasure};
use hamlab::oracle::{MomentOracle, VolterraQuadrature};
use hamlab::quadrature::integrate_piecewise;
use hamlab::rng::{Purpose, StreamKey};

const T0: f64 = 1.0;
const M2: f64 = 5.0;

/// `ρ(h) = m2 ∫_0^{t0} E[u(s)²] ∫ G_{t0-s}(y) G_{t0-s}(y+h) dy ds`; the
/// inner integral is a quarter of the overlap of two intervals of half
/// width `t0 - s`.
fn kernel_by_quadrature(m2: f64, h: f64) -> f64 {
    let k = (m2 / 2.0).sqrt();
    let f = |s: f64| 0.25 * (2.0 * (T0 - s) - h).max(0.0) * (k * s).cosh();
    let end = (T0 - 0.5 * h).max(0.0);
    m2 * integrate_piecewise(&f, 0.0, end, &[], 2000).value
}

#[test]
fn covariance_kernel_from_overlap_lengths() {
    for m2 in [1.0, M2] {
        let o = MomentOracle::new(T0, m2).unwrap();
        for h in [0.0, 0.3, 1.0, 1.7] {
            let q = kernel_by_quadrature(m2, h);
            assert!((o.covariance_kernel(h) - q).abs() < 1e-8, "ρ({h}): {} vs {q}", o.covariance_kernel(h));
        }
    }
}

/// `∫∫_{[-θ,θ]²} ρ(|x - y|) dy dx` by nested piecewise Simpson with every
/// kink of the integrand as a breakpoint.
fn variance_by_double_integral(o: &MomentOracle, theta: f64) -> f64 {
    let inner = |x: f64| {
        let f = |y: f64| o.covariance_kernel((x - y).abs());
        let cuts = [x - 2.0 * T0, x, x + 2.0 * T0];
        integrate_piecewise(&f, -theta, theta, &cuts, 200).value
    };
    let cuts = [-theta + 2.0 * T0, theta - 2.0 * T0];
    integrate_piecewise(&inner, -theta, theta, &cuts, 200).value
}

#[test]
fn variance_from_brute_force_double_integral() {
    for m2 in [1.0, M2] {
        let o = MomentOracle::new(T0, m2).unwrap();
        for theta in [0.5, 2.0, 3.5] {
            let brute = variance_by_double_integral(&o, theta);
            assert!((o.variance_f(theta) - brute).abs() < 1e-6, "σ²({theta}): {} vs {brute}", o.variance_f(theta));
        }
    }
}

#[test]
fn second_moment_is_cosh_and_quadrature_converges() {
    let o = MomentOracle::new(T0, M2).unwrap();
    let exact = (T0 * (M2 / 2.0).sqrt()).cosh();
    assert!((o.second_moment(T0) - exact).abs() < 1e-14);
    let errors: Vec<f64> = [200, 400, 800]
        .iter()
        .map(|&n| (VolterraQuadrature::with_steps(M2, T0, n).second_moment(T0) - exact).abs())
        .collect();
    assert!(errors[0] < 1e-6);
    assert!(errors[1] < errors[0] && errors[2] < errors[1], "{errors:?}");
    assert!((VolterraQuadrature::new(M2, T0).second_moment(T0) - exact).abs() < 1e-8);
}

#[test]
fn variance_grows_linearly() {
    for m2 in [1.0, M2] {
        let o = MomentOracle::new(T0, m2).unwrap();
        let r = (o.variance_f(100.0) / 100.0) / (o.variance_f(200.0) / 200.0);
        assert!((r - 1.0).abs() < 0.01);
        let slope = o.variance_slope();
        assert!((o.variance_f(200.0) - o.variance_f(100.0) - 100.0 * slope).abs() < 1e-8 * o.variance_f(200.0));
    }
}

#[test]
fn fortet_mourier_grid_refinement() {
    let mut measures = vec![WeightedEmpiricalMeasure::dirac(0.0).unwrap()];
    measures.push(WeightedEmpiricalMeasure::equal_weights(&[-2.0, 0.3, 0.31, 1.5]).unwrap());
    let pts: Vec<f64> = (0..200).map(|k| ((k as f64) * 0.618_034).fract() * 6.0 - 3.0).collect();
    measures.push(WeightedEmpiricalMeasure::equal_weights(&pts).unwrap());
    for m in &measures {
        let coarse = fortet_mourier_with_step(m, 0.005);
        let fine = fortet_mourier_with_step(m, 0.0025);
        assert!((coarse - fine).abs() < 1e-3, "{coarse} vs {fine}");
    }
}

#[test]
fn log_average_grid_refinement() {
    let model = LevyModel::two_point(1.0, 5.0, 1.0).unwrap();
    let t = 200.0;
    let key = StreamKey::new(21, 0, Purpose::Noise);
    let distances = |per_decade: usize| {
        let grid = ThetaGrid::geometric(1.0, t, per_decade).unwrap();
        let series = simulate_series(&model, T0, &grid, key).unwrap();
        let nu = log_average(grid.thetas(), series.standardized_values().unwrap(), t).unwrap();
        (kolmogorov(&nu), wasserstein1(&nu))
    };
    let (k64, w64) = distances(64);
    let (k512, w512) = distances(512);
    assert!((k64 - k512).abs() < 1e-2, "d_Kol {k64} vs {k512}");
    assert!((w64 - w512).abs() < 1e-2, "d_W1 {w64} vs {w512}");
}
