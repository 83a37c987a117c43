use hamlab::experiments::{log_average, log_cells};
use hamlab::levy::{sample_prm, Atom, LevyModel, PointConfiguration, SpaceTimeWindow};
use hamlab::metrics::{
    fortet_mourier, fortet_mourier_between, kolmogorov, kolmogorov_between, wasserstein1,
    wasserstein1_between, WeightedEmpiricalMeasure,
};
use hamlab::oracle::{MomentOracle, VolterraQuadrature};
use hamlab::rng::{Purpose, StreamKey};
use hamlab::solver::{add_one_cost, direct_value, second_add_one_cost, solve_fast, solve_naive, Functional};
use proptest::prelude::*;

const T0: f64 = 1.0;

fn window() -> SpaceTimeWindow {
    SpaceTimeWindow::new(T0, -4.0, 4.0).unwrap()
}

fn jump() -> impl Strategy<Value = f64> {
    prop_oneof![-2.0..-0.05f64, 0.05..2.0f64]
}

fn atom() -> impl Strategy<Value = Atom> {
    (0.0..T0, -4.0..4.0f64, jump()).prop_map(|(s, y, z)| Atom::new(s, y, z))
}

fn configuration(max: usize) -> impl Strategy<Value = PointConfiguration> {
    prop::collection::vec(atom(), 0..max)
        .prop_map(|atoms| PointConfiguration::new(window(), atoms).unwrap())
}

fn measure() -> impl Strategy<Value = WeightedEmpiricalMeasure> {
    prop::collection::vec((-8.0..8.0f64, 0.01..1.0f64), 1..60).prop_map(|pw| {
        let (p, w) = pw.into_iter().unzip();
        WeightedEmpiricalMeasure::normalized(p, w).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fast_solver_matches_naive(config in configuration(300)) {
        let fast = solve_fast(&config);
        prop_assert!(fast.max_relative_deviation(&solve_naive(&config)) <= 1e-10);
    }

    #[test]
    fn field_matches_direct_sums(config in configuration(80), x in -3.0..3.0f64) {
        let solution = solve_fast(&config);
        let field = solution.field();
        let direct = direct_value(&solution, x);
        prop_assert!((field.value(x).unwrap() - direct).abs() <= 1e-12 * direct.abs().max(1.0));
    }

    #[test]
    fn spatial_integral_is_linear_between_breakpoints(config in configuration(60), u in 0.0..1.0f64, v in 0.0..1.0f64) {
        let field = solve_fast(&config).field();
        let f = |th: f64| field.integral(-th, th).unwrap();
        prop_assert_eq!(f(0.0), 0.0);
        // F_θ can only kink where θ or -θ is a breakpoint
        let mut kinks: Vec<f64> = field.breakpoints().iter().map(|x| x.abs()).filter(|&x| x < 3.0).collect();
        kinks.sort_by(f64::total_cmp);
        kinks.dedup();
        prop_assume!(kinks.len() >= 2);
        let (lo, hi) = (kinks[0], kinks[1]);
        let (a, b) = (lo + u * (hi - lo), lo + v * (hi - lo));
        let slope = (f(hi) - f(lo)) / (hi - lo);
        prop_assert!((f(b) - f(a) - slope * (b - a)).abs() <= 1e-9 * (1.0 + f(hi).abs()));
    }

    #[test]
    fn add_one_cost_vanishes_outside_the_cone(config in configuration(60), xi in atom(), x in -2.0..2.0f64) {
        let solution = solve_fast(&config);
        let d = add_one_cost(&solution, xi, Functional::PointValue { x }).unwrap();
        if !xi.in_backward_cone(T0, x) {
            prop_assert_eq!(d, 0.0);
        }
    }

    #[test]
    fn second_difference_vanishes_outside_nested_cones(config in configuration(60), a in atom(), b in atom(), x in -2.0..2.0f64) {
        let solution = solve_fast(&config);
        let f = Functional::PointValue { x };
        let d = second_add_one_cost(&solution, a, b, f).unwrap();
        prop_assert_eq!(d, second_add_one_cost(&solution, b, a, f).unwrap());
        let nested = (b.precedes(&a) && a.in_backward_cone(T0, x))
            || (a.precedes(&b) && b.in_backward_cone(T0, x));
        if !nested {
            prop_assert_eq!(d, 0.0);
        }
    }

    #[test]
    fn sampled_configurations_are_valid_and_reproducible(seed in any::<u64>(), rep in 0u64..1000, mass in 0.0..20.0f64) {
        let model = LevyModel::two_point(1.0, mass, 1.0).unwrap();
        let w = window();
        let key = StreamKey::new(seed, rep, Purpose::Noise);
        let c = sample_prm(&model, &w, key);
        prop_assert!(c.atoms().windows(2).all(|p| p[0].s <= p[1].s));
        prop_assert!(c.atoms().iter().all(|a| w.contains(a.s, a.y) && a.z != 0.0));
        prop_assert_eq!(c, sample_prm(&model, &w, key));
    }

    #[test]
    fn metric_bounds(mu in measure()) {
        let (k, w, fm) = (kolmogorov(&mu), wasserstein1(&mu), fortet_mourier(&mu));
        prop_assert!((0.0..=1.0).contains(&k));
        prop_assert!(w > 0.0);
        prop_assert!(fm >= 0.0 && fm <= w.min(2.0));
    }

    #[test]
    fn two_sample_metrics_are_metrics(mu in measure(), nu in measure(), eta in measure()) {
        prop_assert_eq!(kolmogorov_between(&mu, &mu), 0.0);
        prop_assert!(wasserstein1_between(&mu, &mu).abs() <= 1e-12);
        prop_assert!(fortet_mourier_between(&mu, &mu).abs() <= 1e-12);
        prop_assert!((kolmogorov_between(&mu, &nu) - kolmogorov_between(&nu, &mu)).abs() <= 1e-12);
        prop_assert!(
            kolmogorov_between(&mu, &eta) <= kolmogorov_between(&mu, &nu) + kolmogorov_between(&nu, &eta) + 1e-12
        );
        prop_assert!(
            wasserstein1_between(&mu, &eta) <= wasserstein1_between(&mu, &nu) + wasserstein1_between(&nu, &eta) + 1e-9
        );
        prop_assert!(fortet_mourier_between(&mu, &nu) <= wasserstein1_between(&mu, &nu).min(2.0) + 1e-9);
    }

    #[test]
    fn log_weights_sum_to_one(start in 0.5..2.0f64, ratio in 1.01..1.5f64, n in 2usize..200, frac in 0.0..1.0f64) {
        let thetas: Vec<f64> = (0..n).map(|k| start * ratio.powi(k as i32)).collect();
        let last = thetas[n - 1];
        let t = start + frac * (last - start);
        prop_assume!(t > start);
        let cells = log_cells(&thetas, start, t).unwrap();
        let total: f64 = cells.iter().sum();
        prop_assert!((total - (t / start).ln()).abs() <= 1e-12 * total.max(1.0));
        let values: Vec<f64> = (0..n).map(|k| k as f64).collect();
        let nu = log_average(&thetas, &values, t).unwrap();
        prop_assert!((nu.weights().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn covariance_kernel_is_monotone_with_compact_support(m2 in 0.01..20.0f64, t0 in 0.1..3.0f64, u in 0.0..1.0f64, v in 0.0..1.0f64) {
        let o = MomentOracle::new(t0, m2).unwrap();
        let (a, b) = if u <= v { (u, v) } else { (v, u) };
        let (ha, hb) = (2.0 * t0 * a, 2.0 * t0 * b);
        prop_assert!(o.covariance_kernel(ha) >= o.covariance_kernel(hb));
        prop_assert!(o.covariance_kernel(hb) >= 0.0);
        prop_assert_eq!(o.covariance_kernel(2.0 * t0 * (1.0 + a)), 0.0);
        let rho0 = o.covariance_kernel(0.0);
        prop_assert!((rho0 - (o.second_moment(t0) - 1.0)).abs() <= 1e-12 * rho0.max(1.0));
    }

    #[test]
    fn variance_is_convex_then_affine(m2 in 0.01..20.0f64, t0 in 0.1..3.0f64, u in 0.05..0.95f64) {
        let o = MomentOracle::new(t0, m2).unwrap();
        let h = 0.02 * t0;
        let second = |th: f64| o.variance_f(th + h) - 2.0 * o.variance_f(th) + o.variance_f(th - h);
        let scale = o.variance_f(4.0 * t0);
        let inside = 0.1 * t0 + u * 0.8 * t0;
        prop_assert!(second(inside) >= -1e-12 * scale);
        let outside = t0 * (1.0 + 3.0 * u) + h;
        prop_assert!(second(outside).abs() <= 1e-10 * scale);
        prop_assert!((o.variance_slope() - (o.variance_f(outside + 1.0) - o.variance_f(outside))).abs() <= 1e-9 * scale);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn closed_forms_match_volterra_quadrature(m2 in 0.05..10.0f64, t0 in 0.2..2.0f64, u in 0.0..1.0f64, v in 0.0..1.0f64) {
        let o = MomentOracle::new(t0, m2).unwrap();
        let q = VolterraQuadrature::new(m2, t0);
        let t = u * t0;
        prop_assert!((o.second_moment(t) - q.second_moment(t)).abs() <= 1e-8);
        let h = 2.0 * t0 * v;
        prop_assert!((o.covariance_kernel(h) - q.covariance_kernel(h)).abs() <= 1e-8);
        let theta = 0.1 + 5.0 * v;
        let rel = (o.variance_f(theta) - q.variance_f(theta)).abs() / o.variance_f(theta);
        prop_assert!(rel <= 1e-8, "variance mismatch {rel:e}");
    }
}
