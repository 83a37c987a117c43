use super::{normal_cdf, WeightedEmpiricalMeasure};

/// `sup_t |μ((-∞, t]) - Φ(t)|`, attained at a support point from the left
/// or from the right.
pub fn kolmogorov(mu: &WeightedEmpiricalMeasure) -> f64 {
    let cum = mu.cumulative();
    let mut below = 0.0;
    let mut sup: f64 = 0.0;
    for (&x, &c) in mu.points().iter().zip(&cum) {
        let phi = normal_cdf(x);
        sup = sup.max((below - phi).abs()).max((c - phi).abs());
        below = c;
    }
    sup
}

/// Two-sample Kolmogorov distance.
pub fn kolmogorov_between(mu: &WeightedEmpiricalMeasure, nu: &WeightedEmpiricalMeasure) -> f64 {
    let (cm, cn) = (mu.cumulative(), nu.cumulative());
    let (pm, pn) = (mu.points(), nu.points());
    let (mut i, mut j) = (0, 0);
    let (mut fm, mut fn_) = (0.0, 0.0);
    let mut sup: f64 = 0.0;
    while i < pm.len() || j < pn.len() {
        let x = match (pm.get(i), pn.get(j)) {
            (Some(&a), Some(&b)) => a.min(b),
            (Some(&a), None) => a,
            (None, Some(&b)) => b,
            (None, None) => unreachable!(),
        };
        while i < pm.len() && pm[i] == x {
            fm = cm[i];
            i += 1;
        }
        while j < pn.len() && pn[j] == x {
            fn_ = cn[j];
            j += 1;
        }
        sup = sup.max((fm - fn_).abs());
    }
    sup
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirac_at_zero_is_one_half() {
        let m = WeightedEmpiricalMeasure::dirac(0.0).unwrap();
        assert_eq!(kolmogorov(&m), 0.5);
    }

    #[test]
    fn symmetric_two_point() {
        let m = WeightedEmpiricalMeasure::new(vec![-1.0, 1.0], vec![0.5, 0.5]).unwrap();
        let expected = normal_cdf(1.0) - 0.5;
        assert!((kolmogorov(&m) - expected).abs() < 1e-15);
    }

    #[test]
    fn two_sample_basics() {
        let a = WeightedEmpiricalMeasure::equal_weights(&[0.0, 1.0, 2.0, 3.0]).unwrap();
        let b = WeightedEmpiricalMeasure::equal_weights(&[0.5, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(kolmogorov_between(&a, &a), 0.0);
        assert_eq!(kolmogorov_between(&a, &b), 0.25);
        assert_eq!(kolmogorov_between(&b, &a), 0.25);
    }
}
