//! Composite trapezoid rules with one Richardson step.
//!
//! Integrands here are piecewise smooth with kinks at known cone boundaries;
//! callers pass those kinks as breakpoints so every panel sees a smooth
//! function and the extrapolated rule is fourth order.

/// Result of an extrapolated trapezoid rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    /// `(4 T(h/2) - T(h)) / 3`.
    pub value: f64,
    /// `|T(h/2) - T(h)|`, the size of the Richardson correction times three.
    pub richardson_gap: f64,
}

/// Composite trapezoid rule with `panels` panels on `[a, b]`.
pub fn trapezoid<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut sum = 0.5 * (f(a) + f(b));
    for k in 1..panels {
        sum += f(a + k as f64 * h);
    }
    sum * h
}

/// Trapezoid at `panels` and `2 * panels`, then one Richardson step.
pub fn trapezoid_richardson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> Quadrature {
    if b == a {
        return Quadrature {
            value: 0.0,
            richardson_gap: 0.0,
        };
    }
    let panels = panels.max(1);
    let coarse = trapezoid(f, a, b, panels);
    // refine by adding midpoints only
    let h = (b - a) / panels as f64;
    let mut mid = 0.0;
    for k in 0..panels {
        mid += f(a + (k as f64 + 0.5) * h);
    }
    let fine = 0.5 * coarse + 0.5 * h * mid;
    Quadrature {
        value: (4.0 * fine - coarse) / 3.0,
        richardson_gap: (fine - coarse).abs(),
    }
}

/// Integrates over `[a, b]` split at every breakpoint that falls strictly
/// inside, with `panels_per_piece` panels on each smooth piece.
pub fn integrate_piecewise<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    panels_per_piece: usize,
) -> Quadrature {
    let (lo, hi, sign) = if a <= b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > lo && x < hi)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut value = 0.0;
    let mut gap = 0.0;
    let mut left = lo;
    for right in cuts.into_iter().chain(std::iter::once(hi)) {
        let q = trapezoid_richardson(f, left, right, panels_per_piece);
        value += q.value;
        gap += q.richardson_gap;
        left = right;
    }
    Quadrature {
        value: sign * value,
        richardson_gap: gap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_exact_for_linear() {
        let v = trapezoid(&|x| 3.0 * x + 1.0, 0.0, 2.0, 1);
        assert!((v - 8.0).abs() < 1e-14);
    }

    #[test]
    fn richardson_exact_for_cubics() {
        let q = trapezoid_richardson(&|x: f64| x.powi(3) - x, 0.0, 2.0, 4);
        assert!((q.value - 2.0).abs() < 1e-13);
    }

    #[test]
    fn piecewise_handles_kinks() {
        let f = |x: f64| (x - 0.3).abs();
        let q = integrate_piecewise(&f, 0.0, 1.0, &[0.3], 8);
        assert!((q.value - (0.045 + 0.245)).abs() < 1e-14);
        let reversed = integrate_piecewise(&f, 1.0, 0.0, &[0.3], 8);
        assert!((reversed.value + q.value).abs() < 1e-15);
    }

    #[test]
    fn smooth_integrand_converges_fast() {
        let q = trapezoid_richardson(&f64::exp, 0.0, 1.0, 200);
        assert!((q.value - (1f64.exp() - 1.0)).abs() < 1e-12);
        assert!(q.richardson_gap < 1e-5);
    }
}
