//! Deterministic moments of the solution and of its spatial integrals.
//!
//! With `k = sqrt(m2 / 2)` the second moment solves
//! `g(t) = 1 + (m2/2) ∫_0^t (t - s) g(s) ds`, so `g(t) = cosh(k t)`, and the
//! spatial covariance of `u(t0, ·)` is
//! `ρ(h) = (m2/4) ∫_0^{t0} g(s) (2(t0 - s) - h)_+ ds = cosh(k (t0 - h/2)) - 1`
//! for `h <= 2 t0` and zero beyond. Everything else here is an integral of `ρ`.
//!
//! [`MomentOracle`] evaluates the closed forms; [`VolterraQuadrature`] is the
//! independent route that solves the Volterra equation numerically and
//! integrates the defining kernels by quadrature.

mod gamma;
mod volterra;

pub use gamma::{gamma_bound_quadrature, GammaBounds, GammaMajorants};
pub use volterra::VolterraQuadrature;

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::levy::LevyModel;

/// `G_t(x) = ½ 1{|x| < t}`.
pub fn wave_kernel(t: f64, x: f64) -> f64 {
    if x.abs() < t {
        0.5
    } else {
        0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentOracle {
    t0: f64,
    m2: f64,
    k: f64,
}

impl MomentOracle {
    pub fn new(t0: f64, m2: f64) -> Result<Self> {
        if !(t0.is_finite() && t0 > 0.0) {
            return Err(LabError::Domain(format!("t0 must be > 0, got {t0}")));
        }
        if !(m2.is_finite() && m2 >= 0.0) {
            return Err(LabError::Domain(format!("m2 must be finite and >= 0, got {m2}")));
        }
        Ok(Self {
            t0,
            m2,
            k: (0.5 * m2).sqrt(),
        })
    }

    pub fn for_model(model: &LevyModel, t0: f64) -> Result<Self> {
        Self::new(t0, model.moment(2.0)?)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn m2(&self) -> f64 {
        self.m2
    }

    /// The independent quadrature route for the same quantities.
    pub fn quadrature(&self) -> VolterraQuadrature {
        VolterraQuadrature::new(self.m2, self.t0)
    }

    /// `g(t) = E[u(t, x)^2] = cosh(t sqrt(m2/2))`.
    pub fn second_moment(&self, t: f64) -> f64 {
        (self.k * t.max(0.0)).cosh()
    }

    /// `ρ(h) = Cov(u(t0, x), u(t0, x + h))`.
    pub fn covariance_kernel(&self, h: f64) -> f64 {
        let h = h.abs();
        if h >= 2.0 * self.t0 {
            return 0.0;
        }
        let half = 0.5 * self.k * (self.t0 - 0.5 * h);
        2.0 * half.sinh().powi(2)
    }

    /// `∫_0^{c} (cosh(k s) - 1) ds`.
    fn p(&self, c: f64) -> f64 {
        c * sinh_minus_x_over_x(self.k * c)
    }

    /// `∫_0^{c} s (cosh(k s) - 1) ds`.
    fn q(&self, c: f64) -> f64 {
        c * c * cosh_moment_series(self.k * c)
    }

    /// `R(a) = ∫_0^a ρ(h) dh`.
    pub fn kernel_integral(&self, a: f64) -> f64 {
        let h = a.clamp(0.0, 2.0 * self.t0);
        let c_lo = self.t0 - 0.5 * h;
        2.0 * (self.p(self.t0) - self.p(c_lo))
    }

    /// `M(a) = ∫_0^a h ρ(h) dh`.
    pub fn kernel_first_moment(&self, a: f64) -> f64 {
        let h = a.clamp(0.0, 2.0 * self.t0);
        let c_lo = self.t0 - 0.5 * h;
        4.0 * (self.t0 * (self.p(self.t0) - self.p(c_lo)) - (self.q(self.t0) - self.q(c_lo)))
    }

    /// `∫_0^a (a - h) ρ(h) dh`.
    fn double_integral(&self, a: f64) -> f64 {
        if a <= 0.0 {
            return 0.0;
        }
        a * self.kernel_integral(a) - self.kernel_first_moment(a)
    }

    /// `σ²(θ) = Var(F_θ) = 2 ∫_0^{2θ} (2θ - h) ρ(h) dh`.
    pub fn variance_f(&self, theta: f64) -> f64 {
        if theta <= 0.0 {
            return 0.0;
        }
        2.0 * self.double_integral(2.0 * theta)
    }

    pub fn sigma(&self, theta: f64) -> f64 {
        self.variance_f(theta).sqrt()
    }

    /// `Cov(F_θ, F_w) = ∫_{-θ}^{θ} ∫_{-w}^{w} ρ(|x - x'|) dx' dx`; symmetric in
    /// its arguments.
    pub fn covariance_f(&self, theta: f64, w: f64) -> f64 {
        let (lo, hi) = if theta <= w { (theta, w) } else { (w, theta) };
        if lo <= 0.0 {
            return 0.0;
        }
        2.0 * (self.double_integral(hi + lo) - self.double_integral(hi - lo))
    }

    /// `Corr(F_θ, F_w) = Cov(F̃_θ, F̃_w)`.
    pub fn correlation_f(&self, theta: f64, w: f64) -> Result<f64> {
        let denom = (self.variance_f(theta) * self.variance_f(w)).sqrt();
        if denom <= 0.0 {
            return Err(LabError::Degenerate(format!(
                "σ vanishes at θ = {theta} or w = {w}; correlation undefined"
            )));
        }
        Ok(self.covariance_f(theta, w) / denom)
    }

    /// `lim σ²(θ)/θ = 4 ∫_0^{2 t0} ρ`.
    pub fn variance_slope(&self) -> f64 {
        4.0 * self.kernel_integral(2.0 * self.t0)
    }
}

/// `(sinh x - x) / x`, accurate near zero.
fn sinh_minus_x_over_x(x: f64) -> f64 {
    if x.abs() < 1.0 {
        // Σ_{n>=1} x^{2n} / (2n+1)!
        let x2 = x * x;
        let mut term = x2 / 6.0;
        let mut sum = 0.0_f64;
        let mut n = 1.0;
        while term.abs() > 1e-18 * sum.abs() || sum == 0.0 {
            sum += term;
            n += 1.0;
            term *= x2 / ((2.0 * n) * (2.0 * n + 1.0));
            if term == 0.0 {
                break;
            }
        }
        sum
    } else {
        (x.sinh() - x) / x
    }
}

/// `(x sinh x - cosh x + 1) / x² - ½ = Σ_{m>=2} x^{2m-2} (2m-1) / (2m)!`.
fn cosh_moment_series(x: f64) -> f64 {
    if x.abs() < 1.0 {
        let x2 = x * x;
        // m = 2 term: x² · 3/24
        let mut power = x2;
        let mut factorial = 24.0;
        let mut sum = 0.0;
        let mut m = 2.0_f64;
        loop {
            let term = power * (2.0 * m - 1.0) / factorial;
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() || term == 0.0 {
                break;
            }
            m += 1.0;
            power *= x2;
            factorial *= (2.0 * m - 1.0) * (2.0 * m);
        }
        sum
    } else {
        (x * x.sinh() - x.cosh() + 1.0) / (x * x) - 0.5
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wave_kernel_values() {
        assert_eq!(wave_kernel(1.0, 0.5), 0.5);
        assert_eq!(wave_kernel(1.0, 1.5), 0.0);
        assert_eq!(wave_kernel(1.0, 1.0), 0.0);
        assert_eq!(wave_kernel(1.0, -0.999), 0.5);
    }

    #[test]
    fn series_helpers_match_direct_forms_at_switch() {
        for x in [0.999_999_f64, 1.000_001, 0.3, 2.0] {
            let direct = (x * x.sinh() - x.cosh() + 1.0) / (x * x) - 0.5;
            assert!((cosh_moment_series(x) - direct).abs() < 1e-13, "{x}");
            let direct = (x.sinh() - x) / x;
            assert!((sinh_minus_x_over_x(x) - direct).abs() < 1e-14, "{x}");
        }
        assert_eq!(sinh_minus_x_over_x(0.0), 0.0);
        assert_eq!(cosh_moment_series(0.0), 0.0);
    }

    #[test]
    fn second_moment_examples() {
        let o = MomentOracle::new(1.0, 2.0).unwrap();
        assert_eq!(o.second_moment(0.0), 1.0);
        assert!((o.second_moment(1.0) - 1.543_080_634_815_243_7).abs() < 1e-15);
        let quiet = MomentOracle::new(3.0, 0.0).unwrap();
        assert_eq!(quiet.second_moment(2.5), 1.0);
        assert_eq!(quiet.variance_f(10.0), 0.0);
    }

    #[test]
    fn kernel_boundary_and_diagonal() {
        let o = MomentOracle::new(1.5, 1.3).unwrap();
        assert_eq!(o.covariance_kernel(3.0), 0.0);
        assert_eq!(o.covariance_kernel(7.0), 0.0);
        let rho0 = o.covariance_kernel(0.0);
        assert!((rho0 - (o.second_moment(1.5) - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn variance_zero_at_origin_and_affine_tail() {
        let o = MomentOracle::new(1.0, 1.0).unwrap();
        assert_eq!(o.variance_f(0.0), 0.0);
        let tail = |th: f64| {
            4.0 * th * o.kernel_integral(2.0) - 2.0 * o.kernel_first_moment(2.0)
        };
        for th in [1.0, 1.5, 7.0, 300.0] {
            assert!((o.variance_f(th) - tail(th)).abs() < 1e-10 * tail(th));
        }
        let r = (o.variance_f(200.0) / 200.0) / (o.variance_f(100.0) / 100.0);
        assert!((r - 1.0).abs() < 0.01);
    }

    #[test]
    fn covariance_consistency_and_saturation() {
        let o = MomentOracle::new(1.0, 1.0).unwrap();
        for th in [0.3, 1.0, 4.0] {
            let v = o.variance_f(th);
            assert!((o.covariance_f(th, th) - v).abs() < 1e-12 * v.max(1.0));
        }
        let sat = 2.0 * 1.0 * 2.0 * o.kernel_integral(2.0);
        for w in [3.5, 10.0, 100.0] {
            assert!((o.covariance_f(1.0, w) - sat).abs() < 1e-12 * sat);
        }
        assert_eq!(o.covariance_f(2.0, 5.0), o.covariance_f(5.0, 2.0));
        assert!((o.correlation_f(3.0, 3.0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_correlation_is_an_error() {
        let o = MomentOracle::new(1.0, 0.0).unwrap();
        assert!(matches!(o.correlation_f(1.0, 2.0), Err(LabError::Degenerate(_))));
    }
}
