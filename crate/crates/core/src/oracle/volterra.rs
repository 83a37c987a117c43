//! Second moment and covariance by direct numerical quadrature.

use serde::Serialize;

use crate::quadrature::{integrate_piecewise, Quadrature};

/// Default number of Volterra steps on `[0, t0]`.
pub const DEFAULT_STEPS: usize = 10_000;

/// Tables for `g` and its running integrals, built by the trapezoid rule for
/// `g(t) = 1 + (m2/2) ∫_0^t (t - s) g(s) ds` at `2N` and `4N` steps with one
/// Richardson step, then accumulated with Simpson's rule onto the `N` grid.
#[derive(Clone, Debug, Serialize)]
pub struct VolterraQuadrature {
    m2: f64,
    t0: f64,
    step: f64,
    abs_tol: f64,
    #[serde(skip)]
    g: Vec<f64>,
    #[serde(skip)]
    g0: Vec<f64>,
    #[serde(skip)]
    g1: Vec<f64>,
}

/// Trapezoid solution on `n` uniform steps. The kernel vanishes on the
/// diagonal, so every step is explicit.
fn solve_trapezoid(c: f64, t0: f64, n: usize) -> Vec<f64> {
    let dt = t0 / n as f64;
    let mut g = Vec::with_capacity(n + 1);
    g.push(1.0);
    // running Σ w_j g_j and Σ w_j t_j g_j with w_0 = 1/2
    let mut s0 = 0.5;
    let mut s1 = 0.0;
    for i in 1..=n {
        let t = i as f64 * dt;
        let gi = 1.0 + c * dt * (t * s0 - s1);
        g.push(gi);
        s0 += gi;
        s1 += t * gi;
    }
    g
}

impl VolterraQuadrature {
    pub fn new(m2: f64, t0: f64) -> Self {
        Self::with_steps(m2, t0, DEFAULT_STEPS)
    }

    pub fn with_steps(m2: f64, t0: f64, steps: usize) -> Self {
        let n = steps.max(4);
        let c = 0.5 * m2;
        let coarse = solve_trapezoid(c, t0, 2 * n);
        let fine = solve_trapezoid(c, t0, 4 * n);
        let acc: Vec<f64> = (0..=2 * n)
            .map(|i| (4.0 * fine[2 * i] - coarse[i]) / 3.0)
            .collect();
        let h2 = t0 / (2 * n) as f64;
        let mut g = Vec::with_capacity(n + 1);
        let mut g0 = Vec::with_capacity(n + 1);
        let mut g1 = Vec::with_capacity(n + 1);
        g.push(acc[0]);
        g0.push(0.0);
        g1.push(0.0);
        let (mut a0, mut a1) = (0.0, 0.0);
        for m in 0..n {
            let (l, c_, r) = (2 * m, 2 * m + 1, 2 * m + 2);
            let (tl, tc, tr) = (l as f64 * h2, c_ as f64 * h2, r as f64 * h2);
            a0 += h2 / 3.0 * (acc[l] + 4.0 * acc[c_] + acc[r]);
            a1 += h2 / 3.0 * (tl * acc[l] + 4.0 * tc * acc[c_] + tr * acc[r]);
            g.push(acc[r]);
            g0.push(a0);
            g1.push(a1);
        }
        Self {
            m2,
            t0,
            step: t0 / n as f64,
            abs_tol: 1e-12,
            g,
            g0,
            g1,
        }
    }

    /// Absolute tolerance for the adaptive outer integrals.
    pub fn with_abs_tol(mut self, tol: f64) -> Self {
        self.abs_tol = tol;
        self
    }

    pub fn steps(&self) -> usize {
        self.g.len() - 1
    }

    /// Cubic Lagrange interpolation on the uniform table.
    fn interpolate(&self, table: &[f64], t: f64) -> f64 {
        let n = table.len() - 1;
        let x = (t / self.step).clamp(0.0, n as f64);
        let base = (x.floor() as usize).saturating_sub(1).min(n - 3);
        let u = x - base as f64;
        let (y0, y1, y2, y3) = (table[base], table[base + 1], table[base + 2], table[base + 3]);
        let l0 = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
        let l1 = u * (u - 2.0) * (u - 3.0) / 2.0;
        let l2 = -u * (u - 1.0) * (u - 3.0) / 2.0;
        let l3 = u * (u - 1.0) * (u - 2.0) / 6.0;
        y0 * l0 + y1 * l1 + y2 * l2 + y3 * l3
    }

    pub fn second_moment(&self, t: f64) -> f64 {
        self.interpolate(&self.g, t.clamp(0.0, self.t0))
    }

    /// `ρ(h) = (m2/2) ∫_0^c (c - s) g(s) ds` with `c = t0 - |h|/2`.
    pub fn covariance_kernel(&self, h: f64) -> f64 {
        let c = self.t0 - 0.5 * h.abs();
        if c <= 0.0 {
            return 0.0;
        }
        0.5 * self.m2 * (c * self.interpolate(&self.g0, c) - self.interpolate(&self.g1, c))
    }

    fn adaptive<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64, cuts: &[f64]) -> Quadrature {
        let mut panels = 256;
        let mut q = integrate_piecewise(f, a, b, cuts, panels);
        for _ in 0..6 {
            if q.richardson_gap / 3.0 <= self.abs_tol {
                break;
            }
            panels *= 2;
            q = integrate_piecewise(f, a, b, cuts, panels);
        }
        q
    }

    /// `σ²(θ) = 2 ∫_0^{H} (2θ - h) ρ(h) dh`, `H = min(2θ, 2 t0)`.
    pub fn variance_f(&self, theta: f64) -> f64 {
        if theta <= 0.0 {
            return 0.0;
        }
        let top = (2.0 * theta).min(2.0 * self.t0);
        let f = |h: f64| (2.0 * theta - h) * self.covariance_kernel(h);
        2.0 * self.adaptive(&f, 0.0, top, &[]).value
    }

    /// `Cov(F_θ, F_w) = ∫ ρ(h) |[-θ, θ] ∩ ([-w, w] - h)| dh`.
    pub fn covariance_f(&self, theta: f64, w: f64) -> f64 {
        if theta <= 0.0 || w <= 0.0 {
            return 0.0;
        }
        let overlap = |h: f64| (theta.min(w - h) - (-theta).max(-w - h)).max(0.0);
        let f = |h: f64| self.covariance_kernel(h) * overlap(h);
        let reach = 2.0 * self.t0;
        let d = (w - theta).abs();
        let s = w + theta;
        let cuts = [0.0, d, -d, s, -s];
        self.adaptive(&f, -reach, reach, &cuts).value
    }
}
