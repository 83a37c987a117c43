//! Bounded-Lipschitz distance by exact maximization over piecewise-linear
//! test functions.
//!
//! Test functions are linear between nodes of a uniform grid and constant
//! outside it, so `∫ φ d(μ - γ) = Σ_k c_k v_k` with `v_k = φ(x_k)` and
//! `c_k` the integral of the k-th hat function against `μ - γ`. For a fixed
//! sup bound `B` the constraint `‖φ‖_∞ + Lip(φ) <= 1` becomes `|v_k| <= B`
//! and `|v_{k+1} - v_k| <= (1 - B) h`; that linear program is solved exactly
//! by propagating a concave piecewise-linear value function along the grid.
//! The optimum is concave in `B` and is located by golden-section search.

use std::collections::VecDeque;

use super::{normal_cdf_primitive, WeightedEmpiricalMeasure};

pub const DEFAULT_FM_STEP: f64 = 0.005;
const GAUSSIAN_REACH: f64 = 6.0;

/// `d_FM(μ, γ)` on the default grid.
pub fn fortet_mourier(mu: &WeightedEmpiricalMeasure) -> f64 {
    fortet_mourier_with_step(mu, DEFAULT_FM_STEP)
}

pub fn fortet_mourier_with_step(mu: &WeightedEmpiricalMeasure, step: f64) -> f64 {
    let grid = Grid::covering(mu.points(), None, step);
    let mut c = grid.hat_masses(mu);
    for (ck, g) in c.iter_mut().zip(grid.gaussian_hat_masses()) {
        *ck -= g;
    }
    maximize(&c, grid.step)
}

/// Two-sample `d_FM(μ, ν)` on a grid covering both supports.
pub fn fortet_mourier_between(mu: &WeightedEmpiricalMeasure, nu: &WeightedEmpiricalMeasure) -> f64 {
    let grid = Grid::covering(mu.points(), Some(nu.points()), DEFAULT_FM_STEP);
    let mut c = grid.hat_masses(mu);
    for (ck, n) in c.iter_mut().zip(grid.hat_masses(nu)) {
        *ck -= n;
    }
    maximize(&c, grid.step)
}

struct Grid {
    start: f64,
    step: f64,
    nodes: usize,
}

impl Grid {
    fn covering(a: &[f64], b: Option<&[f64]>, step: f64) -> Self {
        assert!(step > 0.0, "grid step must be positive");
        let mut lo = -GAUSSIAN_REACH;
        let mut hi = GAUSSIAN_REACH;
        for &p in a.iter().chain(b.unwrap_or(&[])) {
            lo = lo.min(p);
            hi = hi.max(p);
        }
        let first = (lo / step).floor();
        let last = (hi / step).ceil();
        Self {
            start: first * step,
            step,
            nodes: (last - first) as usize + 1,
        }
    }

    fn node(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }

    /// Linear-interpolation weights of each atom onto its two neighbours.
    fn hat_masses(&self, mu: &WeightedEmpiricalMeasure) -> Vec<f64> {
        let mut c = vec![0.0; self.nodes];
        for (&x, &w) in mu.points().iter().zip(mu.weights()) {
            let pos = ((x - self.start) / self.step).clamp(0.0, (self.nodes - 1) as f64);
            let k = (pos.floor() as usize).min(self.nodes - 2);
            let frac = pos - k as f64;
            c[k] += w * (1.0 - frac);
            c[k + 1] += w * frac;
        }
        c
    }

    /// `∫ hat_k dγ`. Interior hats are second differences of `Ψ`; right of
    /// the origin the reflected `Ψ(-x)` is used, which differs from `Ψ(x)`
    /// by the linear `x` and so has the same second differences without
    /// the cancellation.
    fn gaussian_hat_masses(&self) -> Vec<f64> {
        let n = self.nodes;
        let h = self.step;
        let psi = |x: f64| normal_cdf_primitive(x);
        let mut c = vec![0.0; n];
        c[0] = (psi(self.node(1)) - psi(self.node(0))) / h;
        c[n - 1] = (psi(-self.node(n - 2)) - psi(-self.node(n - 1))) / h;
        for (k, ck) in c.iter_mut().enumerate().take(n - 1).skip(1) {
            let (l, m, r) = (self.node(k - 1), self.node(k), self.node(k + 1));
            *ck = if m <= 0.0 {
                (psi(r) - 2.0 * psi(m) + psi(l)) / h
            } else {
                (psi(-l) - 2.0 * psi(-m) + psi(-r)) / h
            };
        }
        c
    }
}

/// `max Σ c_k v_k` over `|v_k| <= bound`, `|v_{k+1} - v_k| <= slack`.
fn linear_program(c: &[f64], bound: f64, slack: f64) -> f64 {
    if bound <= 0.0 {
        return 0.0;
    }
    // f(v) on [-bound, bound]: value at the left end plus (length, slope)
    // segments in decreasing slope order; `offset` is added to every slope
    let mut left_value = -bound * c[0];
    let mut segs: VecDeque<(f64, f64)> = VecDeque::new();
    segs.push_back((2.0 * bound, 0.0));
    let mut offset = c[0];
    for &ck in &c[1..] {
        if slack > 0.0 {
            // window maximum: flat piece of length 2·slack at the peak
            let peak = segs.partition_point(|&(_, s)| s + offset > 0.0);
            segs.insert(peak, (2.0 * slack, -offset));
            // the domain grew to [-bound - slack, bound + slack]; trim back
            let mut cut = slack;
            while cut > 0.0 {
                let (len, s) = segs.front_mut().expect("domain is never empty");
                if *len <= cut {
                    left_value += *len * (*s + offset);
                    cut -= *len;
                    segs.pop_front();
                } else {
                    left_value += cut * (*s + offset);
                    *len -= cut;
                    cut = 0.0;
                }
            }
            let mut cut = slack;
            while cut > 0.0 {
                let (len, _) = segs.back_mut().expect("domain is never empty");
                if *len <= cut {
                    cut -= *len;
                    segs.pop_back();
                } else {
                    *len -= cut;
                    cut = 0.0;
                }
            }
        }
        left_value -= bound * ck;
        offset += ck;
    }
    let mut best = left_value;
    let mut v = left_value;
    for &(len, s) in &segs {
        v += len * (s + offset);
        best = best.max(v);
    }
    best
}

/// Golden-section search for `max_B V(B)` with `V` concave on `[0, 1]`.
fn maximize(c: &[f64], step: f64) -> f64 {
    let value = |b: f64| linear_program(c, b, (1.0 - b) * step);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (value(x1), value(x2));
    while hi - lo > 1e-7 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = value(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = value(x1);
        }
    }
    f1.max(f2).max(value(1.0)).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{normal_cdf, normal_pdf, wasserstein1};

    /// `max_v Σ c_k v_k` by brute force over a lattice of `v` values.
    fn brute_lp(c: &[f64], bound: f64, slack: f64, levels: usize) -> f64 {
        let vals: Vec<f64> = (0..levels)
            .map(|i| -bound + 2.0 * bound * i as f64 / (levels - 1) as f64)
            .collect();
        let mut best = vec![0.0; levels];
        for (i, v) in vals.iter().enumerate() {
            best[i] = c[0] * v;
        }
        for &ck in &c[1..] {
            let prev = best.clone();
            for (i, v) in vals.iter().enumerate() {
                let m = vals
                    .iter()
                    .zip(&prev)
                    .filter(|(u, _)| (*u - v).abs() <= slack + 1e-12)
                    .map(|(_, p)| *p)
                    .fold(f64::NEG_INFINITY, f64::max);
                best[i] = m + ck * v;
            }
        }
        best.into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn dp_matches_lattice_search() {
        let c = [0.3, -0.7, 0.2, 0.5, -0.1, -0.4, 0.6];
        // slack a multiple of the lattice spacing makes the lattice exact
        let (bound, slack) = (1.0, 0.25);
        let exact = linear_program(&c, bound, slack);
        let brute = brute_lp(&c, bound, slack, 9);
        assert!((exact - brute).abs() < 1e-12, "{exact} vs {brute}");
    }

    #[test]
    fn unconstrained_slope_gives_l1_norm_when_free() {
        let c = [0.5, -0.25, 0.25];
        let v = linear_program(&c, 2.0, 10.0);
        assert!((v - 2.0).abs() < 1e-12);
    }

    /// `sup_B [B - E max(B - (1 - B)|Z|, -B)]`, the continuum value for δ₀.
    fn dirac_exact() -> f64 {
        let value = |b: f64| {
            let l = 1.0 - b;
            if l <= 0.0 {
                return 0.0;
            }
            let r = 2.0 * b / l;
            let inner = b * (2.0 * normal_cdf(r) - 1.0) - 2.0 * l * (normal_pdf(0.0) - normal_pdf(r));
            let outer = -b * 2.0 * (1.0 - normal_cdf(r));
            b - (inner + outer)
        };
        (0..=200_000)
            .map(|i| value(i as f64 / 200_000.0))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn dirac_matches_continuum_and_dense_grid() {
        let m = WeightedEmpiricalMeasure::dirac(0.0).unwrap();
        let exact = dirac_exact();
        let coarse = fortet_mourier(&m);
        let dense = fortet_mourier_with_step(&m, 0.001);
        assert!(coarse <= exact + 1e-9 && dense <= exact + 1e-9);
        assert!((dense - exact).abs() < 1e-5, "{dense} vs {exact}");
        assert!((coarse - dense).abs() < 1e-4);
        assert!(coarse <= wasserstein1(&m));
    }

    #[test]
    fn two_sample_identity_and_bound() {
        let a = WeightedEmpiricalMeasure::equal_weights(&[-0.5, 0.1, 1.2]).unwrap();
        let b = WeightedEmpiricalMeasure::equal_weights(&[-0.4, 0.3, 1.0]).unwrap();
        assert_eq!(fortet_mourier_between(&a, &a), 0.0);
        let d = fortet_mourier_between(&a, &b);
        assert!(d > 0.0 && d <= crate::metrics::wasserstein1_between(&a, &b) + 1e-12);
    }
}
