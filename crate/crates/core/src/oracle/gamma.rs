//! Deterministic majorants for the three second-order Poincaré terms.
//!
//! All three are driven by the cone overlap
//! `A_θ(y) = ∫_{-θ}^{θ} G_{t0}(x - y) dx = ½ (θ + t0 - |y|)` clamped to
//! `[0, min(θ, t0)]`, which bounds the spatial weight of an atom at `y`
//! uniformly in its time. Universal constants are dropped.

use serde::Serialize;

use super::MomentOracle;
use crate::error::{LabError, Result};
use crate::levy::LevyModel;
use crate::quadrature::integrate_piecewise;

const PANELS: usize = 64;

/// The trapezoid-shaped overlap `2 A_θ` together with its exact
/// antiderivative.
#[derive(Clone, Copy, Debug)]
struct Overlap {
    reach: f64,
    flat: f64,
    height: f64,
}

impl Overlap {
    fn new(theta: f64, t0: f64) -> Self {
        let lo = theta.min(t0);
        Self {
            reach: theta + t0,
            flat: (theta - t0).abs(),
            height: 2.0 * lo,
        }
    }

    fn value(&self, y: f64) -> f64 {
        (self.reach - y.abs()).clamp(0.0, self.height)
    }

    fn knots(&self) -> [f64; 4] {
        [-self.reach, -self.flat, self.flat, self.reach]
    }

    /// `∫_{-∞}^{c} value`.
    fn cumulative(&self, c: f64) -> f64 {
        let ramp = self.reach - self.flat;
        let total = self.height * (2.0 * self.flat + ramp);
        let half_ramp = 0.5 * self.height * ramp;
        if c <= -self.reach {
            0.0
        } else if c <= -self.flat {
            let d = c + self.reach;
            0.5 * d * d
        } else if c <= self.flat {
            half_ramp + self.height * (c + self.flat)
        } else if c < self.reach {
            let d = self.reach - c;
            total - 0.5 * d * d
        } else {
            total
        }
    }

    /// `∫ (value / 2)^p`.
    fn power_integral(&self, p: f64) -> f64 {
        let top = 0.5 * self.height;
        let ramp = self.reach - self.flat;
        2.0 * self.flat * top.powf(p) + 2.0 * ramp * top.powf(p) / (p + 1.0)
    }
}

/// Prefactors and cone integrals for one model at one time horizon.
#[derive(Clone, Copy, Debug)]
pub struct GammaMajorants {
    t0: f64,
    alpha: f64,
    q: f64,
    m2: f64,
    m_1a: f64,
    m_2a: f64,
    m_q1: f64,
    oracle: MomentOracle,
}

impl GammaMajorants {
    pub fn new(model: &LevyModel, t0: f64) -> Result<Self> {
        let alpha = model.alpha();
        let q = (1.0 + 2.0 * alpha).min(2.0);
        let oracle = MomentOracle::for_model(model, t0)?;
        if oracle.m2() <= 0.0 {
            return Err(LabError::Degenerate(
                "m2 = 0: the spatial integrals have zero variance".into(),
            ));
        }
        Ok(Self {
            t0,
            alpha,
            q,
            m2: oracle.m2(),
            m_1a: model.moment(1.0 + alpha)?,
            m_2a: model.moment(2.0 + 2.0 * alpha)?,
            m_q1: model.moment(q + 1.0)?,
            oracle,
        })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `A_θ(y)`.
    pub fn cone_weight(&self, theta: f64, y: f64) -> f64 {
        0.5 * Overlap::new(theta, self.t0).value(y)
    }

    /// `J_θ(y) = ∫ A_θ(y') G_{t0}(y' - y) dy'`.
    pub fn smoothed_weight(&self, theta: f64, y: f64) -> f64 {
        let ov = Overlap::new(theta, self.t0);
        0.25 * (ov.cumulative(y + self.t0) - ov.cumulative(y - self.t0))
    }

    /// Cross term `T₁(θ, w)`: first derivative of `F̃_θ` against the second
    /// derivative of `F̃_w`.
    pub fn t1(&self, theta: f64, w: f64) -> f64 {
        let p = 1.0 + self.alpha;
        let outer = Overlap::new(w, self.t0);
        let inner = Overlap::new(theta, self.t0);
        let mut cuts: Vec<f64> = outer.knots().to_vec();
        for k in inner.knots() {
            cuts.push(k - self.t0);
            cuts.push(k + self.t0);
        }
        let f = |y: f64| (self.cone_weight(w, y) * self.smoothed_weight(theta, y)).powf(p);
        let integral = integrate_piecewise(&f, -outer.reach, outer.reach, &cuts, PANELS).value;
        let scale = self.t0 * self.m_1a * (self.t0 * self.m2).powf(p)
            / (self.oracle.sigma(theta) * self.oracle.sigma(w)).powf(p);
        scale * integral
    }

    /// Second-derivative square term `T₂(θ)`.
    pub fn t2(&self, theta: f64) -> f64 {
        let p = 1.0 + self.alpha;
        let integral = Overlap::new(theta, self.t0).power_integral(2.0 * p);
        self.t0 * self.m_2a * (0.5 * self.t0 * self.t0 * self.m2).powf(p)
            / self.oracle.variance_f(theta).powf(p)
            * integral
    }

    /// Third-moment term `G₃(θ)` with exponent `q + 1`.
    pub fn g3(&self, theta: f64) -> f64 {
        let p = self.q + 1.0;
        let integral = Overlap::new(theta, self.t0).power_integral(p);
        self.t0 * self.m_q1 / self.oracle.sigma(theta).powf(p) * integral
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GammaBounds {
    pub theta: f64,
    pub w: f64,
    pub alpha: f64,
    pub q: f64,
    pub t1_theta_theta: f64,
    pub t1_theta_w: f64,
    pub t1_w_theta: f64,
    pub t1_w_w: f64,
    pub t2_theta: f64,
    pub t2_w: f64,
    pub g3_theta: f64,
    pub g3_w: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
}

/// Evaluates every majorant for the pair `(θ, w)`.
pub fn gamma_bound_quadrature(
    model: &LevyModel,
    t0: f64,
    theta: f64,
    w: f64,
) -> Result<GammaBounds> {
    if !(theta > 0.0 && w > 0.0) {
        return Err(LabError::Domain(format!(
            "θ and w must be positive, got {theta} and {w}"
        )));
    }
    let g = GammaMajorants::new(model, t0)?;
    let p = 1.0 + g.alpha;
    let (t1_theta_theta, t1_theta_w, t1_w_theta, t1_w_w) =
        (g.t1(theta, theta), g.t1(theta, w), g.t1(w, theta), g.t1(w, w));
    let (t2_theta, t2_w) = (g.t2(theta), g.t2(w));
    let (g3_theta, g3_w) = (g.g3(theta), g.g3(w));
    Ok(GammaBounds {
        theta,
        w,
        alpha: g.alpha,
        q: g.q,
        t1_theta_theta,
        t1_theta_w,
        t1_w_theta,
        t1_w_w,
        t2_theta,
        t2_w,
        g3_theta,
        g3_w,
        gamma1: (t1_theta_theta + t1_theta_w + t1_w_theta + t1_w_w).powf(1.0 / p),
        gamma2: (t2_theta + t2_w).powf(1.0 / p),
        gamma3: g3_theta + g3_w,
    })
}
