//! Exact solution of the mild equation for finite-activity centered noise.
//!
//! With a centered finite measure the compensator term vanishes and
//! `u(t, x) = 1 + ½ Σ_{i: |x - y_i| < t - s_i} z_i u_i`, where
//! `u_i = u(s_i⁻, y_i)` obeys the same sum restricted to earlier atoms. Both
//! solvers compute the `u_i`; [`PiecewiseField`] turns them into the exact
//! step function `x ↦ u(t0, x)`.

mod fast;
mod field;
mod malliavin;
mod naive;

pub use fast::solve_fast;
pub use field::PiecewiseField;
pub use malliavin::{add_one_cost, add_one_costs, second_add_one_cost, Functional};
pub use naive::solve_naive;

use crate::levy::{Atom, PointConfiguration};

/// Per-atom values `u(s_i⁻, y_i)` for one configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionAtoms {
    config: PointConfiguration,
    values: Vec<f64>,
}

impl SolutionAtoms {
    pub(crate) fn new(config: &PointConfiguration, values: Vec<f64>) -> Self {
        debug_assert_eq!(config.len(), values.len());
        Self {
            config: config.clone(),
            values,
        }
    }

    pub fn config(&self) -> &PointConfiguration {
        &self.config
    }

    pub fn atoms(&self) -> &[Atom] {
        self.config.atoms()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn t0(&self) -> f64 {
        self.config.t0()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Exact step-function representation of `u(t0, ·)`.
    pub fn field(&self) -> PiecewiseField {
        PiecewiseField::from_solution(self)
    }

    /// `max_i |u_i - v_i| / max(|v_i|, 1)`.
    ///
    /// Values near zero arise from cancellation between atoms; measuring
    /// those relative to one keeps the comparison meaningful.
    pub fn max_relative_deviation(&self, reference: &SolutionAtoms) -> f64 {
        assert_eq!(self.len(), reference.len(), "solutions of different configurations");
        self.values
            .iter()
            .zip(&reference.values)
            .map(|(u, v)| (u - v).abs() / v.abs().max(1.0))
            .fold(0.0, f64::max)
    }
}

/// Evaluates `u(t0, x)` by direct summation over atoms.
pub fn direct_value(solution: &SolutionAtoms, x: f64) -> f64 {
    let t0 = solution.t0();
    let mut s = 0.0;
    for (a, u) in solution.atoms().iter().zip(solution.values()) {
        if a.in_backward_cone(t0, x) {
            s += a.z * u;
        }
    }
    1.0 + 0.5 * s
}
