use super::SolutionAtoms;
use crate::error::Result;
use crate::levy::SpaceTimeWindow;
use crate::stats::CompensatedSum;

/// `x ↦ u(t0, x)` as an exact step function.
///
/// Atom `i` adds `½ z_i u_i` on the open interval
/// `(y_i - (t0 - s_i), y_i + (t0 - s_i))`. Values are stored as excesses
/// `u - 1` so that integrals of `u - 1` lose nothing to the constant.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseField {
    window: SpaceTimeWindow,
    breakpoints: Vec<f64>,
    /// `piece_excess[k]` holds on `(x_{k-1}, x_k)`; the first and last
    /// pieces are unbounded and equal zero.
    piece_excess: Vec<f64>,
    point_excess: Vec<f64>,
    /// `∫_{x_0}^{x_k} (u - 1)`.
    cumulative: Vec<f64>,
}

impl PiecewiseField {
    pub(crate) fn from_solution(solution: &SolutionAtoms) -> Self {
        let t0 = solution.t0();
        // (position, jump, opens)
        let mut events: Vec<(f64, f64, bool)> = Vec::with_capacity(2 * solution.len());
        for (atom, u) in solution.atoms().iter().zip(solution.values()) {
            let (a, b) = atom.cone_coords();
            let c = 0.5 * atom.z * u;
            events.push((a - t0, c, true));
            events.push((b + t0, -c, false));
        }
        events.sort_by(|p, q| p.0.total_cmp(&q.0));

        let mut breakpoints = Vec::new();
        let mut piece_excess = vec![0.0];
        let mut point_excess = Vec::new();
        let mut cumulative = Vec::new();
        let mut running = CompensatedSum::new();
        let mut integral = CompensatedSum::new();
        let mut k = 0;
        while k < events.len() {
            let x = events[k].0;
            let mut at_point = running;
            let mut after = running;
            while k < events.len() && events[k].0 == x {
                let (_, d, opens) = events[k];
                after.add(d);
                // cones are open: x belongs to neither an opening nor a closing one
                if !opens {
                    at_point.add(d);
                }
                k += 1;
            }
            if let Some(&prev) = breakpoints.last() {
                integral.add((x - prev) * running.value());
            }
            breakpoints.push(x);
            point_excess.push(at_point.value());
            cumulative.push(integral.value());
            running = after;
            piece_excess.push(running.value());
        }
        // the last piece is beyond every cone
        if let Some(last) = piece_excess.last_mut() {
            *last = 0.0;
        }
        Self {
            window: *solution.config().window(),
            breakpoints,
            piece_excess,
            point_excess,
            cumulative,
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Number of open pieces, including the two unbounded ones.
    pub fn piece_count(&self) -> usize {
        self.piece_excess.len()
    }

    /// Value on each piece, left to right.
    pub fn piece_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.piece_excess.iter().map(|e| 1.0 + e)
    }

    /// Value at each breakpoint. Cones are open, so a point sees neither the
    /// cones opening nor those closing there.
    pub fn point_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.point_excess.iter().map(|e| 1.0 + e)
    }

    pub fn window(&self) -> &SpaceTimeWindow {
        &self.window
    }

    /// `u(t0, x)` in `O(log n)`.
    pub fn value(&self, x: f64) -> Result<f64> {
        self.window.ensure_covers(x, x)?;
        Ok(1.0 + self.excess_unchecked(x))
    }

    fn excess_unchecked(&self, x: f64) -> f64 {
        let k = self.breakpoints.partition_point(|&p| p < x);
        if k < self.breakpoints.len() && self.breakpoints[k] == x {
            self.point_excess[k]
        } else {
            self.piece_excess[k]
        }
    }

    /// `∫_{x_0}^{x} (u - 1)`, zero left of the first breakpoint.
    fn primitive(&self, x: f64) -> f64 {
        let k = self.breakpoints.partition_point(|&p| p <= x);
        if k == 0 {
            return 0.0;
        }
        self.cumulative[k - 1] + (x - self.breakpoints[k - 1]) * self.piece_excess[k]
    }

    /// `∫_a^b (u(t0, x) - 1) dx` for `a <= b`, exact up to rounding.
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        self.window.ensure_covers(a.min(b), a.max(b))?;
        Ok(self.primitive(b) - self.primitive(a))
    }
}

#[cfg(test)]
mod tests {
    use crate::levy::{Atom, PointConfiguration, SpaceTimeWindow};
    use crate::solver::{direct_value, solve_naive};
    use crate::LabError;

    fn window() -> SpaceTimeWindow {
        SpaceTimeWindow::new(1.0, -4.0, 4.0).unwrap()
    }

    #[test]
    fn empty_field_is_one() {
        let f = solve_naive(&PointConfiguration::empty(window())).field();
        assert_eq!(f.piece_count(), 1);
        assert_eq!(f.value(0.7).unwrap(), 1.0);
        assert_eq!(f.integral(-2.0, 2.5).unwrap(), 0.0);
    }

    #[test]
    fn single_atom_three_pieces() {
        let cfg = PointConfiguration::new(window(), vec![Atom::new(0.5, 0.25, 3.0)]).unwrap();
        let f = solve_naive(&cfg).field();
        let values: Vec<f64> = f.piece_values().collect();
        assert_eq!(values, vec![1.0, 2.5, 1.0]);
        assert_eq!(f.breakpoints(), &[-0.25, 0.75]);
        assert_eq!(f.value(-0.25).unwrap(), 1.0);
        assert_eq!(f.value(0.0).unwrap(), 2.5);
        assert_eq!(f.integral(-3.0, 3.0).unwrap(), 1.5);
        assert_eq!(f.integral(0.0, 0.5).unwrap(), 0.75);
    }

    #[test]
    fn coverage_is_enforced() {
        let f = solve_naive(&PointConfiguration::empty(window())).field();
        assert!(matches!(f.value(3.5), Err(LabError::Coverage { .. })));
        assert!(matches!(f.integral(-3.5, 0.0), Err(LabError::Coverage { .. })));
        assert!(f.integral(-3.0, 3.0).is_ok());
    }

    #[test]
    fn abutting_cones_at_shared_edge() {
        // right edge of the first cone meets the left edge of the second
        let cfg = PointConfiguration::new(
            window(),
            vec![Atom::new(0.5, -0.5, 1.0), Atom::new(0.5, 0.5, 1.0)],
        )
        .unwrap();
        let sol = solve_naive(&cfg);
        let f = sol.field();
        assert_eq!(f.value(0.0).unwrap(), 1.0);
        assert_eq!(f.value(0.0).unwrap(), direct_value(&sol, 0.0));
        assert_eq!(f.value(-0.1).unwrap(), 1.5);
        assert_eq!(f.value(0.1).unwrap(), 1.5);
    }
}
