//! Add-one-cost differences `D_ξ F = F(χ + δ_ξ) - F(χ)` and their second
//! order analogue.
//!
//! Inserting extra atoms `ξ_1, …, ξ_k` makes every value multilinear in
//! their presence: `u_i(S) = Σ_{M ⊆ S} c_i[M]` over subsets `S` of the
//! extras. Möbius inversion gives `c_i[M]` as exactly the iterated
//! difference over `M`, and the coefficients obey the same recursion as the
//! solution:
//!
//! `c_i[M] = 1{M = ∅} + ½ Σ_{j ≺ i} z_j c_j[M] + ½ Σ_{e ∈ M, e ≺ i} z_e c_e[M \ e]`.
//!
//! Only atoms in the forward cone of some extra carry a nonzero coefficient
//! for `M ≠ ∅`, so the prefix and every unrelated atom are never touched and
//! differences outside the (nested) cones are exactly zero.

use super::SolutionAtoms;
use crate::error::{LabError, Result};
use crate::levy::Atom;

/// Linear functionals of `u(t0, ·)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Functional {
    /// `u(t0, x)`.
    PointValue { x: f64 },
    /// `F_θ = ∫_{-θ}^{θ} (u(t0, x) - 1) dx`.
    SpatialIntegral { theta: f64 },
}

impl Functional {
    /// `F` is `[u = 1] + ½ Σ_i z_i u_i weight(i)`; this is `weight`.
    fn weight(&self, t0: f64, atom: &Atom) -> f64 {
        match *self {
            Functional::PointValue { x } => {
                if atom.in_backward_cone(t0, x) {
                    1.0
                } else {
                    0.0
                }
            }
            Functional::SpatialIntegral { theta } => {
                let (a, b) = atom.cone_coords();
                ((b + t0).min(theta) - (a - t0).max(-theta)).max(0.0)
            }
        }
    }

    fn ensure_covered(&self, solution: &SolutionAtoms) -> Result<()> {
        let w = solution.config().window();
        match *self {
            Functional::PointValue { x } => w.ensure_covers(x, x),
            Functional::SpatialIntegral { theta } => {
                if !(theta >= 0.0) {
                    return Err(LabError::Domain(format!("θ must be >= 0, got {theta}")));
                }
                w.ensure_covers(-theta, theta)
            }
        }
    }
}

fn check_extra(xi: &Atom) -> Result<()> {
    if !(xi.z.is_finite() && xi.z != 0.0) {
        return Err(LabError::Domain(format!(
            "added jump size must be finite and nonzero, got {}",
            xi.z
        )));
    }
    if !(xi.s >= 0.0 && xi.y.is_finite()) {
        return Err(LabError::Domain(format!(
            "added atom must have time >= 0, got ({}, {})",
            xi.s, xi.y
        )));
    }
    Ok(())
}

enum Node {
    Base(usize),
    Extra(usize),
}

/// Coefficient of the full subset of `extras` in the multilinear expansion
/// of the functional, i.e. the iterated add-one-cost difference.
fn iterated_difference(solution: &SolutionAtoms, extras: &[Atom], functional: Functional) -> f64 {
    let t0 = solution.t0();
    let k = extras.len();
    debug_assert!((1..=2).contains(&k));
    if extras.iter().any(|e| e.s >= t0) {
        return 0.0;
    }
    let masks = 1usize << k;
    let full = masks - 1;
    let atoms = solution.atoms();
    let values = solution.values();

    // extras and the base atoms in their forward cones, in time order
    let first = extras.iter().map(|e| e.s).fold(f64::INFINITY, f64::min);
    let start = atoms.partition_point(|a| a.s <= first);
    let mut nodes: Vec<(f64, Node)> = (0..k).map(|e| (extras[e].s, Node::Extra(e))).collect();
    for (i, ai) in atoms.iter().enumerate().skip(start) {
        if extras.iter().any(|e| e.precedes(ai)) {
            nodes.push((ai.s, Node::Base(i)));
        }
    }
    nodes.sort_by(|p, q| p.0.total_cmp(&q.0));

    // per node: its atom and `contrib[M]`, the coefficient it feeds forward
    // under subset M (for an extra f that is c_f[M \ f] when f ∈ M)
    let mut done: Vec<(Atom, Vec<f64>)> = Vec::with_capacity(nodes.len());
    for (_, node) in &nodes {
        let (atom, own) = match *node {
            Node::Base(i) => (atoms[i], None),
            Node::Extra(e) => (extras[e], Some(e)),
        };
        let mut coef = vec![0.0; masks];
        coef[0] = match *node {
            Node::Base(i) => values[i],
            Node::Extra(_) => {
                let mut s = 0.0;
                for (a, u) in atoms.iter().zip(values) {
                    if a.precedes(&atom) {
                        s += a.z * u;
                    }
                }
                1.0 + 0.5 * s
            }
        };
        for (mask, c) in coef.iter_mut().enumerate().skip(1) {
            if own.is_some_and(|e| mask & (1 << e) != 0) {
                continue;
            }
            let mut s = 0.0;
            for (prev, contrib) in &done {
                if contrib[mask] != 0.0 && prev.precedes(&atom) {
                    s += prev.z * contrib[mask];
                }
            }
            *c = 0.5 * s;
        }
        let contrib = match own {
            None => coef,
            Some(e) => {
                let bit = 1 << e;
                (0..masks)
                    .map(|m| if m & bit != 0 { coef[m & !bit] } else { 0.0 })
                    .collect()
            }
        };
        done.push((atom, contrib));
    }

    let mut total = 0.0;
    for (atom, contrib) in &done {
        if contrib[full] != 0.0 {
            let w = functional.weight(t0, atom);
            if w != 0.0 {
                total += atom.z * contrib[full] * w;
            }
        }
    }
    0.5 * total
}

/// `D_ξ F`.
pub fn add_one_cost(solution: &SolutionAtoms, xi: Atom, functional: Functional) -> Result<f64> {
    check_extra(&xi)?;
    functional.ensure_covered(solution)?;
    Ok(iterated_difference(solution, &[xi], functional))
}

/// `D_ξ F` for many `ξ` against one solution.
pub fn add_one_costs(
    solution: &SolutionAtoms,
    xis: &[Atom],
    functional: Functional,
) -> Result<Vec<f64>> {
    functional.ensure_covered(solution)?;
    xis.iter()
        .map(|xi| {
            check_extra(xi)?;
            Ok(iterated_difference(solution, &[*xi], functional))
        })
        .collect()
}

/// `D_{ξ1} D_{ξ2} F = F(χ + δ₁ + δ₂) - F(χ + δ₁) - F(χ + δ₂) + F(χ)`;
/// symmetric in its two atoms.
pub fn second_add_one_cost(
    solution: &SolutionAtoms,
    xi1: Atom,
    xi2: Atom,
    functional: Functional,
) -> Result<f64> {
    check_extra(&xi1)?;
    check_extra(&xi2)?;
    functional.ensure_covered(solution)?;
    Ok(iterated_difference(solution, &[xi1, xi2], functional))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::{sample_prm, LevyModel, PointConfiguration, SpaceTimeWindow};
    use crate::rng::{Purpose, StreamKey};
    use crate::solver::{solve_fast, solve_naive};

    fn window() -> SpaceTimeWindow {
        SpaceTimeWindow::new(1.0, -4.0, 4.0).unwrap()
    }

    /// `F` by a full re-solve of the configuration with `extra` inserted.
    fn resolve(base: &PointConfiguration, extra: &[Atom], f: Functional) -> f64 {
        let mut atoms = base.atoms().to_vec();
        atoms.extend_from_slice(extra);
        let cfg = PointConfiguration::new(*base.window(), atoms).unwrap();
        let field = solve_naive(&cfg).field();
        match f {
            Functional::PointValue { x } => field.value(x).unwrap(),
            Functional::SpatialIntegral { theta } => field.integral(-theta, theta).unwrap(),
        }
    }

    #[test]
    fn empty_configuration_point_value() {
        let sol = solve_naive(&PointConfiguration::empty(window()));
        let f = Functional::PointValue { x: 0.5 };
        let d = add_one_cost(&sol, Atom::new(0.25, 0.0, 2.0), f).unwrap();
        assert_eq!(d, 1.0);
        let d = add_one_cost(&sol, Atom::new(0.75, 0.0, 2.0), f).unwrap();
        assert_eq!(d, 0.0);
        let d = add_one_cost(&sol, Atom::new(1.5, 0.5, 2.0), f).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn nested_pair_on_empty_noise() {
        let sol = solve_naive(&PointConfiguration::empty(window()));
        let f = Functional::PointValue { x: 0.0 };
        let (x1, x2) = (Atom::new(0.25, 0.0, 2.0), Atom::new(0.5, 0.125, -3.0));
        let d = second_add_one_cost(&sol, x1, x2, f).unwrap();
        assert_eq!(d, 0.25 * 2.0 * -3.0);
        assert_eq!(d, second_add_one_cost(&sol, x2, x1, f).unwrap());
    }

    #[test]
    fn matches_explicit_resolve() {
        let model = LevyModel::two_point(1.0, 5.0, 1.0).unwrap();
        let w = window();
        for rep in 0..20 {
            let cfg = sample_prm(&model, &w, StreamKey::new(11, rep, Purpose::Noise));
            let sol = solve_fast(&cfg);
            let xi1 = Atom::new(0.1 + 0.02 * rep as f64, -0.3 + 0.03 * rep as f64, 1.0);
            let xi2 = Atom::new(0.35, 0.1, -1.0);
            for f in [
                Functional::PointValue { x: 0.2 },
                Functional::SpatialIntegral { theta: 2.0 },
            ] {
                let base = resolve(&cfg, &[], f);
                let one = resolve(&cfg, &[xi1], f) - base;
                let d = add_one_cost(&sol, xi1, f).unwrap();
                assert!((d - one).abs() < 1e-10 * one.abs().max(1.0), "rep {rep}");
                let two = resolve(&cfg, &[xi1, xi2], f)
                    - resolve(&cfg, &[xi1], f)
                    - resolve(&cfg, &[xi2], f)
                    + base;
                let dd = second_add_one_cost(&sol, xi1, xi2, f).unwrap();
                assert!((dd - two).abs() < 1e-10 * two.abs().max(1.0), "rep {rep}");
            }
        }
    }

    #[test]
    fn rejects_bad_atoms_and_small_windows() {
        let sol = solve_naive(&PointConfiguration::empty(window()));
        let f = Functional::PointValue { x: 0.0 };
        assert!(add_one_cost(&sol, Atom::new(0.1, 0.0, 0.0), f).is_err());
        let far = Functional::SpatialIntegral { theta: 3.5 };
        assert!(matches!(
            add_one_cost(&sol, Atom::new(0.1, 0.0, 1.0), far),
            Err(LabError::Coverage { .. })
        ));
    }
}
