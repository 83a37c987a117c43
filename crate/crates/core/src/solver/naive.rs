use super::SolutionAtoms;
use crate::levy::PointConfiguration;

/// Quadratic-time reference solver; sums predecessors in ascending index
/// order.
pub fn solve_naive(config: &PointConfiguration) -> SolutionAtoms {
    let atoms = config.atoms();
    let mut values = Vec::with_capacity(atoms.len());
    for (i, ai) in atoms.iter().enumerate() {
        let mut s = 0.0;
        for (aj, uj) in atoms[..i].iter().zip(&values) {
            if aj.precedes(ai) {
                s += aj.z * uj;
            }
        }
        values.push(1.0 + 0.5 * s);
    }
    SolutionAtoms::new(config, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::{Atom, SpaceTimeWindow};

    fn window() -> SpaceTimeWindow {
        SpaceTimeWindow::new(1.0, -3.0, 3.0).unwrap()
    }

    #[test]
    fn empty_configuration() {
        let sol = solve_naive(&PointConfiguration::empty(window()));
        assert!(sol.is_empty());
        assert_eq!(super::super::direct_value(&sol, 0.3), 1.0);
    }

    #[test]
    fn single_atom_has_unit_value() {
        let cfg = PointConfiguration::new(window(), vec![Atom::new(0.5, 0.0, 2.0)]).unwrap();
        assert_eq!(solve_naive(&cfg).values(), &[1.0]);
    }

    #[test]
    fn nested_pair() {
        let cfg = PointConfiguration::new(
            window(),
            vec![Atom::new(0.25, 0.0, 0.5), Atom::new(0.5, 0.125, -1.0)],
        )
        .unwrap();
        let sol = solve_naive(&cfg);
        assert_eq!(sol.values(), &[1.0, 1.25]);
        let u = super::super::direct_value(&sol, 0.0);
        assert_eq!(u, 1.0 + 0.25 - 0.5 * 1.25);
    }

    #[test]
    fn simultaneous_atoms_do_not_interact() {
        let cfg = PointConfiguration::new(
            window(),
            vec![Atom::new(0.5, 0.0, 1.0), Atom::new(0.5, 0.0, 1.0)],
        )
        .unwrap();
        assert_eq!(solve_naive(&cfg).values(), &[1.0, 1.0]);
    }
}
