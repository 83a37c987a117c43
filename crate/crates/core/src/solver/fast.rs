//! Time divide-and-conquer over the light-cone dominance order.
//!
//! In coordinates `a = y + s`, `b = y - s` atom `j` precedes atom `i` iff
//! `a_j < a_i` and `b_j > b_i`. After the left half of a time block is
//! solved, its contribution to every atom of the right half is a
//! two-dimensional dominance sum: sweep the right half by `a`, insert left
//! atoms with smaller `a`, and query a Fenwick tree over descending `b`.

use super::SolutionAtoms;
use crate::levy::PointConfiguration;

const LEAF: usize = 32;

struct Fenwick {
    tree: Vec<f64>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Self {
            tree: vec![0.0; n + 1],
        }
    }

    fn add(&mut self, index: usize, v: f64) {
        let mut i = index + 1;
        while i < self.tree.len() {
            self.tree[i] += v;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum over indices `< count`.
    fn prefix(&self, count: usize) -> f64 {
        let mut i = count;
        let mut s = 0.0;
        while i > 0 {
            s += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
}

struct Cdq<'a> {
    a: &'a [f64],
    b: &'a [f64],
    z: &'a [f64],
    acc: Vec<f64>,
    u: Vec<f64>,
}

impl Cdq<'_> {
    fn precedes(&self, j: usize, i: usize) -> bool {
        self.a[j] < self.a[i] && self.b[j] > self.b[i]
    }

    fn solve(&mut self, lo: usize, hi: usize) {
        if hi - lo <= LEAF {
            for i in lo..hi {
                let mut s = self.acc[i];
                for j in lo..i {
                    if self.precedes(j, i) {
                        s += self.z[j] * self.u[j];
                    }
                }
                self.u[i] = 1.0 + 0.5 * s;
            }
            return;
        }
        let mid = lo + (hi - lo) / 2;
        self.solve(lo, mid);
        self.cross(lo, mid, hi);
        self.solve(mid, hi);
    }

    fn cross(&mut self, lo: usize, mid: usize, hi: usize) {
        let mut left: Vec<usize> = (lo..mid).collect();
        let mut right: Vec<usize> = (mid..hi).collect();
        left.sort_by(|&p, &q| self.a[p].total_cmp(&self.a[q]));
        right.sort_by(|&p, &q| self.a[p].total_cmp(&self.a[q]));
        let mut bs: Vec<f64> = (lo..mid).map(|j| self.b[j]).collect();
        bs.sort_by(f64::total_cmp);
        let m = bs.len();
        let mut tree = Fenwick::new(m);
        let mut next = 0;
        for &i in &right {
            while next < m && self.a[left[next]] < self.a[i] {
                let j = left[next];
                let pos = bs.partition_point(|&v| v < self.b[j]);
                tree.add(m - 1 - pos, self.z[j] * self.u[j]);
                next += 1;
            }
            if next == 0 {
                continue;
            }
            let above = m - bs.partition_point(|&v| v <= self.b[i]);
            self.acc[i] += tree.prefix(above);
        }
    }
}

/// `O(n log² n)` solver with the same contract as
/// [`solve_naive`](super::solve_naive).
pub fn solve_fast(config: &PointConfiguration) -> SolutionAtoms {
    let atoms = config.atoms();
    let n = atoms.len();
    let a: Vec<f64> = atoms.iter().map(|p| p.cone_coords().0).collect();
    let b: Vec<f64> = atoms.iter().map(|p| p.cone_coords().1).collect();
    let z: Vec<f64> = atoms.iter().map(|p| p.z).collect();
    let mut cdq = Cdq {
        a: &a,
        b: &b,
        z: &z,
        acc: vec![0.0; n],
        u: vec![0.0; n],
    };
    if n > 0 {
        cdq.solve(0, n);
    }
    SolutionAtoms::new(config, cdq.u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::{sample_prm, LevyModel, SpaceTimeWindow};
    use crate::rng::{Purpose, StreamKey};
    use crate::solver::solve_naive;

    #[test]
    fn fenwick_prefix_sums() {
        let mut f = Fenwick::new(5);
        for (i, v) in [1.0, 2.0, 3.0, 4.0, 5.0].into_iter().enumerate() {
            f.add(i, v);
        }
        assert_eq!(f.prefix(0), 0.0);
        assert_eq!(f.prefix(3), 6.0);
        assert_eq!(f.prefix(5), 15.0);
    }

    #[test]
    fn matches_naive_across_leaf_boundaries() {
        let model = LevyModel::uniform(1.5, 40.0, 1.0).unwrap();
        let window = SpaceTimeWindow::new(1.0, -2.0, 2.0).unwrap();
        for rep in 0..5 {
            let cfg = sample_prm(&model, &window, StreamKey::new(7, rep, Purpose::Noise));
            assert!(cfg.len() > 2 * LEAF);
            let fast = solve_fast(&cfg);
            let naive = solve_naive(&cfg);
            assert!(fast.max_relative_deviation(&naive) < 1e-12);
        }
    }

    #[test]
    fn empty_and_tiny() {
        let window = SpaceTimeWindow::new(1.0, 0.0, 1.0).unwrap();
        let cfg = PointConfiguration::empty(window);
        assert!(solve_fast(&cfg).is_empty());
    }
}
