//! Finite-activity Lévy measures and Poisson random measures on space-time
//! windows.
//!
//! Only centered measures (`∫ z ν(dz) = 0`) are accepted by the solver: the
//! compensator of the noise then integrates to zero against any predictable
//! integrand and the mild equation reduces to a finite sum over atoms.

use rand::Rng;
use rand_distr::weighted::WeightedIndex;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::rng::StreamKey;

/// Jump-size law of the noise, with its total mass kept separately.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum JumpLaw {
    /// Mass λ/2 at `+size` and at `-size`.
    TwoPoint { size: f64 },
    /// Mass λ spread uniformly over `[-half_width, half_width]`.
    Uniform { half_width: f64 },
    /// Explicit `(jump size, mass)` atoms.
    Atoms(Vec<(f64, f64)>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevyModel {
    law: JumpLaw,
    total_mass: f64,
    alpha: f64,
}

impl LevyModel {
    pub fn two_point(size: f64, total_mass: f64, alpha: f64) -> Result<Self> {
        if !(size.is_finite() && size > 0.0) {
            return Err(LabError::InvalidModel(format!(
                "two-point jump size must be finite and > 0, got {size}"
            )));
        }
        Self::build(JumpLaw::TwoPoint { size }, total_mass, alpha)
    }

    pub fn uniform(half_width: f64, total_mass: f64, alpha: f64) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(LabError::InvalidModel(format!(
                "uniform half-width must be finite and > 0, got {half_width}"
            )));
        }
        Self::build(JumpLaw::Uniform { half_width }, total_mass, alpha)
    }

    /// Explicit atoms. The total mass is the sum of the atom masses.
    pub fn atoms(atoms: Vec<(f64, f64)>, alpha: f64) -> Result<Self> {
        if atoms.is_empty() {
            return Err(LabError::InvalidModel("atom list is empty".into()));
        }
        for &(z, mass) in &atoms {
            if !(z.is_finite() && z != 0.0) {
                return Err(LabError::InvalidModel(format!(
                    "jump sizes must be finite and nonzero, got {z}"
                )));
            }
            if !(mass.is_finite() && mass > 0.0) {
                return Err(LabError::InvalidModel(format!(
                    "atom masses must be finite and > 0, got {mass}"
                )));
            }
        }
        let total = atoms.iter().map(|a| a.1).sum();
        Self::build(JumpLaw::Atoms(atoms), total, alpha)
    }

    fn build(law: JumpLaw, total_mass: f64, alpha: f64) -> Result<Self> {
        // λ = 0 is admitted as the noiseless degenerate model; experiments
        // that need σ_θ > 0 reject it later with a diagnostic.
        if !(total_mass.is_finite() && total_mass >= 0.0) {
            return Err(LabError::InvalidModel(format!(
                "total mass must be finite and >= 0, got {total_mass}"
            )));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(LabError::InvalidModel(format!(
                "alpha must lie in (0, 1], got {alpha}"
            )));
        }
        Ok(Self {
            law,
            total_mass,
            alpha,
        })
    }

    pub fn law(&self) -> &JumpLaw {
        &self.law
    }

    /// λ = ν(ℝ₀).
    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `m_p = ∫ |z|^p ν(dz)` for `p >= 1`.
    pub fn moment(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(LabError::Domain(format!("moment order must be >= 1, got {p}")));
        }
        let lambda = self.total_mass;
        let m = match &self.law {
            JumpLaw::TwoPoint { size } => lambda * size.powf(p),
            JumpLaw::Uniform { half_width } => lambda * half_width.powf(p) / (p + 1.0),
            JumpLaw::Atoms(atoms) => atoms.iter().map(|&(z, w)| z.abs().powf(p) * w).sum(),
        };
        if !m.is_finite() {
            return Err(LabError::Domain(format!("m_{p} is not finite")));
        }
        Ok(m)
    }

    /// `m_2`; always finite for a validated model.
    pub fn m2(&self) -> f64 {
        self.moment(2.0).expect("m2 of a validated model")
    }

    /// `∫ z ν(dz)`.
    pub fn drift(&self) -> f64 {
        match &self.law {
            JumpLaw::TwoPoint { .. } | JumpLaw::Uniform { .. } => 0.0,
            JumpLaw::Atoms(atoms) => atoms.iter().map(|&(z, w)| z * w).sum(),
        }
    }

    /// Rejects models with nonzero drift. The tolerance is relative to
    /// `∫ |z| ν(dz)` so that symmetric atom lists pass despite rounding.
    pub fn ensure_centered(&self) -> Result<()> {
        let drift = self.drift();
        let scale = self.moment(1.0)?.max(f64::MIN_POSITIVE);
        if drift.abs() > 1e-12 * scale {
            return Err(LabError::NonCentered { drift });
        }
        Ok(())
    }

    /// Validates the model for use by the solver.
    pub fn validated(self) -> Result<Self> {
        self.ensure_centered()?;
        Ok(self)
    }

    fn jump_sampler(&self) -> JumpSampler {
        match &self.law {
            JumpLaw::TwoPoint { size } => JumpSampler::TwoPoint(*size),
            JumpLaw::Uniform { half_width } => JumpSampler::Uniform(*half_width),
            JumpLaw::Atoms(atoms) => JumpSampler::Atoms(
                atoms.iter().map(|a| a.0).collect(),
                WeightedIndex::new(atoms.iter().map(|a| a.1)).expect("validated masses"),
            ),
        }
    }
}

enum JumpSampler {
    TwoPoint(f64),
    Uniform(f64),
    Atoms(Vec<f64>, WeightedIndex<f64>),
}

impl JumpSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            JumpSampler::TwoPoint(a) => {
                if rng.random::<bool>() {
                    *a
                } else {
                    -*a
                }
            }
            JumpSampler::Uniform(a) => loop {
                let z = rng.random_range(-*a..*a);
                if z != 0.0 {
                    break z;
                }
            },
            JumpSampler::Atoms(sizes, index) => sizes[index.sample(rng)],
        }
    }
}

/// `[0, t0) × [x_min, x_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpaceTimeWindow {
    pub t0: f64,
    pub x_min: f64,
    pub x_max: f64,
}

impl SpaceTimeWindow {
    pub fn new(t0: f64, x_min: f64, x_max: f64) -> Result<Self> {
        if !(t0.is_finite() && t0 > 0.0) {
            return Err(LabError::Domain(format!("horizon t0 must be > 0, got {t0}")));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max >= x_min) {
            return Err(LabError::Domain(format!(
                "spatial bounds must satisfy x_min <= x_max, got [{x_min}, {x_max}]"
            )));
        }
        Ok(Self { t0, x_min, x_max })
    }

    /// Smallest window whose noise determines `u(t0, x)` for every `x ∈ [a, b]`.
    pub fn covering(t0: f64, a: f64, b: f64) -> Result<Self> {
        Self::new(t0, a - t0, b + t0)
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn area(&self) -> f64 {
        self.t0 * self.width()
    }

    /// Whether the window contains the backward light cone of `{t0} × [a, b]`.
    pub fn covers(&self, a: f64, b: f64) -> bool {
        self.x_min <= a - self.t0 && self.x_max >= b + self.t0
    }

    pub fn ensure_covers(&self, a: f64, b: f64) -> Result<()> {
        if self.covers(a, b) {
            Ok(())
        } else {
            Err(LabError::Coverage {
                x_min: self.x_min,
                x_max: self.x_max,
                need_min: a - self.t0,
                need_max: b + self.t0,
            })
        }
    }

    pub fn contains(&self, s: f64, y: f64) -> bool {
        (0.0..self.t0).contains(&s) && y >= self.x_min && y <= self.x_max
    }
}

/// A noise atom at time `s`, position `y`, with jump size `z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Atom {
    pub s: f64,
    pub y: f64,
    pub z: f64,
}

impl Atom {
    pub fn new(s: f64, y: f64, z: f64) -> Self {
        Self { s, y, z }
    }

    /// Light-cone coordinates `(y + s, y - s)`.
    #[inline]
    pub fn cone_coords(&self) -> (f64, f64) {
        (self.y + self.s, self.y - self.s)
    }

    /// Whether `self` lies strictly inside the backward light cone of
    /// `other`, i.e. `|other.y - self.y| < other.s - self.s`.
    ///
    /// Evaluated in light-cone coordinates, where the relation is a strict
    /// product order and therefore exactly transitive in floating point.
    #[inline]
    pub fn precedes(&self, other: &Atom) -> bool {
        let (a, b) = self.cone_coords();
        let (oa, ob) = other.cone_coords();
        a < oa && b > ob
    }

    /// Whether `self` influences `u(t, x)`: `|x - y| < t - s`.
    #[inline]
    pub fn in_backward_cone(&self, t: f64, x: f64) -> bool {
        self.precedes(&Atom::new(t, x, 0.0))
    }
}

/// Atoms of a Poisson random measure restricted to a window, sorted by time.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointConfiguration {
    atoms: Vec<Atom>,
    window: SpaceTimeWindow,
    key: Option<StreamKey>,
}

impl PointConfiguration {
    /// Builds a configuration from arbitrary atoms. Sorting is stable, so
    /// equal times keep insertion order.
    pub fn new(window: SpaceTimeWindow, mut atoms: Vec<Atom>) -> Result<Self> {
        for a in &atoms {
            if !window.contains(a.s, a.y) {
                return Err(LabError::Domain(format!(
                    "atom ({}, {}) lies outside the window",
                    a.s, a.y
                )));
            }
            if !(a.z.is_finite() && a.z != 0.0) {
                return Err(LabError::Domain(format!(
                    "atom jump sizes must be finite and nonzero, got {}",
                    a.z
                )));
            }
        }
        atoms.sort_by(|p, q| p.s.total_cmp(&q.s));
        Ok(Self {
            atoms,
            window,
            key: None,
        })
    }

    pub fn empty(window: SpaceTimeWindow) -> Self {
        Self {
            atoms: Vec::new(),
            window,
            key: None,
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn window(&self) -> &SpaceTimeWindow {
        &self.window
    }

    pub fn t0(&self) -> f64 {
        self.window.t0
    }

    /// The stream this configuration was sampled from, if any.
    pub fn key(&self) -> Option<StreamKey> {
        self.key
    }
}

/// Samples the Poisson random measure with intensity `ds dy ν(dz)` on
/// `window`. Identical keys give bit-identical configurations.
pub fn sample_prm(
    model: &LevyModel,
    window: &SpaceTimeWindow,
    key: StreamKey,
) -> PointConfiguration {
    let mut rng = key.rng();
    let mean = model.total_mass() * window.area();
    let count = if mean > 0.0 {
        Poisson::new(mean).expect("finite positive mean").sample(&mut rng) as usize
    } else {
        0
    };
    let jumps = model.jump_sampler();
    let mut atoms = Vec::with_capacity(count);
    for _ in 0..count {
        let s = rng.random_range(0.0..window.t0);
        let y = if window.width() > 0.0 {
            rng.random_range(window.x_min..window.x_max)
        } else {
            window.x_min
        };
        let z = jumps.sample(&mut rng);
        atoms.push(Atom { s, y, z });
    }
    atoms.sort_by(|p, q| p.s.total_cmp(&q.s));
    PointConfiguration {
        atoms,
        window: *window,
        key: Some(key),
    }
}

/// `count` i.i.d. atoms with law `ds dy ν(dz) / (λ · area)` on `window`,
/// used as importance samples for integrals against the intensity.
pub fn sample_atoms(
    model: &LevyModel,
    window: &SpaceTimeWindow,
    count: usize,
    key: StreamKey,
) -> Result<Vec<Atom>> {
    if model.total_mass() <= 0.0 {
        return Err(LabError::Degenerate(
            "λ = 0: the jump law ν/λ is undefined".into(),
        ));
    }
    let mut rng = key.rng();
    let jumps = model.jump_sampler();
    Ok((0..count)
        .map(|_| {
            let s = rng.random_range(0.0..window.t0);
            let y = if window.width() > 0.0 {
                rng.random_range(window.x_min..window.x_max)
            } else {
                window.x_min
            };
            Atom::new(s, y, jumps.sample(&mut rng))
        })
        .collect())
}
