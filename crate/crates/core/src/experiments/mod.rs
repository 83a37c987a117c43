//! The limit theorems as numerical experiments.
//!
//! Every experiment draws replication `r` from the stream
//! `(seed, r, purpose)`, so tables are identical for any thread count.

mod asclt;
mod clt;
mod cov_decay;
mod il;
mod lemma1;
mod log_average;
mod poincare;

pub use asclt::{asclt_experiment, default_checkpoints, AscltConfig, AscltCurve, AscltMode, AscltReport};
pub use clt::{clt_experiment, CltConfig, CltReport, CltRow};
pub use cov_decay::{covariance_decay_experiment, CovDecayConfig, CovDecayReport, CovDecayRow};
pub use il::{il_criterion_scan, il_statistic, IlConfig, IlReport, IlRow};
pub use lemma1::{lemma1_curve, lemma1_demo, Lemma1Config, Lemma1Point, Lemma1Report, TestFunction};
pub use log_average::{log_average, log_cells, log_mean};
pub use poincare::{
    poincare_gamma_check, Gamma3Row, PoincareConfig, PoincareReport, PoincareRow, StructureRow,
};

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::levy::LevyModel;
use crate::oracle::MomentOracle;
use crate::rng::{Purpose, StreamKey};

/// Model, horizon and reproducibility settings shared by all experiments.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Setup {
    pub model: LevyModel,
    pub t0: f64,
    pub seed: u64,
    /// Worker threads; `None` uses every core. Never affects results.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Setup {
    pub fn new(model: LevyModel, t0: f64, seed: u64) -> Self {
        Self {
            model,
            t0,
            seed,
            threads: None,
        }
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }

    pub fn key(&self, replication: u64, purpose: Purpose) -> StreamKey {
        StreamKey::new(self.seed, replication, purpose)
    }

    pub fn oracle(&self) -> Result<MomentOracle> {
        self.model.ensure_centered()?;
        MomentOracle::for_model(&self.model, self.t0)
    }

    /// The oracle, or a diagnostic when the noise is trivial and `F̃_θ` is
    /// undefined.
    pub fn nondegenerate_oracle(&self) -> Result<MomentOracle> {
        let oracle = self.oracle()?;
        if oracle.m2() <= 0.0 {
            return Err(LabError::Degenerate(
                "noise has λ = 0 (or m2 = 0): F_θ ≡ 0 and σ_θ = 0, so F_θ/σ_θ is undefined".into(),
            ));
        }
        Ok(oracle)
    }
}

/// `2^k` for `lo <= 2^k <= hi`.
pub fn dyadic(lo: f64, hi: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut t = 1.0;
    while t <= hi {
        if t >= lo {
            out.push(t);
        }
        t *= 2.0;
    }
    out
}
