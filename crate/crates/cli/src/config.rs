//! `key = value` experiment configuration with flag overrides.

use std::collections::BTreeMap;
use std::path::Path;

use hamlab::levy::LevyModel;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Keys accepted in config files, in canonical order.
pub const KEYS: &[&str] = &[
    "model",
    "alpha",
    "t0",
    "seed",
    "reps",
    "theta",
    "theta_max",
    "per_decade",
    "ws",
    "f",
    "mode",
    "perturbations",
    "zero_field",
];

/// Effective configuration: file values overridden by flags. Output paths
/// and thread counts are deliberately not part of it.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentConfig {
    values: BTreeMap<String, String>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected key = value, got {raw:?}", n + 1))
            })?;
            let k = k.trim().replace('-', "_");
            if !KEYS.contains(&k.as_str()) {
                return Err(CliError::Config(format!("line {}: unknown key {k:?}", n + 1)));
            }
            values.insert(k, v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        debug_assert!(KEYS.contains(&key));
        self.values.insert(key.to_string(), value.to_string());
    }

    pub fn set_default(&mut self, key: &str, value: impl ToString) {
        self.values
            .entry(key.to_string())
            .or_insert_with(|| value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn required(&self, key: &str) -> Result<&str, CliError> {
        self.get(key)
            .ok_or_else(|| CliError::Config(format!("missing value for {key}")))
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        let v = self.required(key)?;
        v.parse()
            .map_err(|_| CliError::Config(format!("{key} must be a number, got {v:?}")))
    }

    pub fn u64(&self, key: &str) -> Result<u64, CliError> {
        let v = self.required(key)?;
        v.parse()
            .map_err(|_| CliError::Config(format!("{key} must be a nonnegative integer, got {v:?}")))
    }

    pub fn usize(&self, key: &str) -> Result<usize, CliError> {
        Ok(self.u64(key)? as usize)
    }

    pub fn bool(&self, key: &str) -> Result<bool, CliError> {
        match self.required(key)? {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            v => Err(CliError::Config(format!("{key} must be true or false, got {v:?}"))),
        }
    }

    pub fn list(&self, key: &str) -> Result<Vec<f64>, CliError> {
        parse_list(self.required(key)?)
            .map_err(|v| CliError::Config(format!("{key} must be a comma-separated list of numbers, got {v:?}")))
    }

    pub fn model(&self) -> Result<LevyModel, CliError> {
        let alpha = self.f64("alpha")?;
        let model = parse_model(self.required("model")?, alpha)?;
        model.ensure_centered()?;
        Ok(model)
    }

    /// Canonical `key=value` lines.
    pub fn canonical(&self) -> Vec<(String, String)> {
        KEYS.iter()
            .filter_map(|k| self.values.get(*k).map(|v| (k.to_string(), v.clone())))
            .collect()
    }

    /// SHA-256 of the canonical lines, hex encoded.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in self.canonical() {
            h.update(format!("{k}={v}\n").as_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub fn parse_list(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| text.to_string()))
        .collect()
}

/// `two_point:size=1,mass=5`, `uniform:half_width=1,mass=3` or
/// `atoms:1@0.5,-1@0.5` (`size@mass`).
pub fn parse_model(spec: &str, alpha: f64) -> Result<LevyModel, CliError> {
    let bad = |msg: String| CliError::Config(format!("model {spec:?}: {msg}"));
    let (kind, params) = spec.split_once(':').unwrap_or((spec, ""));
    let named = || -> Result<BTreeMap<&str, f64>, CliError> {
        let mut m = BTreeMap::new();
        for part in params.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| bad(format!("expected name=value, got {part:?}")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| bad(format!("{k} is not a number")))?;
            m.insert(k.trim(), v);
        }
        Ok(m)
    };
    let take = |m: &BTreeMap<&str, f64>, k: &str| {
        m.get(k).copied().ok_or_else(|| bad(format!("missing {k}")))
    };
    let model = match kind.trim() {
        "two_point" => {
            let m = named()?;
            LevyModel::two_point(take(&m, "size")?, take(&m, "mass")?, alpha)?
        }
        "uniform" => {
            let m = named()?;
            LevyModel::uniform(take(&m, "half_width")?, take(&m, "mass")?, alpha)?
        }
        "atoms" => {
            let mut atoms = Vec::new();
            for part in params.split(',').filter(|p| !p.trim().is_empty()) {
                let (z, w) = part
                    .split_once('@')
                    .ok_or_else(|| bad(format!("expected size@mass, got {part:?}")))?;
                let z: f64 = z.trim().parse().map_err(|_| bad(format!("bad size {z:?}")))?;
                let w: f64 = w.trim().parse().map_err(|_| bad(format!("bad mass {w:?}")))?;
                atoms.push((z, w));
            }
            LevyModel::atoms(atoms, alpha)?
        }
        other => return Err(bad(format!("unknown kind {other:?}"))),
    };
    Ok(model)
}
