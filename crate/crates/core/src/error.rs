use thiserror::Error;

/// Errors raised across the laboratory.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("model rejected: drift {drift:e} != 0 (only centered Lévy measures are supported)")]
    NonCentered { drift: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "window [{x_min}, {x_max}] does not cover the light cone of [{need_min}, {need_max}]"
    )]
    Coverage {
        x_min: f64,
        x_max: f64,
        need_min: f64,
        need_max: f64,
    },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;
