use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error(transparent)]
    Core(#[from] fractal_wave_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("no arrival above {epsilon:e} at vertex {vertex} before t = {horizon} on level {level}; increase the horizon")]
    HorizonTooShort { level: usize, vertex: usize, epsilon: f64, horizon: f64 },
    #[error("degenerate fit: {usable} usable points, need at least {needed}")]
    DegenerateFit { usable: usize, needed: usize },
    #[error("empty far set: no vertex at distance >= {radius} from the support")]
    EmptyFarSet { radius: f64 },
    #[error("bad trajectory file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn usage(msg: impl Into<String>) -> LabError {
    LabError::Usage(msg.into())
}

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> LabError {
    let path = path.into();
    move |source| LabError::Io { path, source }
}
