//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("mesh format error in {path}: {message}")]
    MeshFormat { path: PathBuf, message: String },

    #[error("empty or degenerate mesh: {0}")]
    EmptyMesh(String),

    #[error("invalid transform: {0}")]
    InvalidTransform(String),

    #[error("degenerate entity {0}: zero footprint")]
    DegenerateEntity(String),

    #[error("entity {0} has no supporting candidate and the scene has no floor")]
    OrphanEntity(String),

    #[error("box refinement for {entity}: supporting plane at {plane_height} lies above the box top {box_top}")]
    RefinementInvertsBox {
        entity: String,
        plane_height: f64,
        box_top: f64,
    },

    #[error("JSON error at {pointer} in {path}: {message}")]
    JsonSchema {
        path: PathBuf,
        pointer: String,
        message: String,
    },

    #[error("CAD database error: {0}")]
    CadDb(String),

    #[error("scene input error: {0}")]
    SceneInput(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("export error: {0}")]
    Export(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
