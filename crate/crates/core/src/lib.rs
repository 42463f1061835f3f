//! Reconstruction of interactive indoor scenes from segmented meshes.
//!
//! The library turns a set of segmented scene entities (or a stream of
//! labeled per-frame point-cloud segments) into a physically plausible,
//! simulator-ready scene description:
//!
//! 1. [`fusion`] — fuses labeled segment streams into scene entities.
//! 2. [`graph`] — builds a contact graph: a support parse tree plus
//!    proximal edges, with support-based bounding-box refinement.
//! 3. [`cad`] — loads and canonicalizes a database of rigid and
//!    articulated CAD models and precomputes per-orientation features.
//! 4. [`matching`] — ranks (model, orientation) candidates per entity by a
//!    matching distance over box sizes, surface planes, and uprightness.
//! 5. [`alignment`] — refines shortlisted candidates with a damped
//!    least-squares fit of a yaw-constrained similarity transform.
//! 6. [`validation`] — selects a globally consistent candidate assignment
//!    via min-conflict search over support and collision constraints.
//! 7. [`export`] — emits URDF plus a JSON contact-graph document.
//!
//! [`pipeline`] wires the stages together behind a single configuration;
//! [`synth`] generates deterministic synthetic databases, scenes, and
//! segment streams for testing and demos.

pub mod alignment;
pub mod cad;
pub mod config;
pub mod error;
pub mod export;
pub mod fusion;
pub mod geometry;
pub mod graph;
pub(crate) mod jsonio;
pub mod matching;
pub mod mesh_io;
pub mod pipeline;
pub mod synth;
pub mod validation;

pub use error::{Error, Result};
