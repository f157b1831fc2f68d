//! Projection-based surface descriptors for triangle meshes.
//!
//! A mesh is summarized by two even functions on the unit sphere: its
//! breadth (length of the projection onto a line) and its weighted area
//! (area of the projection onto a plane, counted with multiplicity). Raw
//! samples of these functions are translation-invariant; the per-degree
//! energies of their spherical-harmonic expansions are rotation-invariant,
//! and after normalization similarity-invariant. Sequences of meshes become
//! polygonal curves compared by dynamic time warping, and corpora are scored
//! with nearest-neighbor / first-tier / second-tier retrieval statistics.

pub mod descriptors;
mod direction;
pub mod error;
pub mod harmonics;
pub mod manifest;
pub mod mesh;
pub mod motion;
pub mod projection;
pub mod retrieval;
pub mod synth;

pub use descriptors::{DescriptorKind, DescriptorParams, DescriptorVector, Extractor, FrameFunction, ShapeInvariantMatrix};
pub use direction::Direction;
pub use error::{Error, Result};
pub use mesh::{load_mesh, TriMesh};
pub use motion::{MeshSequence, MotionCurve};
pub use retrieval::{DistanceMatrix, Metric};
