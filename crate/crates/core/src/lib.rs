//! Polyorders and segment-wise dominance for scalar and vector fields.

pub mod casestudy;
pub mod classify;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod polyorder;
pub mod popgame;
pub mod registry;
pub mod sampling;

pub use error::{Error, Result};
pub use field::{Domain, Point, ScalarField, Simplex, VectorField};
pub use polyorder::{DominanceVerdict, Relation, ToleranceConfig};
