//! Non-stationary subdivision surfaces on quad meshes.
//!
//! The crate covers mesh handling and topological refinement ([`mesh`]),
//! masks and symbols ([`symbols`]), the trigonometric Doo-Sabin and
//! exponential Catmull-Clark families ([`schemes`]), block-circulant local
//! matrices around extraordinary elements ([`localmatrix`]) and the checks
//! for convergence and normal continuity at the extraordinary point
//! ([`analyzer`]).

pub mod analyzer;
pub mod error;
pub mod grid;
pub mod localmatrix;
pub mod mesh;
pub mod schemes;
pub mod symbols;

pub use error::{Error, Result};

/// A point in model space.
pub type Vec3 = [f64; 3];
