#![allow(clippy::needless_range_loop)]

pub mod continuum;
pub mod designer;
pub mod error;
pub mod geometry;
pub mod gravity_action;
pub mod grid;
pub mod lattice;
pub mod manybody;
pub mod params;
pub mod samples;
pub mod symbolic;
pub mod tensor;

pub use error::{Category, Error, Result};
pub use grid::{Grid2D, TimeBoundary};
pub use params::ModelParams;
