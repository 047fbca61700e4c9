//! Envelope-function model of a stacked quantum dot pair.

pub mod basis3d;
pub mod coulombk;
pub mod dipole;
mod eigen;
pub mod error;
mod expsum;
pub mod dynamics;
pub mod geometry;
pub mod qubits;
pub mod units;
pub mod wells1d;

pub use error::{Error, Result};
pub use geometry::{DotGeometry, MaterialParams, MoleculeConfig, Species};
