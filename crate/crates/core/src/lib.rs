//! Direct and inverse-adjacent scattering for matrix Schrödinger operators on the
//! half-line with general self-adjoint boundary conditions, plus the associated
//! wave operators and their reduction from the full line.

#![allow(clippy::needless_range_loop)]

pub mod boundary;
pub mod error;
pub mod field;
pub mod io;
pub mod jost;
pub mod line;
pub mod linalg;
pub mod ode;
pub mod potentials;
pub mod quad;
pub mod scattering;
pub mod spectral;
pub mod verify;
pub mod waveop;

pub use error::{Result, ScatterError};
