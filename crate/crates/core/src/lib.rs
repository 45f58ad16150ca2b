//! Pseudo-spectral solvers for the rotational Burgers and rotational
//! Kuramoto–Sivashinsky equations on the periodic box `[-π, π)^D`.

pub mod blowup;
pub mod burgers2d;
pub mod burgers3d;
pub mod config;
pub mod diagnostics;
pub mod driver;
pub mod error;
pub mod fft;
pub mod forcing;
pub mod field;
pub mod grid;
pub mod initial;
pub mod io;
pub mod kse;
pub mod norms;
pub mod runner;
pub mod verify;
pub mod ops;

pub use error::{Error, Result};
pub use field::{
    RealField, RealField2, RealField3, SpectralField, SpectralField2, SpectralField3,
    VectorField, VectorField2, VectorField3,
};
pub use grid::{Grid, Grid2, Grid3};
