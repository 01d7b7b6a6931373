//! Numerical toolkit for Wiener-Hopf operators over semigroup actions.

pub mod error;
pub mod spectra;

pub use error::{Error, Result};
pub mod jordan;
pub mod sampling;
pub mod moebius;
pub mod fell;
pub mod toeplitz;
pub mod groupoid;
pub mod fibers;
pub mod homotopy;
pub mod io;
pub mod cli;
