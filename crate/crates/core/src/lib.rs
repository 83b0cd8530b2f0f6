//! Spectra of rank-two perturbations of matrices and of spectral measures.

pub mod cli;
pub mod error;
pub mod measures;
pub mod meixner;
pub mod numcore;
pub mod rank2;
pub mod singvals;
pub mod weyl;

pub use error::{Error, Result};
pub use numcore::{CMatrix, CPoly, CVector, C64};
