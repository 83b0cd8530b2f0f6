//! Dense complex linear algebra and polynomial utilities.

pub mod eigen;
pub mod matrix;
pub mod poly;
pub mod random;
pub mod solve;
pub mod svd;

pub use eigen::{char_poly, char_poly_adjugate, eigenvalues_dense, hermitian_eigenvalues, hessenberg, CharPolyAdjugate};
pub use matrix::{CMatrix, CVector};
pub use poly::{cluster_roots, match_roots, poly_roots, CPoly, RootCluster};
pub use solve::{solve_linear, Lu};
pub use svd::singular_values;

pub use num_complex::Complex64 as C64;
