//! Probability measures through their Cauchy transforms, the U-, t- and
//! W-transforms, Jacobi operator models and Stieltjes inversion.

mod cauchy;
mod jacobi;
mod stieltjes;
mod transforms;

use std::f64::consts::PI;

pub use cauchy::{cauchy_eval, wigner_g, AcDensity, CauchyTransform, SpectralMeasure, DENOM_TOL};
pub use jacobi::{
    jacobi_deform_antidiagonal, jacobi_deform_diagonal, jacobi_u_map, jacobi_w_map, JacobiData, Tridiagonal,
};
pub use stieltjes::{
    detect_atoms, integrate_density, stieltjes_density, stieltjes_invert, Atom, DensitySample, StieltjesResult,
    ATOM_MASS_TOL, DEFAULT_EPS,
};
pub use transforms::{t_transform, u_transform, w_transform, TransformKind, TransformParams, MASS_DROP};

/// Density of the U-transform of the semicircle law with `tau = (1-s)(1-t)`:
/// `tau sqrt(4 - x^2) / (2 pi ((1 - tau) x^2 + tau^2))` on `[-2, 2]`.
pub fn wigner_u_density(tau: f64, x: f64) -> f64 {
    if x.abs() > 2.0 {
        return 0.0;
    }
    tau * (4.0 - x * x).sqrt() / (2.0 * PI * ((1.0 - tau) * x * x + tau * tau))
}

/// Atoms `+- tau / sqrt(tau - 1)` of the same measure; the roots of the
/// denominator are poles on the physical sheet only for `tau > 2`.
pub fn wigner_u_atoms(tau: f64) -> Vec<f64> {
    if tau > 2.0 {
        let x = tau / (tau - 1.0).sqrt();
        vec![-x, x]
    } else {
        vec![]
    }
}

/// Density of `W^{s,t}` of the semicircle law on `[-2, 2]`.
pub fn wigner_w_density(s: f64, t: f64, x: f64) -> f64 {
    if x.abs() > 2.0 {
        return 0.0;
    }
    let den = t * x.powi(3)
        + (t * t + 2.0 * s * t) * x * x
        + (s * s * t + 2.0 * s * t * t + s - 2.0 * t) * x
        + (s * t - 1.0).powi(2)
        + s * s;
    (4.0 - x * x).sqrt() / (2.0 * PI * den)
}
