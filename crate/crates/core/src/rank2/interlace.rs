use crate::error::{Error, Result};
use crate::numcore::{CMatrix, CVector, C64};
use crate::weyl::weyl_partial_fractions;

/// An eigenvalue counts as real when `|Im| < REAL_TOL (1 + |lambda|)`.
pub const REAL_TOL: f64 = 1e-8;
/// Entries of two spectra closer than this are a tie.
pub const TIE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct InterlacingDiagnostics {
    pub applies: bool,
    /// Pole of the hyperbola `-(1-s)(1-t) / ((s + t - st) x + st m)`.
    pub x0: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub m: f64,
    pub q: f64,
}

/// Sufficient condition for the spectrum of `A - s u (Au)* - t (Au) u*` to
/// interlace with that of `A`: the hyperbola pole `x0 = st m / (st - s - t)`
/// lies outside `[min lambda, max lambda]`.
pub fn interlacing_condition(a: &CMatrix, u: &CVector, s: f64, t: f64) -> Result<InterlacingDiagnostics> {
    if !a.is_hermitian(1e-12) {
        return Err(Error::NotSelfAdjoint(a.hermitian_defect()));
    }
    if (u.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::HypothesisViolated(format!("|u| = {} is not 1", u.norm())));
    }
    let denom = s * t - s - t;
    if denom.abs() <= 1e-14 * (1.0 + (s * t).abs()) {
        return Err(Error::HypothesisViolated("st = s + t".into()));
    }
    let pf = weyl_partial_fractions(a, u, u).map_err(|e| match e {
        Error::DegenerateSpectrum(msg) => Error::HypothesisViolated(format!("spectrum is not simple: {msg}")),
        other => other,
    })?;
    if !pf.is_generic() {
        return Err(Error::HypothesisViolated("some weight c_j vanishes".into()));
    }
    let lambda: Vec<f64> = pf.poles().iter().map(|l| l.re).collect();
    let lambda_min = lambda.iter().copied().fold(f64::INFINITY, f64::min);
    let lambda_max = lambda.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let m = a.mul_vec(u).inner(u).re;
    let x0 = s * t * m / denom;
    Ok(InterlacingDiagnostics {
        applies: x0 < lambda_min || x0 > lambda_max,
        x0,
        lambda_min,
        lambda_max,
        m,
        q: (1.0 - s) * (1.0 - t),
    })
}

/// Real parts, ascending, after checking every eigenvalue is real.
pub fn real_spectrum(eigs: &[C64]) -> Result<Vec<f64>> {
    if let Some(z) = eigs.iter().find(|z| z.im.abs() >= REAL_TOL * (1.0 + z.norm())) {
        return Err(Error::ComplexSpectrum(format!("eigenvalue {z}")));
    }
    let mut re: Vec<f64> = eigs.iter().map(|z| z.re).collect();
    re.sort_by(f64::total_cmp);
    Ok(re)
}

/// Strict interlacing: the merged sorted list alternates between the two
/// spectra. Ties closer than `TIE_TOL` are rejected.
pub fn verify_interlacing(a: &[f64], b: &[f64]) -> Result<bool> {
    let mut merged: Vec<(f64, u8)> = a.iter().map(|&x| (x, 0)).chain(b.iter().map(|&x| (x, 1))).collect();
    merged.sort_by(|p, q| p.0.total_cmp(&q.0));
    if let Some(w) = merged.windows(2).find(|w| (w[1].0 - w[0].0).abs() < TIE_TOL) {
        return Err(Error::DegenerateSpectrum(format!("entries {} and {} coincide", w[0].0, w[1].0)));
    }
    if a.len().abs_diff(b.len()) > 1 {
        return Ok(false);
    }
    Ok(merged.windows(2).all(|w| w[0].1 != w[1].1))
}
