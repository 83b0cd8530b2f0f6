use crate::error::{Error, Result};
use crate::numcore::{eigenvalues_dense, singular_values, CMatrix, CVector, C64};
use crate::weyl::{check_dims, Resolvent};

pub const DEFAULT_EPS: [f64; 3] = [1e-3, 1e-4, 1e-5];
/// Eigenvalues of `A` closer than this to `lambda0` belong to the chain.
pub const CHAIN_TOL: f64 = 1e-6;
/// Relative tolerance on the imaginary part (resp. magnitude) of `a_{-2}`.
pub const AXIS_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxisVerdict {
    Stays,
    Leaves,
}

#[derive(Clone, Debug)]
pub struct PhaseTransitionReport {
    pub verdict: AxisVerdict,
    /// Extrapolated coefficient of `(lambda0 - z)^{-2}` in `Q_{u,w} + Q_{g,h}`.
    pub a_minus2: C64,
    /// `-eps^2 F(lambda0 + i eps)` for each supplied `eps`.
    pub estimates: Vec<C64>,
    /// Richardson combinations of consecutive estimates.
    pub extrapolated: Vec<C64>,
    /// `F(lambda0 + i eps)` is real at the smallest `eps`.
    pub direct_test_real: bool,
    /// `a_{-2}` lies on the imaginary axis.
    pub purely_imaginary: bool,
    /// `a_{-2}` vanishes, so the leading-order law is silent.
    pub degenerate: bool,
}

fn has_jordan_chain(a: &CMatrix, lambda0: C64) -> Result<()> {
    let n = a.rows();
    let near = eigenvalues_dense(a)?.iter().filter(|l| (*l - lambda0).norm() < CHAIN_TOL).count();
    if near < 2 {
        return Err(Error::NoJordanChain(format!("{lambda0}: {near} eigenvalue(s) nearby")));
    }
    let scale = a.max_abs().max(1.0);
    let sv = singular_values(&a.shift(lambda0))?;
    let smallest = sv[n - 1];
    let second = sv[n - 2];
    if smallest > 1e-7 * scale {
        return Err(Error::NoJordanChain(format!("{lambda0} is not an eigenvalue (sigma_min {smallest:e})")));
    }
    if second <= 1e-4 * scale {
        return Err(Error::NoJordanChain(format!("{lambda0} has geometric multiplicity above one")));
    }
    Ok(())
}

/// Decides whether the eigenvalue pair born from a length-two Jordan chain at
/// `lambda0` stays on the line through `lambda0` in direction `i` under
/// `A - s(uw* + gh*)` for small `s > 0`. The pair moves as
/// `lambda0 +- sqrt(-s a_{-2})`, so it stays exactly when `a_{-2} > 0`.
pub fn phase_transition_check(
    a: &CMatrix,
    u: &CVector,
    w: &CVector,
    g: &CVector,
    h: &CVector,
    lambda0: C64,
    eps: &[f64],
) -> Result<PhaseTransitionReport> {
    check_dims(a, &[u, w, g, h])?;
    if eps.len() < 2 || eps.windows(2).any(|p| !(p[1] < p[0]) || p[1] <= 0.0) {
        return Err(Error::InvalidParams("eps must be a decreasing positive sequence of length >= 2".into()));
    }
    has_jordan_chain(a, lambda0)?;

    let mut estimates = Vec::with_capacity(eps.len());
    let mut last_f = C64::new(0.0, 0.0);
    for &e in eps {
        let r = Resolvent::new(a, lambda0 + C64::new(0.0, e))?;
        last_f = r.q(u, w) + r.q(g, h);
        estimates.push(-e * e * last_f);
    }
    let extrapolated: Vec<C64> = (1..eps.len())
        .map(|k| {
            let (e1, e2) = (eps[k - 1], eps[k]);
            (e1 * estimates[k] - e2 * estimates[k - 1]) / (e1 - e2)
        })
        .collect();
    let a_minus2 = *extrapolated.last().unwrap();
    let tol = 1e-4 * a_minus2.norm().max(1.0);
    for pair in extrapolated.windows(2) {
        if (pair[1] - pair[0]).norm() > tol {
            return Err(Error::InconsistentExtrapolation(format!("{} vs {}", pair[0], pair[1])));
        }
    }

    let size = a_minus2.norm().max(1.0);
    let degenerate = a_minus2.norm() <= AXIS_TOL;
    let real_positive = a_minus2.im.abs() <= AXIS_TOL * size && a_minus2.re > 0.0;
    let verdict = if degenerate || real_positive { AxisVerdict::Stays } else { AxisVerdict::Leaves };
    Ok(PhaseTransitionReport {
        verdict,
        a_minus2,
        estimates,
        extrapolated,
        direct_test_real: last_f.im.abs() <= AXIS_TOL * last_f.norm().max(1.0),
        purely_imaginary: a_minus2.re.abs() <= AXIS_TOL * size,
        degenerate,
    })
}
