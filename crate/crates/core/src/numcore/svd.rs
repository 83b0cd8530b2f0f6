use num_complex::Complex64 as C64;

use super::matrix::CMatrix;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// Singular values, descending, `min(rows, cols)` of them padded with zeros
/// up to `cols`.
///
/// One-sided Jacobi rotations on the columns; small singular values keep
/// high relative accuracy.
pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    let (rows, cols) = (m.rows(), m.cols());
    let work = if rows >= cols { m.clone() } else { m.adjoint() };
    let (r, c) = (work.rows(), work.cols());
    let mut colv: Vec<Vec<C64>> = (0..c).map(|j| (0..r).map(|i| work[(i, j)]).collect()).collect();
    let tol = f64::EPSILON * r as f64;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..c {
            for q in p + 1..c {
                let alpha: f64 = colv[p].iter().map(|x| x.norm_sqr()).sum();
                let beta: f64 = colv[q].iter().map(|x| x.norm_sqr()).sum();
                let gamma: C64 = colv[p].iter().zip(&colv[q]).map(|(a, b)| a.conj() * b).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for i in 0..r {
                    let a = colv[p][i];
                    let b = colv[q][i] * phase.conj();
                    colv[p][i] = a * cs - b * sn;
                    colv[q][i] = a * sn + b * cs;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence(format!("Jacobi SVD after {MAX_SWEEPS} sweeps")));
    }
    let mut sv: Vec<f64> = colv.iter().map(|v| v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv.resize(cols.max(sv.len()), 0.0);
    sv.truncate(cols);
    Ok(sv)
}
