use crate::error::{Error, Result};
use crate::numcore::C64;

use super::cauchy::wigner_g;

/// Recurrence coefficients of a Jacobi matrix: diagonal `a_n` and
/// off-diagonal `b_n` (entry between levels `n` and `n + 1`).
///
/// With a tail `(a_inf, b_inf)` every coefficient past the stored ones takes
/// the tail value, and the continued fraction is closed exactly. Without a
/// tail the matrix is finite of size `a.len()`.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobiData {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub tail: Option<(f64, f64)>,
}

impl JacobiData {
    pub fn finite(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.is_empty() || b.len() + 1 < a.len() {
            return Err(Error::InvalidParams(format!("{} diagonal and {} off-diagonal entries", a.len(), b.len())));
        }
        let mut b = b;
        b.truncate(a.len() - 1);
        Self::checked(JacobiData { a, b, tail: None })
    }

    pub fn with_tail(a: Vec<f64>, b: Vec<f64>, a_inf: f64, b_inf: f64) -> Result<Self> {
        Self::checked(JacobiData { a, b, tail: Some((a_inf, b_inf)) })
    }

    fn checked(j: JacobiData) -> Result<Self> {
        let finite = j.a.iter().chain(&j.b).all(|x| x.is_finite());
        let tail_ok = j.tail.map_or(true, |(x, y)| x.is_finite() && y >= 0.0);
        if !finite || !tail_ok || j.b.iter().any(|&x| x < 0.0) {
            return Err(Error::InvalidParams("Jacobi coefficients must be finite with b >= 0".into()));
        }
        Ok(j)
    }

    /// `a_n = 0`, `b_n = 1`: the semicircle law on `[-2, 2]`.
    pub fn wigner() -> Self {
        JacobiData { a: vec![], b: vec![], tail: Some((0.0, 1.0)) }
    }

    pub fn a_at(&self, n: usize) -> f64 {
        match (self.a.get(n), self.tail) {
            (Some(&x), _) => x,
            (None, Some((x, _))) => x,
            (None, None) => 0.0,
        }
    }

    pub fn b_at(&self, n: usize) -> f64 {
        match (self.b.get(n), self.tail) {
            (Some(&x), _) => x,
            (None, Some((_, y))) => y,
            (None, None) => 0.0,
        }
    }

    /// First `n` levels with no tail.
    pub fn truncated(&self, n: usize) -> Self {
        let n = n.max(1);
        JacobiData {
            a: (0..n).map(|k| self.a_at(k)).collect(),
            b: (0..n - 1).map(|k| self.b_at(k)).collect(),
            tail: None,
        }
    }

    /// Cauchy transform `1/(z - a_0 - b_0^2/(z - a_1 - ...))`, evaluated
    /// bottom-up.
    pub fn cauchy(&self, z: C64) -> C64 {
        let (depth, mut g) = match self.tail {
            Some((ai, bi)) => {
                let depth = self.a.len().max(self.b.len());
                (depth, tail_g(z, ai, bi))
            }
            None => (self.a.len(), C64::new(0.0, 0.0)),
        };
        for k in (0..depth).rev() {
            let b = self.b_at(k);
            g = 1.0 / (z - self.a_at(k) - b * b * g);
        }
        g
    }

    /// Tridiagonal matrix of the first `n` levels.
    pub fn matrix(&self, n: usize) -> Tridiagonal {
        let diag = (0..n).map(|k| self.a_at(k)).collect();
        let off: Vec<f64> = (0..n.saturating_sub(1)).map(|k| self.b_at(k)).collect();
        Tridiagonal { diag, upper: off.clone(), lower: off }
    }
}

/// Constant-coefficient continued fraction `T = 1/(z - a - b^2 T)`.
fn tail_g(z: C64, a: f64, b: f64) -> C64 {
    if b == 0.0 {
        return 1.0 / (z - a);
    }
    wigner_g((z - a) / b) / b
}

/// Real tridiagonal matrix, not necessarily symmetric. `upper[k]` sits at
/// `(k, k + 1)` and `lower[k]` at `(k + 1, k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
}

impl Tridiagonal {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// `<(z - T)^{-1} e_0, e_0>` by an LU sweep from the bottom, which keeps
    /// the pivots bounded away from zero for `Im z > 0`.
    pub fn vacuum_resolvent(&self, z: C64) -> Result<C64> {
        let n = self.dim();
        let mut g = C64::new(0.0, 0.0);
        for k in (0..n).rev() {
            let coupling = if k + 1 < n { self.upper[k] * self.lower[k] } else { 0.0 };
            let pivot = z - self.diag[k] - coupling * g;
            if pivot.norm() < 1e-300 {
                return Err(Error::PoleHit(format!("{z}")));
            }
            g = 1.0 / pivot;
        }
        Ok(g)
    }

    pub fn to_dense(&self) -> crate::numcore::CMatrix {
        let n = self.dim();
        let mut m = crate::numcore::CMatrix::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = C64::new(self.diag[k], 0.0);
            if k + 1 < n {
                m[(k, k + 1)] = C64::new(self.upper[k], 0.0);
                m[(k + 1, k)] = C64::new(self.lower[k], 0.0);
            }
        }
        m
    }
}

/// `J - s e_0 (J e_0)* - t (J e_0) e_0*` truncated to `n` levels: the corner
/// becomes `[(1-s-t) a_0, (1-s) b_0; (1-t) b_0, a_1]`.
pub fn jacobi_deform_antidiagonal(j: &JacobiData, s: f64, t: f64, n: usize) -> Tridiagonal {
    let mut m = j.matrix(n);
    if n > 0 {
        m.diag[0] *= 1.0 - s - t;
    }
    if n > 1 {
        m.upper[0] *= 1.0 - s;
        m.lower[0] *= 1.0 - t;
    }
    m
}

/// `J - s e_0 e_0* - t (J e_0)(J e_0)*` truncated to `n` levels: with
/// `m = a_0` the corner becomes `[m(1-tm) - s, b_0(1-tm); b_0(1-tm), a_1 - t b_0^2]`.
pub fn jacobi_deform_diagonal(j: &JacobiData, s: f64, t: f64, n: usize) -> Tridiagonal {
    let mut m = j.matrix(n);
    let (a0, b0) = (j.a_at(0), j.b_at(0));
    if n > 0 {
        m.diag[0] = a0 * (1.0 - t * a0) - s;
    }
    if n > 1 {
        m.upper[0] = b0 * (1.0 - t * a0);
        m.lower[0] = m.upper[0];
        m.diag[1] -= t * b0 * b0;
    }
    m
}

/// Exact Jacobi data of the U-transform: `a_0 -> p a_0`, `b_0 -> sqrt(q) b_0`.
pub fn jacobi_u_map(j: &JacobiData, p: f64, q: f64) -> Result<JacobiData> {
    if q < 0.0 {
        return Err(Error::InvalidParams(format!("q = {q} < 0")));
    }
    let mut out = materialize(j, 2);
    out.a[0] *= p;
    if let Some(b0) = out.b.first_mut() {
        *b0 *= q.sqrt();
    }
    Ok(out)
}

/// Exact Jacobi data of the W-transform (diagonal deformation of the corner).
pub fn jacobi_w_map(j: &JacobiData, s: f64, t: f64) -> JacobiData {
    let mut out = materialize(j, 2);
    let (a0, b0) = (out.a[0], out.b.first().copied().unwrap_or(0.0));
    out.a[0] = a0 * (1.0 - t * a0) - s;
    if out.b.is_empty() {
        return out;
    }
    out.b[0] = (b0 * (1.0 - t * a0)).abs();
    if out.a.len() > 1 {
        out.a[1] -= t * b0 * b0;
    }
    out
}

/// Copy with at least `k` explicit levels (fewer for a shorter finite matrix).
fn materialize(j: &JacobiData, k: usize) -> JacobiData {
    match j.tail {
        Some(_) => {
            let n = j.a.len().max(j.b.len()).max(k);
            JacobiData { a: (0..n).map(|i| j.a_at(i)).collect(), b: (0..n).map(|i| j.b_at(i)).collect(), tail: j.tail }
        }
        None => j.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncated_wigner_converges() {
        let z = C64::new(1.0, 1.0);
        let exact = wigner_g(z);
        let approx = JacobiData::wigner().truncated(400).cauchy(z);
        assert!((exact - approx).norm() < 1e-10);
        assert!((JacobiData::wigner().cauchy(z) - exact).norm() < 1e-15);
    }

    #[test]
    fn tridiagonal_matches_dense_solve() {
        let t = Tridiagonal { diag: vec![0.5, -1.0, 2.0], upper: vec![0.3, 1.2], lower: vec![-0.7, 0.4] };
        let z = C64::new(0.2, 0.9);
        let dense = t.to_dense();
        let r = crate::weyl::Resolvent::new(&dense, z).unwrap();
        let e0 = crate::numcore::CVector::basis(3, 0);
        assert!((r.q(&e0, &e0) - t.vacuum_resolvent(z).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn undeformed_corners() {
        let j = JacobiData::wigner();
        assert_eq!(jacobi_deform_antidiagonal(&j, 0.0, 0.0, 5), j.matrix(5));
        assert_eq!(jacobi_deform_diagonal(&j, 0.0, 0.0, 5), j.matrix(5));
        let d = jacobi_deform_diagonal(&j, 0.3, 0.7, 4);
        assert_eq!((d.diag[0], d.diag[1], d.upper[0]), (-0.3, -0.7, 1.0));
        let a = jacobi_deform_antidiagonal(&j, 0.0, 0.25, 4);
        assert_eq!((a.upper[0], a.lower[0]), (1.0, 0.75));
    }

    #[test]
    fn delta_w_map() {
        // a single level is the point mass at a_0
        let j = JacobiData::finite(vec![2.0], vec![]).unwrap();
        let w = jacobi_w_map(&j, 0.5, 0.25);
        assert_eq!(w.a, vec![2.0 - 0.5 - 0.25 * 4.0]);
    }
}
