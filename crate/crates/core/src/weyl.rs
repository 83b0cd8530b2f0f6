//! Weyl functions `Q_{u,w}(z) = <(z - A)^{-1} u, w> = w* (z - A)^{-1} u`.

use crate::error::{Error, Result};
use crate::numcore::{char_poly_adjugate, eigenvalues_dense, CMatrix, CVector, Lu, C64};

/// Weights below this magnitude make a partial-fraction expansion non-generic.
pub const GENERICITY_TOL: f64 = 1e-10;
/// Minimal eigenvalue gap, relative to the spread of the spectrum.
pub const SIMPLICITY_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub enum WeylFn {
    Direct { a: CMatrix, u: CVector, w: CVector },
    PartialFractions { poles: Vec<C64>, weights: Vec<C64>, generic: bool },
}

impl WeylFn {
    pub fn direct(a: &CMatrix, u: &CVector, w: &CVector) -> Result<WeylFn> {
        check_dims(a, &[u, w])?;
        Ok(WeylFn::Direct { a: a.clone(), u: u.clone(), w: w.clone() })
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        weyl_eval(self, z)
    }

    /// Poles of a partial-fraction representation (empty for `Direct`).
    pub fn poles(&self) -> &[C64] {
        match self {
            WeylFn::PartialFractions { poles, .. } => poles,
            WeylFn::Direct { .. } => &[],
        }
    }

    pub fn weights(&self) -> &[C64] {
        match self {
            WeylFn::PartialFractions { weights, .. } => weights,
            WeylFn::Direct { .. } => &[],
        }
    }

    pub fn is_generic(&self) -> bool {
        match self {
            WeylFn::PartialFractions { generic, .. } => *generic,
            WeylFn::Direct { .. } => true,
        }
    }
}

pub(crate) fn check_dims(a: &CMatrix, vs: &[&CVector]) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("operator is {}x{}", a.rows(), a.cols())));
    }
    for v in vs {
        if v.len() != a.rows() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for a {}x{} operator",
                v.len(),
                a.rows(),
                a.cols()
            )));
        }
    }
    Ok(())
}

/// Factored resolvent `(z - A)^{-1}` at a fixed point, reused across
/// several Weyl functions.
pub struct Resolvent {
    lu: Lu,
}

impl Resolvent {
    pub fn new(a: &CMatrix, z: C64) -> Result<Resolvent> {
        let m = a.shift(z).scale(C64::new(-1.0, 0.0));
        match Lu::factor(&m) {
            Ok(lu) => Ok(Resolvent { lu }),
            Err(Error::SingularMatrix { .. }) => Err(Error::PoleHit(format!("{z}"))),
            Err(e) => Err(e),
        }
    }

    pub fn apply(&self, x: &CVector) -> CVector {
        self.lu.solve(x)
    }

    /// `Q_{x,y}(z) = y* (z - A)^{-1} x`.
    pub fn q(&self, x: &CVector, y: &CVector) -> C64 {
        self.lu.solve(x).inner(y)
    }
}

pub fn weyl_eval(q: &WeylFn, z: C64) -> Result<C64> {
    match q {
        WeylFn::Direct { a, u, w } => Ok(Resolvent::new(a, z)?.q(u, w)),
        WeylFn::PartialFractions { poles, weights, .. } => {
            let mut acc = C64::new(0.0, 0.0);
            for (l, c) in poles.iter().zip(weights) {
                let d = z - l;
                if d.norm() <= 1e-14 * (1.0 + l.norm()) {
                    return Err(Error::PoleHit(format!("{z}")));
                }
                acc += c / d;
            }
            Ok(acc)
        }
    }
}

/// `sum_j c_j / (z - lambda_j)` with `c_j` the residues of `Q_{u,w}` at the
/// eigenvalues of `A`.
pub fn weyl_partial_fractions(a: &CMatrix, u: &CVector, w: &CVector) -> Result<WeylFn> {
    check_dims(a, &[u, w])?;
    let poles = eigenvalues_dense(a)?;
    let n = poles.len();
    let mut spread: f64 = 0.0;
    let mut gap = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            let d = (poles[i] - poles[j]).norm();
            spread = spread.max(d);
            gap = gap.min(d);
        }
    }
    if n > 1 && (spread == 0.0 || gap <= SIMPLICITY_TOL * spread) {
        return Err(Error::DegenerateSpectrum(format!("minimal eigenvalue gap {gap:e}, spread {spread:e}")));
    }
    let p = char_poly_adjugate(a)?.bilinear(u, w);
    let weights: Vec<C64> = (0..n)
        .map(|j| {
            let denom: C64 = (0..n).filter(|&k| k != j).map(|k| poles[j] - poles[k]).product();
            p.eval(poles[j]) / denom
        })
        .collect();
    let generic = weights.iter().all(|c| c.norm() > GENERICITY_TOL);
    Ok(WeylFn::PartialFractions { poles, weights, generic })
}

/// First moment `m = <Au, u>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentData {
    pub m: C64,
}

pub fn moment(a: &CMatrix, u: &CVector) -> Result<MomentData> {
    check_dims(a, &[u])?;
    Ok(MomentData { m: a.mul_vec(u).inner(u) })
}

/// `|Q_{Au,u}(z) - (z Q_u(z) - 1)|`; vanishes for unit `u`.
pub fn identity_qau_u(a: &CMatrix, u: &CVector, z: C64) -> Result<f64> {
    check_dims(a, &[u])?;
    let r = Resolvent::new(a, z)?;
    let au = a.mul_vec(u);
    Ok((r.q(&au, u) - (z * r.q(u, u) - 1.0)).norm())
}

/// `|Q_{Au}(z) - (z^2 Q_u(z) - z - m)|` for self-adjoint `A` and unit `u`.
pub fn identity_qau(a: &CMatrix, u: &CVector, z: C64) -> Result<f64> {
    check_dims(a, &[u])?;
    if !a.is_hermitian(1e-12) {
        return Err(Error::NotSelfAdjoint(a.hermitian_defect()));
    }
    let r = Resolvent::new(a, z)?;
    let au = a.mul_vec(u);
    let m = au.inner(u);
    Ok((r.q(&au, &au) - (z * z * r.q(u, u) - z - m)).norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn partial_fraction_hand_sum() {
        let a = CMatrix::from_real_diag(&[1.0, 2.0, 3.0, 4.0]);
        let u = CVector::from_real(&[0.5; 4]);
        let q = WeylFn::direct(&a, &u, &u).unwrap();
        let expect = -0.25 * (1.0 + 0.5 + 1.0 / 3.0 + 0.25);
        assert!((q.eval(c(0.0)).unwrap() - expect).norm() < 1e-14);
        let pf = weyl_partial_fractions(&a, &u, &u).unwrap();
        for w in pf.weights() {
            assert!((w - 0.25).norm() < 1e-12);
        }
        assert!(pf.is_generic());
    }

    #[test]
    fn zero_operator_is_one_over_z() {
        let a = CMatrix::zeros(3, 3);
        let u = CVector::basis(3, 1);
        let z = C64::new(0.3, 0.7);
        assert!((WeylFn::direct(&a, &u, &u).unwrap().eval(z).unwrap() - 1.0 / z).norm() < 1e-15);
        assert!(identity_qau_u(&a, &u, z).unwrap() < 1e-15);
        assert!(identity_qau(&a, &u, z).unwrap() < 1e-15);
    }

    #[test]
    fn non_generic_weights_flagged() {
        let a = CMatrix::from_real_diag(&[1.0, 2.0]);
        let u = CVector::basis(2, 0);
        let pf = weyl_partial_fractions(&a, &u, &u).unwrap();
        assert!(!pf.is_generic());
        let w = pf.weights();
        let p = pf.poles();
        let at1 = if (p[0] - 1.0).norm() < 1e-12 { 0 } else { 1 };
        assert!((w[at1] - 1.0).norm() < 1e-14 && w[1 - at1].norm() < 1e-14);
    }

    #[test]
    fn degenerate_spectrum_rejected() {
        let a = CMatrix::from_real_diag(&[1.0, 1.0, 2.0]);
        let u = CVector::from_real(&[1.0, 0.0, 0.0]);
        assert!(matches!(weyl_partial_fractions(&a, &u, &u), Err(Error::DegenerateSpectrum(_))));
    }

    #[test]
    fn two_by_two_identity_by_hand() {
        // A = diag(1, -1), u = e1: m = 1 and Q_{Au} = Q_u = 1/(z-1)
        let a = CMatrix::from_real_diag(&[1.0, -1.0]);
        let u = CVector::basis(2, 0);
        assert!(identity_qau(&a, &u, C64::new(0.2, 1.3)).unwrap() < 1e-15);
    }

    #[test]
    fn pole_is_reported() {
        let a = CMatrix::from_real_diag(&[1.0, 2.0]);
        let u = CVector::from_real(&[1.0, 1.0]);
        let q = WeylFn::direct(&a, &u, &u).unwrap();
        assert!(matches!(q.eval(c(1.0)), Err(Error::PoleHit(_))));
    }
}
