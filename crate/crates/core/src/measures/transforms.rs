use crate::error::{Error, Result};
use crate::numcore::{CPoly, C64};

use super::cauchy::CauchyTransform;
use super::jacobi::{jacobi_u_map, jacobi_w_map};

/// Atoms with smaller residues are dropped from transformed atomic measures.
pub const MASS_DROP: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TransformKind {
    U { p: f64, q: f64 },
    T { tau: f64 },
    W { s: f64, t: f64 },
}

/// A transform together with the first moment of the measure it acts on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransformParams {
    pub kind: TransformKind,
    pub m: f64,
}

impl TransformParams {
    /// `p = 1 - s - t`, `q = (1 - s)(1 - t)`: the U-transform realized by the
    /// antidiagonal deformation.
    pub fn from_deformation(s: f64, t: f64, m: f64) -> Self {
        TransformParams { kind: TransformKind::U { p: 1.0 - s - t, q: (1.0 - s) * (1.0 - t) }, m }
    }

    pub fn apply(&self, g: &CauchyTransform) -> Result<CauchyTransform> {
        match self.kind {
            TransformKind::U { p, q } => u_transform(g, p, q, self.m),
            TransformKind::T { tau } => t_transform(g, tau),
            TransformKind::W { s, t } => w_transform(g, s, t, self.m),
        }
    }
}

fn moment_matches(g: &CauchyTransform, m: f64) -> bool {
    (g.first_moment() - m).abs() <= 1e-12 * (1.0 + m.abs())
}

/// `1/G_U = q/G + (1 - q) z + (q - p) m`.
pub fn u_transform(g: &CauchyTransform, p: f64, q: f64, m: f64) -> Result<CauchyTransform> {
    if !(q >= 0.0) {
        return Err(Error::InvalidParams(format!("U-transform needs q >= 0, got {q}")));
    }
    u_transform_any(g, p, q, m)
}

fn u_transform_any(g: &CauchyTransform, p: f64, q: f64, m: f64) -> Result<CauchyTransform> {
    match g {
        CauchyTransform::Jacobi(j) if q >= 0.0 && moment_matches(g, m) => Ok(CauchyTransform::Jacobi(jacobi_u_map(j, p, q)?)),
        CauchyTransform::Atoms(atoms) => {
            let (num, den) = rational(atoms);
            let lin = CPoly::from_real(&[(q - p) * m, 1.0 - q]);
            let new_den = &den.scale_by(C64::new(q, 0.0)) + &(&lin * &num);
            Ok(CauchyTransform::Atoms(atoms_from_rational(&num, &new_den)?))
        }
        _ => Ok(CauchyTransform::U { inner: Box::new(g.clone()), p, q, m }),
    }
}

/// `1/G_tau = tau/G + (1 - tau) z`.
pub fn t_transform(g: &CauchyTransform, tau: f64) -> Result<CauchyTransform> {
    u_transform_any(g, tau, tau, g.first_moment())
}

/// `1/G_W = s + (1 + t(z^2 G - m - z)) / ((1 - tm + tz) G - t)`.
pub fn w_transform(g: &CauchyTransform, s: f64, t: f64, m: f64) -> Result<CauchyTransform> {
    match g {
        CauchyTransform::Jacobi(j) if moment_matches(g, m) => Ok(CauchyTransform::Jacobi(jacobi_w_map(j, s, t))),
        CauchyTransform::Atoms(atoms) => {
            let (p, d) = rational(atoms);
            let tc = C64::new(t, 0.0);
            // G = P/D, N1 = D + t(z^2 P - (m + z) D), D1 = (1 - tm + tz) P - t D
            let z2 = CPoly::from_real(&[0.0, 0.0, 1.0]);
            let mz = CPoly::from_real(&[m, 1.0]);
            let n1 = &d + &(&(&z2 * &p) - &(&mz * &d)).scale_by(tc);
            let d1 = &(&CPoly::from_real(&[1.0 - t * m, t]) * &p) - &d.scale_by(tc);
            let den = &d1.scale_by(C64::new(s, 0.0)) + &n1;
            Ok(CauchyTransform::Atoms(atoms_from_rational(&d1, &den)?))
        }
        _ => Ok(CauchyTransform::W { inner: Box::new(g.clone()), s, t, m }),
    }
}

/// `G = P / D` for an atomic measure, `D = prod (z - x_k)`.
fn rational(atoms: &[(f64, f64)]) -> (CPoly, CPoly) {
    let locs: Vec<C64> = atoms.iter().map(|a| C64::new(a.0, 0.0)).collect();
    let den = CPoly::from_roots(&locs);
    let mut num = CPoly::zero();
    for (k, &(_, w)) in atoms.iter().enumerate() {
        let others: Vec<C64> = locs.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, x)| *x).collect();
        num = &num + &CPoly::from_roots(&others).scale_by(C64::new(w, 0.0));
    }
    (num, den)
}

/// Atoms of `num / den`: real roots of `den` with residues as masses.
fn atoms_from_rational(num: &CPoly, den: &CPoly) -> Result<Vec<(f64, f64)>> {
    let den = den.clone().stripped(1e-14);
    if den.is_zero() {
        return Err(Error::DenominatorVanishes("transformed denominator is identically zero".into()));
    }
    if den.degree() == 0 {
        return Ok(vec![]);
    }
    let dd = den.derivative();
    let mut out = Vec::new();
    for r in den.roots()? {
        let mass = num.eval(r) / dd.eval(r);
        if mass.norm() <= MASS_DROP {
            continue;
        }
        if r.im.abs() > 1e-8 * (1.0 + r.norm()) || mass.im.abs() > 1e-8 {
            return Err(Error::InvalidParams(format!("transform has a non-real pole at {r}")));
        }
        out.push((r.re, mass.re));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[(f64, f64)], b: &[(f64, f64)], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x.0 - y.0).abs() < tol && (x.1 - y.1).abs() < tol)
    }

    fn atoms(g: CauchyTransform) -> Vec<(f64, f64)> {
        match g {
            CauchyTransform::Atoms(a) => a,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn delta_transforms() {
        let d = CauchyTransform::delta(2.0);
        assert!(close(&atoms(u_transform(&d, 0.3, 0.7, 2.0).unwrap()), &[(0.6, 1.0)], 1e-12));
        assert!(close(&atoms(u_transform(&d, -0.5, 0.0, 2.0).unwrap()), &[(-1.0, 1.0)], 1e-12));
        assert!(close(&atoms(w_transform(&d, 0.5, 0.25, 2.0).unwrap()), &[(0.5, 1.0)], 1e-12));
    }

    #[test]
    fn bernoulli_transforms() {
        let b = CauchyTransform::bernoulli();
        let q: f64 = 2.25;
        let expect = [(-q.sqrt(), 0.5), (q.sqrt(), 0.5)];
        assert!(close(&atoms(t_transform(&b, q).unwrap()), &expect, 1e-12));
        assert!(close(&atoms(u_transform(&b, -0.7, q, 0.0).unwrap()), &expect, 1e-12));
        let s = 0.4;
        let w = atoms(w_transform(&b, s, s, 0.0).unwrap());
        assert!(close(&w, &[(-1.0 - s, 0.5), (1.0 - s, 0.5)], 1e-12), "{w:?}");
    }

    #[test]
    fn bernoulli_w_asymmetric_masses() {
        let (s, t): (f64, f64) = (0.3, -0.6);
        let disc = ((s + t) * (s + t) - 4.0 * (s * t - 1.0)).sqrt();
        let (x, y) = ((-(s + t) + disc) / 2.0, (-(s + t) - disc) / 2.0);
        let expect = [(y, (y + t) / (y - x)), (x, (x + t) / (x - y))];
        let w = atoms(w_transform(&CauchyTransform::bernoulli(), s, t, 0.0).unwrap());
        assert!(close(&w, &expect, 1e-12), "{w:?} vs {expect:?}");
    }

    #[test]
    fn negative_q_rejected() {
        assert!(u_transform(&CauchyTransform::Wigner, 0.0, -1.0, 0.0).is_err());
    }
}
