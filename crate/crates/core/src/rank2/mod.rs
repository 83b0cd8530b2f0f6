//! Rank-two perturbations `A - s u w* - t g h*`.

mod interlace;
mod phase;

pub use interlace::{interlacing_condition, real_spectrum, verify_interlacing, InterlacingDiagnostics, REAL_TOL};
pub use phase::{phase_transition_check, AxisVerdict, PhaseTransitionReport, DEFAULT_EPS};

use crate::error::{Error, Result};
use crate::numcore::{char_poly_adjugate, cluster_roots, eigenvalues_dense, CMatrix, CPoly, CVector, C64};
use crate::weyl::{check_dims, Resolvent};

const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Relative size of the division remainder tolerated when forming the
/// quadratic part of `det(z - A) R_{s,t}(z)`.
const DIVISION_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    /// `A - s u w* - t g h*`
    General,
    /// `A - s u w* - t w u*`
    Antidiagonal,
    /// `A - s u u* - t w w*`
    Diagonal,
}

/// The data of `A - s u w* - t g h*`, always stored in the general form.
#[derive(Clone, Debug)]
pub struct Rank2Perturbation {
    pub a: CMatrix,
    pub u: CVector,
    pub w: CVector,
    pub g: CVector,
    pub h: CVector,
    pub s: C64,
    pub t: C64,
    pub shape: Shape,
    /// The shaped perturbation was built from `w = Au`.
    pub w_is_au: bool,
}

impl Rank2Perturbation {
    pub fn general(a: &CMatrix, u: &CVector, w: &CVector, g: &CVector, h: &CVector, s: C64, t: C64) -> Result<Self> {
        check_dims(a, &[u, w, g, h])?;
        Ok(Rank2Perturbation {
            a: a.clone(),
            u: u.clone(),
            w: w.clone(),
            g: g.clone(),
            h: h.clone(),
            s,
            t,
            shape: Shape::General,
            w_is_au: false,
        })
    }

    pub fn antidiagonal(a: &CMatrix, u: &CVector, w: &CVector, s: C64, t: C64) -> Result<Self> {
        let mut p = Self::general(a, u, w, w, u, s, t)?;
        p.shape = Shape::Antidiagonal;
        Ok(p)
    }

    pub fn diagonal(a: &CMatrix, u: &CVector, w: &CVector, s: C64, t: C64) -> Result<Self> {
        let mut p = Self::general(a, u, u, w, w, s, t)?;
        p.shape = Shape::Diagonal;
        Ok(p)
    }

    /// `A - s u (Au)* - t (Au) u*`.
    pub fn antidiagonal_au(a: &CMatrix, u: &CVector, s: C64, t: C64) -> Result<Self> {
        check_dims(a, &[u])?;
        let mut p = Self::antidiagonal(a, u, &a.mul_vec(u), s, t)?;
        p.w_is_au = true;
        Ok(p)
    }

    /// `A - s u u* - t (Au)(Au)*`.
    pub fn diagonal_au(a: &CMatrix, u: &CVector, s: C64, t: C64) -> Result<Self> {
        check_dims(a, &[u])?;
        let mut p = Self::diagonal(a, u, &a.mul_vec(u), s, t)?;
        p.w_is_au = true;
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    /// The vector `w` of the antidiagonal or diagonal shape.
    pub fn shape_vector(&self) -> &CVector {
        match self.shape {
            Shape::Diagonal => &self.g,
            _ => &self.w,
        }
    }

    pub fn with_params(&self, s: C64, t: C64) -> Self {
        Rank2Perturbation { s, t, ..self.clone() }
    }

    /// The dense perturbed matrix.
    pub fn matrix(&self) -> CMatrix {
        let uw = CMatrix::outer(&self.u, &self.w).scale(self.s);
        let gh = CMatrix::outer(&self.g, &self.h).scale(self.t);
        &(&self.a - &uw) - &gh
    }

    /// Dense eigenvalues of the perturbed matrix.
    pub fn eigenvalues(&self) -> Result<Vec<C64>> {
        eigenvalues_dense(&self.matrix())
    }
}

/// `R_{s,t}(z) = N(z) / det(z - A)` with
/// `N = det + s p_uw + t p_gh + s t q`, where `p_xy = det(z - A) Q_{x,y}` and
/// `q = det(z - A) (Q_uw Q_gh - Q_gw Q_uh)`.
#[derive(Clone, Debug)]
pub struct RFactor {
    pub det: CPoly,
    pub p_uw: CPoly,
    pub p_gh: CPoly,
    pub q: CPoly,
    pub s: C64,
    pub t: C64,
}

impl RFactor {
    pub fn new(p: &Rank2Perturbation) -> Result<RFactor> {
        let cpa = char_poly_adjugate(&p.a)?;
        let p_uw = cpa.bilinear(&p.u, &p.w);
        let p_gh = cpa.bilinear(&p.g, &p.h);
        let p_gw = cpa.bilinear(&p.g, &p.w);
        let p_uh = cpa.bilinear(&p.u, &p.h);
        let q = exact_quotient(&(&(&p_uw * &p_gh) - &(&p_gw * &p_uh)), &cpa.poly)?;
        Ok(RFactor { det: cpa.poly, p_uw, p_gh, q, s: p.s, t: p.t })
    }

    /// `det(z - A) R_{s,t}(z)`, of degree `n`.
    pub fn numerator(&self) -> CPoly {
        let lin = &self.p_uw.scale_by(self.s) + &self.p_gh.scale_by(self.t);
        let quad = self.q.scale_by(self.s * self.t);
        CPoly::raw((&(&self.det + &lin) + &quad).coeffs()[..self.det.coeffs().len()].to_vec())
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        let d = self.det.eval(z);
        if d.norm() <= 1e-14 * self.det.eval_abs(z) {
            return Err(Error::PoleHit(format!("{z}")));
        }
        Ok(self.numerator().eval(z) / d)
    }
}

/// Division that is exact in exact arithmetic; the remainder is checked
/// against the size of the dividend.
pub(crate) fn exact_quotient(num: &CPoly, den: &CPoly) -> Result<CPoly> {
    if num.is_zero() || num.degree() < den.degree() {
        return Ok(CPoly::zero());
    }
    let (quot, rem) = num.div_rem(den)?;
    let scale = num.scale().max(f64::MIN_POSITIVE);
    let rem_size = rem.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    if rem_size > DIVISION_TOL * scale {
        return Err(Error::NoConvergence(format!("polynomial division left remainder {rem_size:e}")));
    }
    Ok(quot)
}

/// `det(z - A) R_{s,t}(z)`, the characteristic polynomial of the perturbed matrix.
pub fn perturbed_char_poly(p: &Rank2Perturbation) -> Result<CPoly> {
    Ok(RFactor::new(p)?.numerator())
}

/// Closed form `(Q_u + t Q_u Q_gh - t Q_uh Q_gu) / R_{s,t}` for `Q_u^{s,t}`.
pub fn weyl_general(p: &Rank2Perturbation, z: C64) -> Result<C64> {
    let r = Resolvent::new(&p.a, z)?;
    let (u, w, g, h) = (&p.u, &p.w, &p.g, &p.h);
    let (s, t) = (p.s, p.t);
    let quu = r.q(u, u);
    let qgh = r.q(g, h);
    let rst = ONE + s * r.q(u, w) + t * qgh + s * t * (r.q(u, w) * qgh - r.q(g, w) * r.q(u, h));
    guard(rst, z)?;
    Ok((quu + t * quu * qgh - t * r.q(u, h) * r.q(g, u)) / rst)
}

/// `Q_u / (1 + s Q_uw + t Q_wu + st (Q_uw Q_wu - Q_u Q_w))` for `A - s u w* - t w u*`.
pub fn weyl_antidiagonal(a: &CMatrix, u: &CVector, w: &CVector, s: C64, t: C64, z: C64) -> Result<C64> {
    check_dims(a, &[u, w])?;
    let r = Resolvent::new(a, z)?;
    let (quu, qww, quw, qwu) = (r.q(u, u), r.q(w, w), r.q(u, w), r.q(w, u));
    let den = ONE + s * quw + t * qwu + s * t * (quw * qwu - quu * qww);
    guard(den, z)?;
    Ok(quu / den)
}

/// Weyl function of `u` for `A - s u u* - t w w*`.
pub fn weyl_diagonal(a: &CMatrix, u: &CVector, w: &CVector, s: C64, t: C64, z: C64) -> Result<C64> {
    check_dims(a, &[u, w])?;
    let r = Resolvent::new(a, z)?;
    let (quu, qww, quw, qwu) = (r.q(u, u), r.q(w, w), r.q(u, w), r.q(w, u));
    let den = (ONE + s * quu) * (ONE + t * qww) - s * t * quw * qwu;
    guard(den, z)?;
    Ok((quu * (ONE + t * qww) - t * quw * qwu) / den)
}

/// `1/Q = (1-s)(1-t)/Q_u + (s - st + t) z + st m` for self-adjoint `A`, unit `u`, `w = Au`.
pub fn weyl_antidiagonal_selfadjoint(a: &CMatrix, u: &CVector, s: C64, t: C64, z: C64) -> Result<C64> {
    let (qu, m) = selfadjoint_data(a, u, z)?;
    let inv = (ONE - s) * (ONE - t) / qu + (s - s * t + t) * z + s * t * m;
    guard(inv, z)?;
    Ok(ONE / inv)
}

/// `1/Q = s + (1 + t(z^2 Q_u - m - z)) / ((1 - tm + tz) Q_u - t)` for
/// self-adjoint `A`, unit `u`, `w = Au`.
pub fn weyl_diagonal_selfadjoint(a: &CMatrix, u: &CVector, s: C64, t: C64, z: C64) -> Result<C64> {
    let (qu, m) = selfadjoint_data(a, u, z)?;
    let den = (ONE - t * m + t * z) * qu - t;
    guard(den, z)?;
    let inv = s + (ONE + t * (z * z * qu - m - z)) / den;
    guard(inv, z)?;
    Ok(ONE / inv)
}

fn selfadjoint_data(a: &CMatrix, u: &CVector, z: C64) -> Result<(C64, C64)> {
    check_dims(a, &[u])?;
    if !a.is_hermitian(1e-12) {
        return Err(Error::NotSelfAdjoint(a.hermitian_defect()));
    }
    if (u.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::HypothesisViolated(format!("|u| = {} is not 1", u.norm())));
    }
    let r = Resolvent::new(a, z)?;
    let qu = r.q(u, u);
    guard(qu, z)?;
    Ok((qu, C64::new(a.mul_vec(u).inner(u).re, 0.0)))
}

fn guard(x: C64, z: C64) -> Result<()> {
    if x.norm() < 1e-300 || !x.is_finite() {
        Err(Error::PoleHit(format!("{z}")))
    } else {
        Ok(())
    }
}

/// `Q_u^{s,t}(z)` through the closed form matching the shape tag; the
/// self-adjoint forms are used when `A = A*`, `|u| = 1` and `w = Au`.
pub fn weyl_perturbed(p: &Rank2Perturbation, z: C64) -> Result<C64> {
    let selfadjoint = p.w_is_au && p.a.is_hermitian(1e-12) && (p.u.norm() - 1.0).abs() <= 1e-10;
    match p.shape {
        Shape::General => weyl_general(p, z),
        Shape::Antidiagonal if selfadjoint => weyl_antidiagonal_selfadjoint(&p.a, &p.u, p.s, p.t, z),
        Shape::Diagonal if selfadjoint => weyl_diagonal_selfadjoint(&p.a, &p.u, p.s, p.t, z),
        Shape::Antidiagonal => weyl_antidiagonal(&p.a, &p.u, &p.w, p.s, p.t, z),
        Shape::Diagonal => weyl_diagonal(&p.a, &p.u, &p.g, p.s, p.t, z),
    }
}

/// `q(z) = det(z - A)(Q_uw Q_gh - Q_gw Q_uh)` with its roots.
#[derive(Clone, Debug)]
pub struct LimitPolynomial {
    pub poly: CPoly,
    pub degree: usize,
    pub roots: Vec<C64>,
    pub simple_roots: bool,
}

pub fn limit_polynomial_q(p: &Rank2Perturbation) -> Result<LimitPolynomial> {
    if p.dim() < 2 {
        return Err(Error::DimensionMismatch("limit polynomial needs n >= 2".into()));
    }
    let rf = RFactor::new(p)?;
    let scale = (rf.p_uw.scale() * rf.p_gh.scale()).max(f64::MIN_POSITIVE);
    let poly = rf.q.clone().stripped(1e-12);
    if poly.is_zero() || poly.scale() <= 1e-10 * scale {
        return Err(Error::DegenerateDirections("q vanishes identically".into()));
    }
    let degree = poly.degree();
    let roots = if degree == 0 { vec![] } else { poly.roots()? };
    let simple_roots = cluster_roots(&roots, 1e-6).iter().all(|c| c.multiplicity == 1);
    Ok(LimitPolynomial { poly, degree, roots, simple_roots })
}

/// Spectrum of `A - (alpha r) u w* - (beta r) g h*` as `r -> infinity`:
/// two eigenvalues `lambda_i r + o(r)` and the zeros of `q`.
#[derive(Clone, Debug)]
pub struct AsymptoticSpectrum {
    pub divergent: Vec<C64>,
    pub finite_limits: Vec<C64>,
    /// Both divergent rates vanish (nilpotent perturbation).
    pub degenerate_divergent: bool,
}

pub fn asymptotic_spectrum(p: &Rank2Perturbation, alpha: C64, beta: C64) -> Result<AsymptoticSpectrum> {
    if alpha.norm() == 0.0 || beta.norm() == 0.0 {
        return Err(Error::InvalidParams("alpha and beta must be nonzero".into()));
    }
    let scaled = p.with_params(alpha, beta);
    let limit = limit_polynomial_q(&scaled)?;
    // nonzero eigenvalues of alpha u w* + beta g h* live on span{u, g}
    let reduced = CMatrix::from_rows(&[
        vec![alpha * p.u.inner(&p.w), alpha * p.g.inner(&p.w)],
        vec![beta * p.u.inner(&p.h), beta * p.g.inner(&p.h)],
    ]);
    let divergent = eigenvalues_dense(&reduced)?;
    let scale = alpha.norm() * p.u.norm() * p.w.norm() + beta.norm() * p.g.norm() * p.h.norm();
    let degenerate_divergent = divergent.iter().all(|l| l.norm() <= 1e-12 * scale);
    Ok(AsymptoticSpectrum { divergent, finite_limits: limit.roots, degenerate_divergent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numcore::match_roots;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn worked_example() -> (CMatrix, CVector) {
        (CMatrix::from_real_diag(&[1.0, 2.0, 3.0, 4.0]), CVector::from_real(&[0.5; 4]))
    }

    #[test]
    fn zero_parameters_give_char_poly() {
        let (a, u) = worked_example();
        let p = Rank2Perturbation::antidiagonal_au(&a, &u, c(0.0), c(0.0)).unwrap();
        let cp = perturbed_char_poly(&p).unwrap();
        let expect = crate::numcore::char_poly(&a).unwrap();
        for (x, y) in cp.coeffs().iter().zip(expect.coeffs()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn diag_example_spectrum() {
        let (a, u) = worked_example();
        let p = Rank2Perturbation::antidiagonal_au(&a, &u, c(1.1), c(1.2)).unwrap();
        let mut r: Vec<f64> = perturbed_char_poly(&p).unwrap().roots().unwrap().iter().map(|z| z.re).collect();
        r.sort_by(f64::total_cmp);
        for (x, y) in r.iter().zip([-3.25, 1.38, 2.50, 3.61]) {
            assert!((x - y).abs() < 0.01, "{r:?}");
        }
    }

    #[test]
    fn weyl_perturbed_reduces_to_q_u() {
        let (a, u) = worked_example();
        let z = C64::new(0.5, 0.5);
        let p = Rank2Perturbation::diagonal_au(&a, &u, c(0.0), c(0.0)).unwrap();
        let qu = Resolvent::new(&a, z).unwrap().q(&u, &u);
        assert!((weyl_perturbed(&p, z).unwrap() - qu).norm() < 1e-14);
    }

    #[test]
    fn n_two_limit_is_constant() {
        let a = CMatrix::from_real_rows(&[vec![1.0, 2.0], vec![0.5, -1.0]]);
        let u = CVector::from_real(&[1.0, 0.3]);
        let w = CVector::from_real(&[0.2, 1.0]);
        let g = CVector::from_real(&[-0.4, 1.0]);
        let h = CVector::from_real(&[1.0, 0.7]);
        let p = Rank2Perturbation::general(&a, &u, &w, &g, &h, c(1.0), c(1.0)).unwrap();
        let lp = limit_polynomial_q(&p).unwrap();
        assert_eq!(lp.degree, 0);
        assert!(lp.roots.is_empty());
    }

    #[test]
    fn jordan_form_limit_degree() {
        // u = w = e1, g = h = e2: R_inf ~ (z - l1)^{-1} (z - l2)^{-1}
        let mut a = CMatrix::from_real_diag(&[1.0, 2.0, 3.0, 3.0, 5.0]);
        a[(2, 3)] = c(1.0);
        let e = |k| CVector::basis(5, k);
        let p = Rank2Perturbation::general(&a, &e(0), &e(0), &e(1), &e(1), c(1.0), c(1.0)).unwrap();
        let lp = limit_polynomial_q(&p).unwrap();
        assert_eq!(lp.degree, 3);
        assert!(match_roots(&lp.roots, &[c(3.0), c(3.0), c(5.0)]).unwrap() < 1e-6);
    }

    #[test]
    fn projections_diverge_at_unit_rate() {
        let a = CMatrix::from_real_diag(&[1.0, -1.0, 0.5]);
        let e0 = CVector::basis(3, 0);
        let e1 = CVector::basis(3, 1);
        let p = Rank2Perturbation::general(&a, &e0, &e0, &e1, &e1, c(1.0), c(1.0)).unwrap();
        let asym = asymptotic_spectrum(&p, c(1.0), c(1.0)).unwrap();
        assert!(match_roots(&asym.divergent, &[c(1.0), c(1.0)]).unwrap() < 1e-14);
        assert!(!asym.degenerate_divergent);
    }

    #[test]
    fn nilpotent_perturbation_is_flagged() {
        let a = CMatrix::from_real_rows(&[
            vec![0.3, 1.0, 0.0, 0.2],
            vec![0.0, -0.5, 0.7, 0.0],
            vec![0.4, 0.0, 1.1, 0.3],
            vec![0.0, 0.6, 0.0, 0.9],
        ]);
        // w*u = h*g = w*g = 0 makes u w* + g h* nilpotent
        let u = CVector::basis(4, 0);
        let w = CVector::from_real(&[0.0, 1.0, 0.0, 1.0]);
        let g = CVector::basis(4, 2);
        let h = CVector::from_real(&[1.0, 1.0, 0.0, 0.0]);
        let p = Rank2Perturbation::general(&a, &u, &w, &g, &h, c(1.0), c(1.0)).unwrap();
        let asym = asymptotic_spectrum(&p, c(1.0), c(1.0)).unwrap();
        assert!(asym.degenerate_divergent);
    }
}
