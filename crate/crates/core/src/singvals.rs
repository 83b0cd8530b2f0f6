//! Singular values of rank-one updates `B - tau v u*`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numcore::{char_poly, char_poly_adjugate, singular_values, CMatrix, CPoly, CVector, Lu, C64};

/// `sin` of the angle between `B*v` and `u` below which they count as parallel.
pub const PARALLEL_TOL: f64 = 1e-10;
/// `|u* B^{-1} v|`, relative to `|B^{-1}|`, below which the vanishing branch applies.
pub const ORTHO_TOL: f64 = 1e-10;
const UNIT_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct SVPerturbation {
    pub b: CMatrix,
    pub u: CVector,
    pub v: CVector,
    pub tau: f64,
    pub scalar_multiple: bool,
}

impl SVPerturbation {
    pub fn new(b: &CMatrix, u: &CVector, v: &CVector, tau: f64) -> Result<Self> {
        if u.len() != b.cols() || v.len() != b.rows() {
            return Err(Error::DimensionMismatch(format!(
                "B is {}x{}, u has length {}, v has length {}",
                b.rows(),
                b.cols(),
                u.len(),
                v.len()
            )));
        }
        for (name, x) in [("u", u), ("v", v)] {
            if (x.norm() - 1.0).abs() > UNIT_TOL {
                return Err(Error::InvalidParams(format!("|{name}| = {} is not 1", x.norm())));
            }
        }
        if !(tau >= 0.0) {
            return Err(Error::InvalidParams(format!("tau = {tau} must be nonnegative")));
        }
        let w = b.adjoint().mul_vec(v);
        let wn = w.norm();
        let overlap = w.inner(u).norm();
        let sin2 = if wn == 0.0 { 0.0 } else { (1.0 - (overlap / wn).powi(2)).max(0.0) };
        Ok(SVPerturbation {
            b: b.clone(),
            u: u.clone(),
            v: v.clone(),
            tau,
            scalar_multiple: sin2.sqrt() < PARALLEL_TOL,
        })
    }

    /// `B - tau v u*`.
    pub fn matrix_at(&self, tau: f64) -> CMatrix {
        &self.b - &CMatrix::outer(&self.v, &self.u).scale(C64::new(tau, 0.0))
    }

    pub fn matrix(&self) -> CMatrix {
        self.matrix_at(self.tau)
    }

    pub fn singular_values_at(&self, tau: f64) -> Result<Vec<f64>> {
        singular_values(&self.matrix_at(tau))
    }
}

struct GramParts {
    det: CPoly,
    p_uw: CPoly,
    p_wu: CPoly,
    q: CPoly,
}

/// Columns spanning the orthogonal complement of the unit vector `u`: the
/// last `n - 1` columns of the Householder reflector sending `u` to `e_1`.
fn complement_basis(u: &CVector) -> CMatrix {
    let n = u.len();
    let u0 = u.as_slice()[0];
    let phase = if u0.norm() == 0.0 { C64::new(1.0, 0.0) } else { u0 / u0.norm() };
    let mut y = u.clone().into_vec();
    y[0] += phase;
    let y = CVector::new(y);
    let yy = y.inner(&y).re;
    let mut q = CMatrix::zeros(n, n - 1);
    for j in 1..n {
        // H e_j = e_j - 2 y (y* e_j) / |y|^2
        let k = y.as_slice()[j].conj() * (2.0 / yy);
        for i in 0..n {
            let e = if i == j { 1.0 } else { 0.0 };
            q[(i, j - 1)] = C64::new(e, 0.0) - y.as_slice()[i] * k;
        }
    }
    q
}

/// Polynomial pieces for `A = B*B`, `w = B*v`. The `tau^2` coefficient
/// `q = -p_uu + (p_uw p_wu - p_ww p_uu) / det` equals `-det(x - C)` with `C`
/// the Gram matrix of `(I - v v*) B` compressed to `u`-perp; that form avoids
/// the ill-conditioned polynomial division.
fn gram_parts(p: &SVPerturbation) -> Result<GramParts> {
    if p.scalar_multiple {
        return Err(Error::ScalarMultipleCase);
    }
    let a = p.b.adjoint().matmul(&p.b);
    let w = p.b.adjoint().mul_vec(&p.v);
    let cpa = char_poly_adjugate(&a)?;
    let p_uw = cpa.bilinear(&p.u, &w);
    let p_wu = cpa.bilinear(&w, &p.u);
    let n = p.b.rows();
    let proj = &CMatrix::identity(n) - &CMatrix::outer(&p.v, &p.v);
    let mq = proj.matmul(&p.b).matmul(&complement_basis(&p.u));
    let q = char_poly(&mq.adjoint().matmul(&mq))?.scale_by(C64::new(-1.0, 0.0));
    Ok(GramParts { det: cpa.poly, p_uw, p_wu, q })
}

/// `det(x - B*B) R_tau(x)`, the characteristic polynomial of the Gram matrix
/// of `B - tau v u*`.
pub fn gram_char_poly(p: &SVPerturbation) -> Result<CPoly> {
    let g = gram_parts(p)?;
    let tau = C64::new(p.tau, 0.0);
    let lin = (&g.p_uw + &g.p_wu).scale_by(tau);
    let quad = g.q.scale_by(tau * tau);
    Ok(&(&g.det + &lin) + &quad)
}

/// Real roots of a polynomial with real spectrum, descending.
fn real_roots_desc(poly: &CPoly) -> Result<Vec<f64>> {
    if poly.degree() == 0 {
        return Ok(vec![]);
    }
    let mut r: Vec<f64> = poly.roots()?.iter().map(|z| z.re).collect();
    r.sort_by(|a, b| b.total_cmp(a));
    Ok(r)
}

/// Squared singular values of `B - tau v u*` from the roots of the Gram
/// characteristic polynomial, descending.
pub fn gram_eigenvalues(p: &SVPerturbation) -> Result<Vec<f64>> {
    real_roots_desc(&gram_char_poly(p)?)
}

#[derive(Clone, Debug)]
pub struct SvLimits {
    /// Coefficient of `tau^2` in `det(x - B*B) R_tau(x)`; degree `n - 1`.
    pub poly: CPoly,
    /// Roots `z_1 >= ... >= z_{n-1}`.
    pub roots: Vec<f64>,
    /// `sqrt(z_j)`, the limits of `sigma_2, ..., sigma_n`.
    pub limits: Vec<f64>,
    pub sigma1_at_zero: f64,
    /// `sigma_1(0) > sqrt(z_1)`.
    pub top_separated: bool,
}

pub fn sv_limit_polynomial(p: &SVPerturbation) -> Result<SvLimits> {
    let g = gram_parts(p)?;
    let roots = real_roots_desc(&g.q)?;
    let limits = roots.iter().map(|z| z.max(0.0).sqrt()).collect::<Vec<_>>();
    let sigma1_at_zero = singular_values(&p.b)?[0];
    let top_separated = limits.first().map_or(true, |&l| sigma1_at_zero > l);
    Ok(SvLimits { poly: g.q, roots, limits, sigma1_at_zero, top_separated })
}

/// Inverse of a square `B`; `SingularB` otherwise.
fn inverse(b: &CMatrix) -> Result<CMatrix> {
    if !b.is_square() {
        return Err(Error::SingularB(format!("B is {}x{}", b.rows(), b.cols())));
    }
    match Lu::factor(b) {
        Ok(lu) => Ok(lu.inverse()),
        Err(Error::SingularMatrix { pivot, .. }) => Err(Error::SingularB(format!("pivot {pivot:e}"))),
        Err(e) => Err(e),
    }
}

/// `B_inf = B^{-1} - (u* B^{-1} v)^{-1} B^{-1} v u* B^{-1}`; `None` when
/// `u* B^{-1} v` vanishes.
#[derive(Clone, Debug)]
pub struct InverseData {
    pub binv: CMatrix,
    pub binv_v: CVector,
    pub binv_adj_u: CVector,
    /// `u* B^{-1} v`.
    pub pairing: C64,
    pub orthogonal: bool,
}

pub fn inverse_data(b: &CMatrix, u: &CVector, v: &CVector) -> Result<InverseData> {
    let binv = inverse(b)?;
    if u.len() != b.cols() || v.len() != b.rows() {
        return Err(Error::DimensionMismatch("u, v do not match B".into()));
    }
    let binv_v = binv.mul_vec(v);
    let binv_adj_u = binv.adjoint().mul_vec(u);
    let pairing = binv_v.inner(u);
    let orthogonal = pairing.norm() < ORTHO_TOL * binv.frobenius_norm().max(1.0);
    Ok(InverseData { binv, binv_v, binv_adj_u, pairing, orthogonal })
}

pub fn b_infinity(d: &InverseData) -> Option<CMatrix> {
    if d.orthogonal {
        return None;
    }
    let corr = CMatrix::outer(&d.binv_v, &d.binv_adj_u).scale(1.0 / d.pairing);
    Some(&d.binv - &corr)
}

/// `lim tau sigma_n(tau) = 1 / (|B^{-1} v| |B^{-*} u|)` when `u* B^{-1} v = 0`.
pub fn inverse_image_rate(d: &InverseData) -> f64 {
    1.0 / (d.binv_v.norm() * d.binv_adj_u.norm())
}

#[derive(Clone, Debug)]
pub enum SmallestSv {
    /// `sigma_n(tau) ~ rate / tau`. `rate` is `|B^{-1} u|^{-2}`; the observed
    /// rate is `inverse_image_rate`.
    VanishesLinearly { rate: f64, inverse_image_rate: f64 },
    /// `sigma_n(tau) -> 1 / sigma_max(B_inf)`.
    ConvergesTo { limit: f64, b_infinity: CMatrix },
}

pub fn smallest_sv_asymptotics(b: &CMatrix, u: &CVector, v: &CVector) -> Result<SmallestSv> {
    let d = inverse_data(b, u, v)?;
    match b_infinity(&d) {
        None => Ok(SmallestSv::VanishesLinearly {
            rate: d.binv.mul_vec(u).norm().powi(-2),
            inverse_image_rate: inverse_image_rate(&d),
        }),
        Some(binf) => {
            let smax = singular_values(&binf)?[0];
            Ok(SmallestSv::ConvergesTo { limit: 1.0 / smax, b_infinity: binf })
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ConditionGrowth {
    /// `kappa ~ coeff tau` with `coeff = sigma_max(B_inf)`; `reciprocal_norm`
    /// is `1 / |B_inf|`.
    Linear { coeff: f64, reciprocal_norm: f64 },
    /// `kappa ~ coeff tau^2` with `coeff = |B^{-1} u|^2`; `inverse_image_coeff`
    /// is `|B^{-1} v| |B^{-*} u|`.
    Quadratic { coeff: f64, inverse_image_coeff: f64 },
}

pub fn condition_number_asymptotics(b: &CMatrix, u: &CVector, v: &CVector) -> Result<ConditionGrowth> {
    let d = inverse_data(b, u, v)?;
    match b_infinity(&d) {
        None => Ok(ConditionGrowth::Quadratic {
            coeff: d.binv.mul_vec(u).norm().powi(2),
            inverse_image_coeff: 1.0 / inverse_image_rate(&d),
        }),
        Some(binf) => {
            let smax = singular_values(&binf)?[0];
            Ok(ConditionGrowth::Linear { coeff: smax, reciprocal_norm: 1.0 / smax })
        }
    }
}

/// `sigma_max / sigma_min`, infinite for rank-deficient input.
pub fn condition_number(m: &CMatrix) -> Result<f64> {
    let sv = singular_values(m)?;
    let lo = *sv.last().unwrap_or(&0.0);
    Ok(if lo == 0.0 { f64::INFINITY } else { sv[0] / lo })
}

#[derive(Clone, Debug)]
pub struct SvRow {
    pub tau: f64,
    pub sigmas: Vec<f64>,
    /// `|sigma_{j+1}(tau) - sqrt(z_j)|`.
    pub distances: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct SvTable {
    pub limits: Vec<f64>,
    pub rows: Vec<SvRow>,
    /// Least-squares slope of `log distance` against `log tau`, one per limit.
    pub slopes: Vec<f64>,
}

pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> =
        xs.iter().zip(ys).filter(|(x, y)| **x > 0.0 && **y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

pub fn sv_convergence_table(p: &SVPerturbation, taus: &[f64]) -> Result<SvTable> {
    if taus.iter().any(|t| !(*t >= 0.0)) || taus.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParams("tau grid must be nonnegative and increasing".into()));
    }
    let limits = sv_limit_polynomial(p)?.limits;
    let rows = taus
        .par_iter()
        .map(|&tau| {
            let sigmas = p.singular_values_at(tau)?;
            let distances = limits.iter().zip(sigmas.iter().skip(1)).map(|(l, s)| (s - l).abs()).collect();
            Ok(SvRow { tau, sigmas, distances })
        })
        .collect::<Result<Vec<_>>>()?;
    let slopes = (0..limits.len())
        .map(|j| {
            let d: Vec<f64> = rows.iter().map(|r| r.distances[j]).collect();
            loglog_slope(taus, &d)
        })
        .collect();
    Ok(SvTable { limits, rows, slopes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_tau_is_gram_char_poly() {
        let b = CMatrix::from_real_rows(&[vec![2.0, 1.0], vec![0.0, 1.0], vec![1.0, -1.0]]);
        let u = CVector::from_real(&[0.6, 0.8]);
        let v = CVector::from_real(&[0.0, 1.0, 0.0]);
        let p = SVPerturbation::new(&b, &u, &v, 0.0).unwrap();
        let g = gram_char_poly(&p).unwrap();
        let direct = crate::numcore::char_poly(&b.adjoint().matmul(&b)).unwrap();
        for (x, y) in g.coeffs().iter().zip(direct.coeffs()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn identity_limit_is_one() {
        // I - tau e1 e1*: singular values |1 - tau| and 1
        let b = CMatrix::identity(2);
        let e1 = CVector::basis(2, 0);
        match smallest_sv_asymptotics(&b, &e1, &e1).unwrap() {
            SmallestSv::ConvergesTo { limit, .. } => assert!((limit - 1.0).abs() < 1e-14),
            other => panic!("{other:?}"),
        }
        let p = SVPerturbation::new(&b, &e1, &e1, 0.0).unwrap();
        for tau in [10.0, 100.0, 1000.0] {
            let s = p.singular_values_at(tau).unwrap();
            assert!((s[1] - 1.0).abs() < 1e-14 && (s[0] - (tau - 1.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn orthogonal_pair_vanishes() {
        let b = CMatrix::identity(2);
        let (e1, e2) = (CVector::basis(2, 0), CVector::basis(2, 1));
        match smallest_sv_asymptotics(&b, &e1, &e2).unwrap() {
            SmallestSv::VanishesLinearly { rate, inverse_image_rate } => {
                assert_eq!(rate, 1.0);
                assert_eq!(inverse_image_rate, 1.0);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            condition_number_asymptotics(&b, &e1, &e2).unwrap(),
            ConditionGrowth::Quadratic { coeff, .. } if coeff == 1.0
        ));
    }

    #[test]
    fn parallel_directions_rejected() {
        let b = CMatrix::from_real_diag(&[2.0, 3.0]);
        let e1 = CVector::basis(2, 0);
        let p = SVPerturbation::new(&b, &e1, &e1, 1.0).unwrap();
        assert!(p.scalar_multiple);
        assert!(matches!(gram_char_poly(&p), Err(Error::ScalarMultipleCase)));
    }

    #[test]
    fn singular_b_rejected() {
        let b = CMatrix::from_real_diag(&[1.0, 0.0]);
        let e1 = CVector::basis(2, 0);
        assert!(matches!(smallest_sv_asymptotics(&b, &e1, &e1), Err(Error::SingularB(_))));
    }

    #[test]
    fn two_by_two_limit_by_hand() {
        // B = diag(1, 2), u = v = (1, 1)/sqrt 2: the finite limit is the singular
        // value of (I - vv*) B on u-perp, namely |(1,-1) B (1,-1)^T| / 2 = 3/2
        let b = CMatrix::from_real_diag(&[1.0, 2.0]);
        let r = 0.5f64.sqrt();
        let u = CVector::from_real(&[r, r]);
        let lim = sv_limit_polynomial(&SVPerturbation::new(&b, &u, &u, 0.0).unwrap()).unwrap();
        assert_eq!(lim.poly.degree(), 1);
        assert!((lim.limits[0] - 1.5).abs() < 1e-12, "{:?}", lim.limits);
        assert!(lim.top_separated);
    }
}
