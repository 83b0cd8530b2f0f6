use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

use super::eigen::eigenvalues_dense;
use super::matrix::CMatrix;
use crate::error::{Error, Result};

/// Trailing coefficients below this fraction of the largest one are dropped.
pub const STRIP_TOL: f64 = 1e-12;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Complex polynomial, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq)]
pub struct CPoly {
    coeffs: Vec<C64>,
}

impl CPoly {
    /// Builds a polynomial and strips negligible leading coefficients.
    pub fn new(coeffs: Vec<C64>) -> Self {
        let mut p = CPoly { coeffs };
        p.strip(STRIP_TOL);
        p
    }

    /// Keeps every coefficient as given, including exact-zero leading terms.
    pub fn raw(coeffs: Vec<C64>) -> Self {
        let mut p = CPoly { coeffs };
        while p.coeffs.len() > 1 && *p.coeffs.last().unwrap() == ZERO {
            p.coeffs.pop();
        }
        if p.coeffs.is_empty() {
            p.coeffs.push(ZERO);
        }
        p
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zero() -> Self {
        CPoly { coeffs: vec![ZERO] }
    }

    pub fn one() -> Self {
        CPoly { coeffs: vec![ONE] }
    }

    pub fn constant(c: C64) -> Self {
        CPoly::raw(vec![c])
    }

    /// The monomial `z`.
    pub fn z() -> Self {
        CPoly { coeffs: vec![ZERO, ONE] }
    }

    /// `prod (z - r)` over the given roots.
    pub fn from_roots(roots: &[C64]) -> Self {
        let mut c = vec![ONE];
        for &r in roots {
            let mut next = vec![ZERO; c.len() + 1];
            for (i, &a) in c.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r;
            }
            c = next;
        }
        CPoly { coeffs: c }
    }

    /// Drops leading coefficients smaller than `tol * max |coeff|`.
    pub fn strip(&mut self, tol: f64) {
        let scale = self.scale();
        while self.coeffs.len() > 1 && self.coeffs.last().unwrap().norm() <= tol * scale {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(ZERO);
        }
    }

    pub fn stripped(mut self, tol: f64) -> Self {
        self.strip(tol);
        self
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> C64 {
        *self.coeffs.last().unwrap()
    }

    /// Largest coefficient modulus.
    pub fn scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// `sum |c_k| |z|^k`, the natural size for residual checks.
    pub fn eval_abs(&self, z: C64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> CPoly {
        if self.coeffs.len() <= 1 {
            return CPoly::zero();
        }
        CPoly::raw(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale_by(&self, k: C64) -> CPoly {
        CPoly::raw(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn conj(&self) -> CPoly {
        CPoly::raw(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    /// Polynomial long division; returns `(quotient, remainder)`.
    pub fn div_rem(&self, divisor: &CPoly) -> Result<(CPoly, CPoly)> {
        let d = divisor.clone().stripped(0.0);
        if d.is_zero() {
            return Err(Error::InvalidParams("division by the zero polynomial".into()));
        }
        let dn = d.degree();
        if self.degree() < dn {
            return Ok((CPoly::zero(), self.clone()));
        }
        let mut rem = self.coeffs.clone();
        let lead = d.leading();
        let mut quot = vec![ZERO; self.degree() - dn + 1];
        for k in (0..quot.len()).rev() {
            let q = rem[k + dn] / lead;
            quot[k] = q;
            for (j, &dc) in d.coeffs.iter().enumerate() {
                rem[k + j] -= q * dc;
            }
        }
        rem.truncate(dn.max(1));
        Ok((CPoly::raw(quot), CPoly::raw(rem)))
    }

    /// All roots with multiplicity.
    pub fn roots(&self) -> Result<Vec<C64>> {
        poly_roots(self)
    }
}

impl Add for &CPoly {
    type Output = CPoly;
    fn add(self, rhs: &CPoly) -> CPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let get = |p: &CPoly, i: usize| p.coeffs.get(i).copied().unwrap_or(ZERO);
        CPoly::raw((0..n).map(|i| get(self, i) + get(rhs, i)).collect())
    }
}

impl Sub for &CPoly {
    type Output = CPoly;
    fn sub(self, rhs: &CPoly) -> CPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let get = |p: &CPoly, i: usize| p.coeffs.get(i).copied().unwrap_or(ZERO);
        CPoly::raw((0..n).map(|i| get(self, i) - get(rhs, i)).collect())
    }
}

impl Mul for &CPoly {
    type Output = CPoly;
    fn mul(self, rhs: &CPoly) -> CPoly {
        let mut c = vec![ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        CPoly::raw(c)
    }
}

impl Neg for &CPoly {
    type Output = CPoly;
    fn neg(self) -> CPoly {
        self.scale_by(-ONE)
    }
}

const ABERTH_MAX_ITER: usize = 500;

/// Roots of `p` by Aberth–Ehrlich iteration, falling back to the eigenvalues
/// of the companion matrix when the simultaneous iteration stalls.
pub fn poly_roots(p: &CPoly) -> Result<Vec<C64>> {
    let p = p.clone().stripped(STRIP_TOL);
    let n = p.degree();
    if n == 0 {
        return Err(Error::InvalidParams("polynomial of degree zero has no roots".into()));
    }
    // factor out exact zero roots
    let zeros = p.coeffs.iter().take_while(|c| **c == ZERO).count();
    let reduced = CPoly::raw(p.coeffs[zeros..].to_vec());
    let mut roots = vec![ZERO; zeros];
    if reduced.degree() == 0 {
        return Ok(roots);
    }
    if reduced.degree() == 1 {
        roots.push(-reduced.coeffs[0] / reduced.coeffs[1]);
        return Ok(roots);
    }
    let found = match aberth(&reduced) {
        Some(r) => r,
        None => eigenvalues_dense(&CMatrix::companion(reduced.coeffs()))?,
    };
    roots.extend(found);
    Ok(roots)
}

fn aberth(p: &CPoly) -> Option<Vec<C64>> {
    let n = p.degree();
    let dp = p.derivative();
    let lead = p.leading().norm();
    // Fujiwara-type bound for the initial circle
    let radius = (0..n)
        .map(|k| (p.coeffs[k].norm() / lead).powf(1.0 / (n - k) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            C64::from_polar(0.5 * radius, theta)
        })
        .collect();
    let mut done = vec![false; n];
    for _ in 0..ABERTH_MAX_ITER {
        let mut all_done = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let zi = z[i];
            let pv = p.eval(zi);
            if pv == ZERO {
                done[i] = true;
                continue;
            }
            let ratio = pv / dp.eval(zi);
            let repulsion: C64 = (0..n).filter(|&j| j != i).map(|j| ONE / (zi - z[j])).sum();
            let step = ratio / (ONE - ratio * repulsion);
            if !step.is_finite() {
                return None;
            }
            z[i] = zi - step;
            if step.norm() <= 4.0 * f64::EPSILON * z[i].norm().max(f64::MIN_POSITIVE)
                || pv.norm() <= 4.0 * f64::EPSILON * p.eval_abs(zi)
            {
                done[i] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            return Some(z);
        }
    }
    // accept if every residual is at rounding level of a slightly relaxed test
    let ok = z.iter().all(|&r| p.eval(r).norm() <= 1e-8 * p.eval_abs(r));
    ok.then_some(z)
}

/// A group of roots that coincide within the clustering tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct RootCluster {
    pub center: C64,
    pub multiplicity: usize,
}

/// Groups roots closer than `rel_tol * scale` (scale = max(1, max |root|)).
pub fn cluster_roots(roots: &[C64], rel_tol: f64) -> Vec<RootCluster> {
    let scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
    let tol = rel_tol * scale;
    let mut used = vec![false; roots.len()];
    let mut out = Vec::new();
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        let mut members = vec![roots[i]];
        used[i] = true;
        let mut grew = true;
        while grew {
            grew = false;
            for j in 0..roots.len() {
                if !used[j] && members.iter().any(|m| (m - roots[j]).norm() <= tol) {
                    used[j] = true;
                    members.push(roots[j]);
                    grew = true;
                }
            }
        }
        let center = members.iter().sum::<C64>() / members.len() as f64;
        out.push(RootCluster { center, multiplicity: members.len() });
    }
    out
}

/// Greedy nearest-pair matching of two root multisets. Returns the maximum
/// matched distance, or `None` when the sizes differ.
pub fn match_roots(a: &[C64], b: &[C64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            pairs.push(((x - y).norm(), i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut ua = vec![false; a.len()];
    let mut ub = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    let mut matched = 0;
    for (d, i, j) in pairs {
        if !ua[i] && !ub[j] {
            ua[i] = true;
            ub[j] = true;
            worst = worst.max(d);
            matched += 1;
            if matched == a.len() {
                break;
            }
        }
    }
    Some(worst)
}
