use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numcore::C64;

use super::cauchy::CauchyTransform;

pub const DEFAULT_EPS: [f64; 3] = [1e-3, 1e-5, 1e-7];
/// Mass an atom must keep at two consecutive refinement levels.
pub const ATOM_MASS_TOL: f64 = 1e-6;
const FINAL_EPS: f64 = 1e-9;
const SCAN_POINTS: usize = 4000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensitySample {
    pub x: f64,
    pub density: f64,
    /// The two extrapolations through consecutive `eps` pairs disagree.
    pub flagged: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

#[derive(Clone, Debug)]
pub struct StieltjesResult {
    pub samples: Vec<DensitySample>,
    pub atoms: Vec<Atom>,
}

impl StieltjesResult {
    pub fn flagged(&self) -> Vec<usize> {
        self.samples.iter().enumerate().filter(|(_, s)| s.flagged).map(|(i, _)| i).collect()
    }

    pub fn require_converged(self) -> Result<Self> {
        match self.flagged().len() {
            0 => Ok(self),
            n => Err(Error::NonConvergentExtrapolation(n)),
        }
    }

    pub fn atom_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }
}

fn density_at(g: &CauchyTransform, x: f64, eps: f64) -> Result<f64> {
    Ok(-g.eval(C64::new(x, eps))?.im / PI)
}

/// Value at `eps = 0` of the line through `(e1, d1)` and `(e2, d2)`.
fn linear_limit(e1: f64, d1: f64, e2: f64, d2: f64) -> f64 {
    (e1 * d2 - e2 * d1) / (e1 - e2)
}

/// `-(1/pi) Im G(x + i eps)` extrapolated linearly to `eps = 0` through the
/// two smallest `eps`.
pub fn stieltjes_density(g: &CauchyTransform, xs: &[f64], eps: &[f64]) -> Result<Vec<DensitySample>> {
    if eps.len() < 2 || eps.windows(2).any(|w| !(w[1] < w[0])) || eps.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidParams("eps schedule must be positive and decreasing, length >= 2".into()));
    }
    xs.par_iter()
        .map(|&x| {
            let d: Vec<f64> = eps.iter().map(|&e| density_at(g, x, e)).collect::<Result<_>>()?;
            let k = eps.len() - 1;
            let density = linear_limit(eps[k - 1], d[k - 1], eps[k], d[k]);
            let flagged = if k >= 2 {
                let coarse = linear_limit(eps[k - 2], d[k - 2], eps[k - 1], d[k - 1]);
                (coarse - density).abs() > 1e-3 * (1.0 + density.abs())
            } else {
                false
            };
            Ok(DensitySample { x, density: density.max(0.0), flagged })
        })
        .collect()
}

fn point_mass(g: &CauchyTransform, x: f64, eps: f64) -> f64 {
    g.eval(C64::new(x, eps)).map(|v| -eps * v.im).unwrap_or(f64::INFINITY)
}

/// Maximizer of `w` on `[lo, hi]`, assumed unimodal.
fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = f(d);
        }
    }
    (lo + hi) / 2.0
}

/// Follows a candidate peak of `-eps Im G(x + i eps)` down to small `eps`;
/// a pole keeps its height, a smooth density does not.
fn refine(g: &CauchyTransform, x0: f64, eps0: f64) -> Option<Atom> {
    let mut x = x0;
    let mut window = 5.0 * eps0;
    let mut eps = eps0 / 10.0;
    let mut masses: Vec<f64> = Vec::new();
    while eps >= FINAL_EPS * 0.999 {
        x = golden_max(|y| point_mass(g, y, eps), x - window, x + window, eps * 1e-3);
        let m = point_mass(g, x, eps);
        if !m.is_finite() {
            return Some(Atom { location: x, mass: f64::NAN });
        }
        if m < ATOM_MASS_TOL {
            return None;
        }
        masses.push(m);
        window = 5.0 * eps;
        eps /= 10.0;
    }
    let n = masses.len();
    if n < 2 || (masses[n - 1] - masses[n - 2]).abs() > 1e-3 * masses[n - 1] {
        return None;
    }
    Some(Atom { location: x, mass: masses[n - 1] })
}

/// Atoms of the measure inside `[lo, hi]`.
pub fn detect_atoms(g: &CauchyTransform, lo: f64, hi: f64) -> Result<Vec<Atom>> {
    if !(hi > lo) {
        return Err(Error::InvalidParams(format!("empty interval [{lo}, {hi}]")));
    }
    let h = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let xs: Vec<f64> = (0..SCAN_POINTS).map(|k| lo + h * k as f64).collect();
    let w: Vec<f64> = xs.par_iter().map(|&x| point_mass(g, x, h)).collect();
    let candidates: Vec<f64> = (0..SCAN_POINTS)
        .filter(|&k| {
            let left = if k > 0 { w[k - 1] } else { f64::NEG_INFINITY };
            let right = if k + 1 < SCAN_POINTS { w[k + 1] } else { f64::NEG_INFINITY };
            w[k] > ATOM_MASS_TOL && w[k] >= left && w[k] > right
        })
        .map(|k| xs[k])
        .collect();
    let found: Vec<Option<Atom>> = candidates.par_iter().map(|&x| refine(g, x, h)).collect();
    let mut atoms: Vec<Atom> = Vec::new();
    for a in found.into_iter().flatten() {
        if !a.mass.is_finite() {
            return Err(Error::PoleHit(format!("{}", a.location)));
        }
        if a.location < lo - h || a.location > hi + h {
            continue;
        }
        if atoms.iter().all(|b| (b.location - a.location).abs() > 1e-6) {
            atoms.push(a);
        }
    }
    atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
    Ok(atoms)
}

/// Density on `xs` and atoms within the range of `xs`.
pub fn stieltjes_invert(g: &CauchyTransform, xs: &[f64], eps: &[f64]) -> Result<StieltjesResult> {
    let samples = stieltjes_density(g, xs, eps)?;
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let atoms = detect_atoms(g, lo, hi)?;
    Ok(StieltjesResult { samples, atoms })
}

/// `int_lo^hi f` through `x = c + r cos(theta)` and the trapezoid rule in
/// `theta`; square-root edges become smooth.
pub fn integrate_density(f: impl Fn(f64) -> f64 + Sync, lo: f64, hi: f64, n: usize) -> f64 {
    let c = (lo + hi) / 2.0;
    let r = (hi - lo) / 2.0;
    let h = PI / n as f64;
    (1..n).into_par_iter().map(|k| {
        let th = h * k as f64;
        f(c + r * th.cos()) * r * th.sin()
    }).sum::<f64>()
        * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn semicircle_density() {
        let xs: Vec<f64> = (1..40).map(|k| -2.0 + 0.1 * k as f64).collect();
        let d = stieltjes_density(&CauchyTransform::Wigner, &xs, &DEFAULT_EPS).unwrap();
        for s in d {
            let exact = (4.0 - s.x * s.x).max(0.0).sqrt() / (2.0 * PI);
            assert!((s.density - exact).abs() < 1e-4, "{} {} {}", s.x, s.density, exact);
        }
    }

    #[test]
    fn delta_detected() {
        let atoms = detect_atoms(&CauchyTransform::delta(0.0), -1.0, 1.0).unwrap();
        assert_eq!(atoms.len(), 1);
        assert!(atoms[0].location.abs() < 1e-9 && (atoms[0].mass - 1.0).abs() < 1e-6);
    }

    #[test]
    fn semicircle_has_no_atoms() {
        assert!(detect_atoms(&CauchyTransform::Wigner, -3.0, 3.0).unwrap().is_empty());
    }

    #[test]
    fn substitution_integral() {
        let m = integrate_density(|x| (4.0 - x * x).max(0.0).sqrt() / (2.0 * PI), -2.0, 2.0, 200);
        assert!((m - 1.0).abs() < 1e-12);
    }
}
