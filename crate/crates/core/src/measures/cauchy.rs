use crate::error::{Error, Result};
use crate::numcore::C64;

use super::jacobi::JacobiData;

/// Denominators of the transform formulas below this size count as zero.
pub const DENOM_TOL: f64 = 1e-14;

/// Cauchy transform `G(z) = int dmu(x) / (z - x)` in one of several
/// evaluation modes.
#[derive(Clone, Debug, PartialEq)]
pub enum CauchyTransform {
    /// `(location, mass)` pairs.
    Atoms(Vec<(f64, f64)>),
    Jacobi(JacobiData),
    /// Semicircle law on `[-2, 2]`.
    Wigner,
    /// `1/G_U = q/G + (1 - q) z + (q - p) m`.
    U { inner: Box<CauchyTransform>, p: f64, q: f64, m: f64 },
    /// `1/G_W = s + (1 + t(z^2 G - m - z)) / ((1 - tm + tz) G - t)`.
    W { inner: Box<CauchyTransform>, s: f64, t: f64, m: f64 },
}

/// Semicircle Cauchy transform `(z - sqrt(z^2 - 4))/2`, branch chosen so
/// that `G` lies in the closed lower half-plane and `|G| <= 1`.
pub fn wigner_g(z: C64) -> C64 {
    let r = (z - 2.0).sqrt() * (z + 2.0).sqrt();
    // the two roots multiply to 1; form the small one by division to avoid cancellation
    let big = if (z + r).norm() >= (z - r).norm() { (z + r) / 2.0 } else { (z - r) / 2.0 };
    let small = 1.0 / big;
    if small.norm() < 1.0 - 1e-12 || small.im <= big.im {
        small
    } else {
        big
    }
}

impl CauchyTransform {
    pub fn delta(a: f64) -> Self {
        CauchyTransform::Atoms(vec![(a, 1.0)])
    }

    /// `(delta_{-1} + delta_1) / 2`.
    pub fn bernoulli() -> Self {
        CauchyTransform::Atoms(vec![(-1.0, 0.5), (1.0, 0.5)])
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        if z.im < 0.0 {
            return Err(Error::UnsupportedRegion(format!("Im z < 0 at {z}")));
        }
        match self {
            CauchyTransform::Atoms(atoms) => {
                let mut acc = C64::new(0.0, 0.0);
                for &(x, w) in atoms {
                    let d = z - x;
                    if d.norm() == 0.0 {
                        return Err(Error::PoleHit(format!("{z}")));
                    }
                    acc += w / d;
                }
                Ok(acc)
            }
            CauchyTransform::Jacobi(j) => Ok(j.cauchy(z)),
            CauchyTransform::Wigner => Ok(wigner_g(z)),
            CauchyTransform::U { inner, p, q, m } => {
                let g = inner.eval(z)?;
                let recip = if *q == 0.0 { z - p * m } else { q / g + (1.0 - q) * z + (q - p) * m };
                invert(recip, z)
            }
            CauchyTransform::W { inner, s, t, m } => {
                let g = inner.eval(z)?;
                let den = (1.0 - t * m + t * z) * g - t;
                if den.norm() <= DENOM_TOL * (1.0 + g.norm() * (1.0 + (t * z).norm())) {
                    return Err(Error::DenominatorVanishes(format!("{z}")));
                }
                let recip = s + (1.0 + t * (z * z * g - m - z)) / den;
                invert(recip, z)
            }
        }
    }

    /// `int x dmu(x)`.
    pub fn first_moment(&self) -> f64 {
        match self {
            CauchyTransform::Atoms(atoms) => atoms.iter().map(|(x, w)| x * w).sum(),
            CauchyTransform::Jacobi(j) => j.a_at(0),
            CauchyTransform::Wigner => 0.0,
            CauchyTransform::U { p, m, .. } => p * m,
            CauchyTransform::W { s, t, m, .. } => m * (1.0 - t * m) - s,
        }
    }
}

fn invert(recip: C64, z: C64) -> Result<C64> {
    if recip.norm() == 0.0 {
        return Err(Error::PoleHit(format!("{z}")));
    }
    Ok(1.0 / recip)
}

pub fn cauchy_eval(g: &CauchyTransform, z: C64) -> Result<C64> {
    g.eval(z)
}

/// Absolutely continuous part of a measure.
#[derive(Clone, Debug, PartialEq)]
pub enum AcDensity {
    /// `sqrt(4b - (x - center)^2) / (2 pi b)` on `center +- 2 sqrt(b)`.
    Semicircle { center: f64, b: f64 },
    /// Samples on an increasing grid, linearly interpolated.
    Sampled { xs: Vec<f64>, values: Vec<f64> },
}

impl AcDensity {
    pub fn support(&self) -> (f64, f64) {
        match self {
            AcDensity::Semicircle { center, b } => (center - 2.0 * b.sqrt(), center + 2.0 * b.sqrt()),
            AcDensity::Sampled { xs, .. } => (xs[0], xs[xs.len() - 1]),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            AcDensity::Semicircle { center, b } => {
                let y = x - center;
                (4.0 * b - y * y).max(0.0).sqrt() / (2.0 * std::f64::consts::PI * b)
            }
            AcDensity::Sampled { xs, values } => {
                if x < xs[0] || x > xs[xs.len() - 1] {
                    return 0.0;
                }
                let k = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
                let (x0, x1) = (xs[k - 1], xs[k]);
                let f = if x1 > x0 { (x - x0) / (x1 - x0) } else { 0.0 };
                values[k - 1] * (1.0 - f) + values[k] * f
            }
        }
    }
}

/// Probability measure on the line: atoms, an optional density and, when
/// known, Jacobi coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralMeasure {
    pub atoms: Vec<(f64, f64)>,
    pub ac: Option<AcDensity>,
    pub jacobi: Option<JacobiData>,
}

impl SpectralMeasure {
    pub fn atomic(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.iter().any(|&(x, w)| !x.is_finite() || !(w > 0.0)) {
            return Err(Error::InvalidParams("atoms need finite locations and positive masses".into()));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidParams(format!("total mass {total}")));
        }
        Ok(SpectralMeasure { atoms, ac: None, jacobi: None })
    }

    pub fn wigner() -> Self {
        SpectralMeasure {
            atoms: vec![],
            ac: Some(AcDensity::Semicircle { center: 0.0, b: 1.0 }),
            jacobi: Some(JacobiData::wigner()),
        }
    }

    pub fn delta(a: f64) -> Self {
        SpectralMeasure { atoms: vec![(a, 1.0)], ac: None, jacobi: JacobiData::finite(vec![a], vec![]).ok() }
    }

    pub fn bernoulli() -> Self {
        SpectralMeasure {
            atoms: vec![(-1.0, 0.5), (1.0, 0.5)],
            ac: None,
            jacobi: JacobiData::finite(vec![0.0, 0.0], vec![1.0]).ok(),
        }
    }

    /// Preferred evaluator: Jacobi data, then closed forms, then atoms.
    pub fn cauchy(&self) -> Result<CauchyTransform> {
        if let Some(j) = &self.jacobi {
            return Ok(CauchyTransform::Jacobi(j.clone()));
        }
        match &self.ac {
            None => Ok(CauchyTransform::Atoms(self.atoms.clone())),
            Some(AcDensity::Semicircle { center, b }) if self.atoms.is_empty() && *b > 0.0 => {
                let j = JacobiData::with_tail(vec![], vec![], *center, b.sqrt())?;
                Ok(CauchyTransform::Jacobi(j))
            }
            Some(_) => Err(Error::UnsupportedRegion("no evaluator for a sampled density".into())),
        }
    }
}
