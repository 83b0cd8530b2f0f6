//! Free Meixner laws `mu_(gamma, a, b, c)`: densities, atoms, the U-transform
//! on parameters and the resulting changes in the number of atoms.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::measures::{CauchyTransform, JacobiData};
use crate::numcore::C64;

/// Tolerance of the exact predicates `c = 1`, `gamma = a`, `Delta_g = 0`.
pub const CASE_TOL: f64 = 1e-10;
/// Parameters closer than this (relative) to a range boundary are flagged.
pub const BOUNDARY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeixnerParams {
    pub gamma: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl MeixnerParams {
    pub fn new(gamma: f64, a: f64, b: f64, c: f64) -> Result<Self> {
        if ![gamma, a, b, c].iter().all(|x| x.is_finite()) || b < 0.0 || c < 0.0 {
            return Err(Error::InvalidParams(format!("({gamma}, {a}, {b}, {c}) needs b, c >= 0")));
        }
        Ok(MeixnerParams { gamma, a, b, c })
    }

    pub fn wigner() -> Self {
        MeixnerParams { gamma: 0.0, a: 0.0, b: 1.0, c: 1.0 }
    }

    pub fn marchenko_pastur(alpha: f64, lambda: f64) -> Result<Self> {
        Self::new(alpha * lambda, alpha * (1.0 + lambda), alpha * alpha * lambda, 1.0)
    }

    /// `f` in `y = x - a`: `[constant, linear, quadratic]`.
    pub fn f_coeffs(&self) -> [f64; 3] {
        let d = self.gamma - self.a;
        [d * d + self.b * self.c * self.c, (self.c - 2.0) * d, 1.0 - self.c]
    }

    pub fn f(&self, x: f64) -> f64 {
        let y = x - self.a;
        let [k0, k1, k2] = self.f_coeffs();
        k0 + y * (k1 + y * k2)
    }

    /// `Delta_g = c^2 ((gamma - a)^2 - 4b(1 - c))`.
    pub fn discriminant(&self) -> f64 {
        let d = self.gamma - self.a;
        self.c * self.c * (d * d - 4.0 * self.b * (1.0 - self.c))
    }

    pub fn support(&self) -> (f64, f64) {
        let r = 2.0 * self.b.sqrt();
        (self.a - r, self.a + r)
    }

    /// Jacobi data `a_0 = gamma`, `b_0 = sqrt(bc)`, then `a`, `sqrt(b)` forever.
    pub fn jacobi(&self) -> JacobiData {
        JacobiData { a: vec![self.gamma], b: vec![(self.b * self.c).sqrt()], tail: Some((self.a, self.b.sqrt())) }
    }

    pub fn cauchy(&self) -> CauchyTransform {
        CauchyTransform::Jacobi(self.jacobi())
    }
}

fn near(x: f64, y: f64) -> bool {
    (x - y).abs() <= CASE_TOL * (1.0 + x.abs().max(y.abs()))
}

/// `c sqrt(4b - (x - a)^2) / (2 pi f(x))` inside the support, 0 outside.
pub fn meixner_density(u: &MeixnerParams, x: f64) -> Result<f64> {
    let y = x - u.a;
    let w = 4.0 * u.b - y * y;
    if w <= 0.0 || u.c == 0.0 {
        return Ok(0.0);
    }
    let f = u.f(x);
    if f.abs() <= CASE_TOL * (1.0 + u.f_coeffs()[0].abs()) {
        return Err(Error::DensityPole(x));
    }
    Ok(u.c * w.sqrt() / (2.0 * PI * f))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeixnerClassification {
    pub atom_count: usize,
    pub atom_locations: Vec<f64>,
    pub discriminant: f64,
    pub f_coeffs: [f64; 3],
}

/// Atom rules: `c = 0` is `delta_gamma`; `c = 1` gives one atom at
/// `gamma + b c^2/(gamma - a)` unless `gamma = a`; otherwise `Delta_g > 0`
/// gives atoms at the two roots of `f`.
pub fn classify_atoms(u: &MeixnerParams) -> MeixnerClassification {
    let discriminant = u.discriminant();
    let f_coeffs = u.f_coeffs();
    let locs = if u.c == 0.0 {
        vec![u.gamma]
    } else if near(u.c, 1.0) {
        if near(u.gamma, u.a) {
            vec![]
        } else {
            vec![u.gamma + u.b * u.c * u.c / (u.gamma - u.a)]
        }
    } else {
        let d = u.gamma - u.a;
        let scale = u.c * u.c * (d * d + 4.0 * u.b);
        if discriminant > CASE_TOL * scale {
            let [k0, k1, k2] = f_coeffs;
            let sq = (k1 * k1 - 4.0 * k2 * k0).max(0.0).sqrt();
            // stable quadratic roots
            let qq = -0.5 * (k1 + k1.signum() * sq);
            let mut r = if qq == 0.0 { vec![sq / (2.0 * k2), -sq / (2.0 * k2)] } else { vec![qq / k2, k0 / qq] };
            r.iter_mut().for_each(|y| *y += u.a);
            r.sort_by(f64::total_cmp);
            r
        } else {
            vec![]
        }
    };
    MeixnerClassification { atom_count: locs.len(), atom_locations: locs, discriminant, f_coeffs }
}

/// Atoms that are poles of the Cauchy transform, with their masses.
/// A rule location off the physical sheet carries mass 0 and is dropped.
pub fn meixner_atoms(u: &MeixnerParams) -> Vec<(f64, f64)> {
    if u.c == 0.0 {
        return vec![(u.gamma, 1.0)];
    }
    let sb = u.b.sqrt();
    classify_atoms(u)
        .atom_locations
        .into_iter()
        .filter_map(|x| {
            let t = if sb == 0.0 {
                1.0 / (x - u.a)
            } else {
                crate::measures::wigner_g(C64::new((x - u.a) / sb, 0.0)).re / sb
            };
            let d = x - u.gamma - u.b * u.c * t;
            if d.abs() > 1e-8 * (1.0 + x.abs()) {
                return None;
            }
            let dd = 1.0 + u.b * u.c * t * t / (1.0 - u.b * t * t);
            Some((x, 1.0 / dd))
        })
        .collect()
}

/// `((1-s-t) gamma, a, b, c (1-s)(1-t))`; `(1-s)(1-t) = 0` gives the point
/// mass at `(1-s-t) gamma` (`c = 0`).
pub fn u_transform_params(u: &MeixnerParams, s: f64, t: f64) -> Result<MeixnerParams> {
    let q = (1.0 - s) * (1.0 - t);
    if q < 0.0 {
        return Err(Error::InvalidParams(format!("(1-s)(1-t) = {q} < 0")));
    }
    MeixnerParams::new((1.0 - s - t) * u.gamma, u.a, u.b, u.c * q)
}

/// Inverse of `u_transform_params(., s, s)` for `s` not in `{1/2, 1}`.
pub fn inverse_u_params(u: &MeixnerParams, s: f64) -> Result<MeixnerParams> {
    if s == 1.0 || s == 0.5 {
        return Err(Error::InvalidParams(format!("s = {s} is not invertible")));
    }
    MeixnerParams::new(u.gamma / (1.0 - 2.0 * s), u.a, u.b, u.c / ((1.0 - s) * (1.0 - s)))
}

/// Union of open intervals and isolated points, minus excluded points.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SSet {
    pub intervals: Vec<(f64, f64)>,
    pub points: Vec<f64>,
    pub excluded: Vec<f64>,
}

impl SSet {
    pub fn contains(&self, s: f64) -> bool {
        if self.excluded.iter().any(|&e| near(e, s)) {
            return false;
        }
        self.points.iter().any(|&p| near(p, s)) || self.intervals.iter().any(|&(lo, hi)| lo < s && s < hi)
    }

    /// Distance to the nearest finite endpoint, point or exclusion.
    pub fn boundary_distance(&self, s: f64) -> f64 {
        self.intervals
            .iter()
            .flat_map(|&(lo, hi)| [lo, hi])
            .chain(self.points.iter().copied())
            .chain(self.excluded.iter().copied())
            .filter(|x| x.is_finite())
            .map(|x| (x - s).abs())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty() && self.points.is_empty()
    }
}

/// Position of the parameters relative to the zero set of the discriminant
/// of `phi`, which in `(a/gamma, b/gamma^2)` is the parabola
/// `(1 - x)^2 - 4(1 - x) - 4y = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConicPosition {
    Inside,
    On,
    Outside,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PhaseCase {
    OneToTwo(ConicPosition),
    /// `c = 1`, `gamma = a`.
    ZeroToOneEqual,
    /// `c != 1`.
    ZeroToOneGeneral,
    /// `c = 1`, `gamma = a`.
    ZeroToTwoEqual,
    /// `c != 1`, `Delta_g < 0`.
    ZeroToTwoStrict,
    /// `Delta_g = 0` and `2bc + gamma^2 - a gamma = 0`.
    ZeroToTwoDoubleRoot,
    /// `Delta_g = 0` otherwise.
    ZeroToTwoBoundary,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseRange {
    pub set: SSet,
    pub case: PhaseCase,
    /// Coefficients `[k0, k1, k2]` of the quadratic in `s` whose sign decides
    /// the transition, when there is one.
    pub quadratic: Option<[f64; 3]>,
}

fn quad_roots(k: [f64; 3]) -> Option<(f64, f64)> {
    let [k0, k1, k2] = k;
    let disc = k1 * k1 - 4.0 * k2 * k0;
    if disc < 0.0 || k2 == 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let qq = -0.5 * (k1 + if k1 >= 0.0 { sq } else { -sq });
    let (r1, r2) = if qq == 0.0 { (0.0, 0.0) } else { (qq / k2, k0 / qq) };
    Some((r1.min(r2), r1.max(r2)))
}

/// `s` with `c (1-s)^2 = 1`.
fn unit_c_points(u: &MeixnerParams) -> Vec<f64> {
    if u.c <= 0.0 {
        return vec![];
    }
    let r = 1.0 / u.c.sqrt();
    vec![1.0 - r, 1.0 + r]
}

fn one_atom(u: &MeixnerParams) -> bool {
    u.c > 0.0 && near(u.c, 1.0) && !near(u.gamma, u.a)
}

fn zero_atoms(u: &MeixnerParams) -> bool {
    u.c > 0.0 && classify_atoms(u).atom_count == 0
}

/// `s` for which `U^{s,s}` of a one-atom law (`c = 1`, `gamma != a`) has two
/// atoms: `phi(s) = 4(b + gamma^2)s^2 - 4(gamma^2 - a gamma + 2b)s + (gamma - a)^2 > 0`
/// with `s` outside `{0, 1, 2}`.
pub fn phase_transition_1to2(u: &MeixnerParams) -> Result<PhaseRange> {
    if !one_atom(u) || u.b <= 0.0 {
        return Err(Error::HypothesisViolated("needs c = 1, gamma != a and b > 0".into()));
    }
    let (g, a, b) = (u.gamma, u.a, u.b);
    let d = g - a;
    let phi = [d * d, -4.0 * (g * g - a * g + 2.0 * b), 4.0 * (b + g * g)];
    let disc = b * (4.0 * g * d + 4.0 * b - d * d);
    let scale = b * (4.0 * g.abs() * d.abs() + 4.0 * b + d * d);
    let position = if disc.abs() <= CASE_TOL * scale {
        ConicPosition::On
    } else if disc < 0.0 {
        ConicPosition::Inside
    } else {
        ConicPosition::Outside
    };
    let mut set = SSet { excluded: vec![0.0, 1.0, 2.0], ..SSet::default() };
    match position {
        ConicPosition::Inside => set.intervals.push((f64::NEG_INFINITY, f64::INFINITY)),
        ConicPosition::On => {
            set.intervals.push((f64::NEG_INFINITY, f64::INFINITY));
            set.excluded.push(-phi[1] / (2.0 * phi[2]));
        }
        ConicPosition::Outside => {
            let (s1, s2) = quad_roots(phi).expect("positive discriminant");
            set.intervals.push((f64::NEG_INFINITY, s1));
            set.intervals.push((s2, f64::INFINITY));
        }
    }
    Ok(PhaseRange { set, case: PhaseCase::OneToTwo(position), quadratic: Some(phi) })
}

/// `s` for which `U^{s,s}` of an atomless law has one atom: the isolated
/// points `1 +- 1/sqrt(c)` where `c (1-s)^2 = 1`, unless `(1-2s) gamma = a`.
pub fn phase_transition_0to1(u: &MeixnerParams) -> Result<PhaseRange> {
    if !zero_atoms(u) {
        return Err(Error::HypothesisViolated("needs an atomless law with c > 0".into()));
    }
    let case = if near(u.c, 1.0) { PhaseCase::ZeroToOneEqual } else { PhaseCase::ZeroToOneGeneral };
    let points = unit_c_points(u).into_iter().filter(|&s| !near((1.0 - 2.0 * s) * u.gamma, u.a)).collect();
    Ok(PhaseRange { set: SSet { points, ..SSet::default() }, case, quadratic: None })
}

/// `s` for which `U^{s,s}` of an atomless law has two atoms.
pub fn phase_transition_0to2(u: &MeixnerParams) -> Result<PhaseRange> {
    if !zero_atoms(u) {
        return Err(Error::HypothesisViolated("needs an atomless law with c > 0".into()));
    }
    let (g, a, b, c) = (u.gamma, u.a, u.b, u.c);
    let mut excluded = vec![1.0];
    excluded.extend(unit_c_points(u));
    if near(c, 1.0) {
        // 4s((a^2 + b)s - 2b) > 0
        if b <= 0.0 && a == 0.0 {
            return Ok(PhaseRange { set: SSet::default(), case: PhaseCase::ZeroToTwoEqual, quadratic: None });
        }
        let h = 2.0 * b / (a * a + b);
        let set = SSet { intervals: vec![(f64::NEG_INFINITY, 0.0), (h, f64::INFINITY)], points: vec![], excluded };
        return Ok(PhaseRange { set, case: PhaseCase::ZeroToTwoEqual, quadratic: Some([0.0, -8.0 * b, 4.0 * (a * a + b)]) });
    }
    let d = g - a;
    // Delta_{g_s} / (c_s^2) as a quadratic in s
    let psi = [d * d - 4.0 * b * (1.0 - c), -4.0 * (g * d + 2.0 * b * c), 4.0 * (g * g + b * c)];
    let scale = d * d + 4.0 * b;
    let (case, intervals) = if psi[0].abs() <= CASE_TOL * scale {
        let s2 = (g * g - a * g + 2.0 * b * c) / (g * g + b * c);
        if s2.abs() <= CASE_TOL * (1.0 + s2.abs()) {
            (PhaseCase::ZeroToTwoDoubleRoot, vec![(f64::NEG_INFINITY, 0.0), (0.0, f64::INFINITY)])
        } else {
            (PhaseCase::ZeroToTwoBoundary, vec![(f64::NEG_INFINITY, s2.min(0.0)), (s2.max(0.0), f64::INFINITY)])
        }
    } else {
        let (s1, s2) = quad_roots(psi).ok_or_else(|| Error::UndefinedRange("psi has no real roots".into()))?;
        (PhaseCase::ZeroToTwoStrict, vec![(f64::NEG_INFINITY, s1), (s2, f64::INFINITY)])
    };
    Ok(PhaseRange { set: SSet { intervals, points: vec![], excluded }, case, quadratic: Some(psi) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AtomPrediction {
    pub count: usize,
    /// `s` lies within `BOUNDARY_TOL` of a range boundary.
    pub flagged: bool,
}

/// Atom count of `U^{s,s}(mu_u)` from the transition ranges, for laws with
/// zero atoms or one atom.
pub fn predicted_atom_count(u: &MeixnerParams, s: f64) -> Result<AtomPrediction> {
    let tol = BOUNDARY_TOL * (1.0 + s.abs());
    if one_atom(u) {
        let r = phase_transition_1to2(u)?;
        let flagged = r.set.boundary_distance(s) < tol;
        let count = if r.set.contains(s) {
            2
        } else if (s == 0.0 || near(s, 2.0)) && !near((1.0 - 2.0 * s) * u.gamma, u.a) {
            1
        } else {
            0
        };
        return Ok(AtomPrediction { count, flagged });
    }
    let r1 = phase_transition_0to1(u)?;
    let r2 = phase_transition_0to2(u)?;
    let flagged = r1.set.boundary_distance(s).min(r2.set.boundary_distance(s)) < tol;
    let count = if r2.set.contains(s) {
        2
    } else if r1.set.contains(s) {
        1
    } else {
        0
    };
    Ok(AtomPrediction { count, flagged })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wigner_rules() {
        let w = MeixnerParams::wigner();
        assert_eq!(w.f_coeffs(), [1.0, 0.0, 0.0]);
        assert_eq!(classify_atoms(&w).atom_count, 0);
        assert!((meixner_density(&w, 0.0).unwrap() - 1.0 / PI).abs() < 1e-15);
        assert_eq!(meixner_density(&w, 2.5).unwrap(), 0.0);
    }

    #[test]
    fn single_atom_location() {
        let u = MeixnerParams::new(1.0, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(classify_atoms(&u).atom_locations, vec![2.0]);
        // T(2) = 1 on the physical sheet, D(2) = 2 - 1 - 1 = 0, mass 1/(1 + 1/0) -> 0
        let u = MeixnerParams::new(2.0, 0.0, 1.0, 1.0).unwrap();
        let atoms = meixner_atoms(&u);
        assert_eq!(atoms.len(), 1);
        assert!((atoms[0].0 - 2.5).abs() < 1e-14);
    }

    #[test]
    fn off_sheet_atom_has_no_mass() {
        // the rule atom at 0.3 + 1/0.3 is not a pole of G
        let u = MeixnerParams::new(0.3, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(classify_atoms(&u).atom_count, 1);
        assert!(meixner_atoms(&u).is_empty());
    }

    #[test]
    fn parameter_map_round_trip() {
        let u = MeixnerParams::new(0.7, -0.2, 1.3, 0.6).unwrap();
        let v = u_transform_params(&u, 0.3, 0.3).unwrap();
        let w = inverse_u_params(&v, 0.3).unwrap();
        assert!((w.gamma - u.gamma).abs() < 1e-14 && (w.c - u.c).abs() < 1e-14);
        assert_eq!(u_transform_params(&u, 0.0, 0.0).unwrap(), u);
        assert!(u_transform_params(&u, 2.0, 0.0).is_err());
        assert_eq!(u_transform_params(&u, 1.0, 1.0).unwrap().c, 0.0);
    }

    #[test]
    fn equal_case_threshold() {
        let u = MeixnerParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
        let r = phase_transition_0to2(&u).unwrap();
        assert!(r.set.contains(1.5) && !r.set.contains(0.5) && !r.set.contains(2.0) && r.set.contains(-0.5));
        assert_eq!(phase_transition_0to1(&u).unwrap().set.points, vec![2.0]);
    }

    #[test]
    fn general_zero_to_one_points() {
        let u = MeixnerParams::new(1.0, 0.8, 1.0, 0.75).unwrap();
        let p = phase_transition_0to1(&u).unwrap().set.points;
        let r = 1.0 / 0.75f64.sqrt();
        assert!((p[0] - (1.0 - r)).abs() < 1e-15 && (p[1] - (1.0 + r)).abs() < 1e-15);
    }
}
