//! Python bindings. Matrices are lists of rows, vectors are lists; entries may
//! be Python `complex` or `float`.

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use ranktwo::measures::{self, CauchyTransform as CoreCauchy, DEFAULT_EPS};
use ranktwo::meixner as mx;
use ranktwo::numcore::{CMatrix, CVector, C64};
use ranktwo::rank2::{self, Rank2Perturbation};
use ranktwo::singvals::{self, SmallestSv};
use ranktwo::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::DimensionMismatch(_)
        | Error::InvalidParams(_)
        | Error::HypothesisViolated(_)
        | Error::NotSelfAdjoint(_)
        | Error::UnsupportedRegion(_)
        | Error::ScalarMultipleCase => PyValueError::new_err(e.to_string()),
        _ => PyArithmeticError::new_err(e.to_string()),
    }
}

fn matrix(rows: Vec<Vec<C64>>) -> PyResult<CMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(PyValueError::new_err("matrix rows must be non-empty and of equal length"));
    }
    Ok(CMatrix::from_rows(&rows))
}

fn vector(v: Vec<C64>) -> CVector {
    CVector::new(v)
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Eigenvalues of `A - s u w* - t g h*`, from the characteristic polynomial
/// `det(z - A) R_{s,t}(z)`.
#[pyfunction]
fn perturbed_spectrum(
    a: Vec<Vec<C64>>,
    u: Vec<C64>,
    w: Vec<C64>,
    g: Vec<C64>,
    h: Vec<C64>,
    s: C64,
    t: C64,
) -> PyResult<Vec<C64>> {
    let p = Rank2Perturbation::general(&matrix(a)?, &vector(u), &vector(w), &vector(g), &vector(h), s, t)
        .map_err(py_err)?;
    rank2::perturbed_char_poly(&p).and_then(|q| q.roots()).map_err(py_err)
}

/// Dense eigenvalues of `A - s u (Au)* - t (Au) u*`.
#[pyfunction]
fn antidiagonal_spectrum(a: Vec<Vec<C64>>, u: Vec<C64>, s: f64, t: f64) -> PyResult<Vec<C64>> {
    Rank2Perturbation::antidiagonal_au(&matrix(a)?, &vector(u), c(s), c(t))
        .and_then(|p| p.eigenvalues())
        .map_err(py_err)
}

/// Roots of the limit polynomial `q` of `A - r(alpha u w* + beta g h*)`.
#[pyfunction]
fn limit_roots(a: Vec<Vec<C64>>, u: Vec<C64>, w: Vec<C64>, g: Vec<C64>, h: Vec<C64>) -> PyResult<Vec<C64>> {
    let p = Rank2Perturbation::general(&matrix(a)?, &vector(u), &vector(w), &vector(g), &vector(h), c(0.0), c(0.0))
        .map_err(py_err)?;
    Ok(rank2::limit_polynomial_q(&p).map_err(py_err)?.roots)
}

#[pyclass(get_all, frozen, skip_from_py_object)]
#[derive(Clone)]
struct Interlacing {
    applies: bool,
    x0: f64,
    lambda_min: f64,
    lambda_max: f64,
    m: f64,
    q: f64,
}

#[pyfunction]
fn interlacing_condition(a: Vec<Vec<C64>>, u: Vec<C64>, s: f64, t: f64) -> PyResult<Interlacing> {
    let d = rank2::interlacing_condition(&matrix(a)?, &vector(u), s, t).map_err(py_err)?;
    Ok(Interlacing { applies: d.applies, x0: d.x0, lambda_min: d.lambda_min, lambda_max: d.lambda_max, m: d.m, q: d.q })
}

#[pyfunction]
fn verify_interlacing(a: Vec<f64>, b: Vec<f64>) -> PyResult<bool> {
    rank2::verify_interlacing(&a, &b).map_err(py_err)
}

/// `B - tau v u*` for unit `u`, `v`.
#[pyclass(frozen)]
struct SVPerturbation {
    inner: singvals::SVPerturbation,
}

#[pymethods]
impl SVPerturbation {
    #[new]
    fn new(b: Vec<Vec<C64>>, u: Vec<C64>, v: Vec<C64>) -> PyResult<Self> {
        let inner = singvals::SVPerturbation::new(&matrix(b)?, &vector(u), &vector(v), 0.0).map_err(py_err)?;
        Ok(SVPerturbation { inner })
    }

    fn singular_values(&self, tau: f64) -> PyResult<Vec<f64>> {
        self.inner.singular_values_at(tau).map_err(py_err)
    }

    /// Limits of `sigma_2, ..., sigma_n` as `tau -> infinity`.
    fn limits(&self) -> PyResult<Vec<f64>> {
        Ok(singvals::sv_limit_polynomial(&self.inner).map_err(py_err)?.limits)
    }

    /// `("vanishing", rate, inverse_image_rate)` or `("convergent", limit, limit)`.
    fn smallest(&self) -> PyResult<(String, f64, f64)> {
        let p = &self.inner;
        Ok(match singvals::smallest_sv_asymptotics(&p.b, &p.u, &p.v).map_err(py_err)? {
            SmallestSv::VanishesLinearly { rate, inverse_image_rate } => ("vanishing".into(), rate, inverse_image_rate),
            SmallestSv::ConvergesTo { limit, .. } => ("convergent".into(), limit, limit),
        })
    }

    /// Log-log slopes of `|sigma_j(tau) - limit|` over `taus`, `j >= 2`.
    fn slopes(&self, taus: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(singvals::sv_convergence_table(&self.inner, &taus).map_err(py_err)?.slopes)
    }
}

/// A probability measure on the line through its Cauchy transform.
#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct CauchyTransform {
    inner: CoreCauchy,
}

#[pymethods]
impl CauchyTransform {
    #[staticmethod]
    fn wigner() -> Self {
        CauchyTransform { inner: CoreCauchy::Wigner }
    }

    #[staticmethod]
    fn bernoulli() -> Self {
        CauchyTransform { inner: CoreCauchy::bernoulli() }
    }

    #[staticmethod]
    fn delta(a: f64) -> Self {
        CauchyTransform { inner: CoreCauchy::delta(a) }
    }

    #[staticmethod]
    fn atoms(atoms: Vec<(f64, f64)>) -> Self {
        CauchyTransform { inner: CoreCauchy::Atoms(atoms) }
    }

    #[staticmethod]
    fn meixner(gamma: f64, a: f64, b: f64, c: f64) -> PyResult<Self> {
        Ok(CauchyTransform { inner: mx::MeixnerParams::new(gamma, a, b, c).map_err(py_err)?.cauchy() })
    }

    fn __call__(&self, z: C64) -> PyResult<C64> {
        self.inner.eval(z).map_err(py_err)
    }

    fn first_moment(&self) -> f64 {
        self.inner.first_moment()
    }

    /// `1/G_U = q/G + (1 - q) z + (q - p) m` with `m` the first moment.
    fn u_transform(&self, p: f64, q: f64) -> PyResult<Self> {
        let m = self.inner.first_moment();
        Ok(CauchyTransform { inner: measures::u_transform(&self.inner, p, q, m).map_err(py_err)? })
    }

    fn t_transform(&self, tau: f64) -> PyResult<Self> {
        Ok(CauchyTransform { inner: measures::t_transform(&self.inner, tau).map_err(py_err)? })
    }

    fn w_transform(&self, s: f64, t: f64) -> PyResult<Self> {
        let m = self.inner.first_moment();
        Ok(CauchyTransform { inner: measures::w_transform(&self.inner, s, t, m).map_err(py_err)? })
    }

    /// Stieltjes-inverted density on `xs`.
    #[pyo3(signature = (xs, eps=None))]
    fn density(&self, xs: Vec<f64>, eps: Option<Vec<f64>>) -> PyResult<Vec<f64>> {
        let eps = eps.unwrap_or_else(|| DEFAULT_EPS.to_vec());
        let d = measures::stieltjes_density(&self.inner, &xs, &eps).map_err(py_err)?;
        Ok(d.into_iter().map(|s| s.density).collect())
    }

    /// `(location, mass)` of atoms in `[lo, hi]`.
    fn find_atoms(&self, lo: f64, hi: f64) -> PyResult<Vec<(f64, f64)>> {
        let a = measures::detect_atoms(&self.inner, lo, hi).map_err(py_err)?;
        Ok(a.into_iter().map(|a| (a.location, a.mass)).collect())
    }
}

/// Free Meixner law `mu_(gamma, a, b, c)`.
#[pyclass(frozen)]
struct MeixnerParams {
    inner: mx::MeixnerParams,
}

#[pymethods]
impl MeixnerParams {
    #[new]
    fn new(gamma: f64, a: f64, b: f64, c: f64) -> PyResult<Self> {
        Ok(MeixnerParams { inner: mx::MeixnerParams::new(gamma, a, b, c).map_err(py_err)? })
    }

    #[getter]
    fn params(&self) -> (f64, f64, f64, f64) {
        let u = &self.inner;
        (u.gamma, u.a, u.b, u.c)
    }

    fn density(&self, x: f64) -> PyResult<f64> {
        mx::meixner_density(&self.inner, x).map_err(py_err)
    }

    /// Atom locations by the classification rule.
    fn atom_locations(&self) -> Vec<f64> {
        mx::classify_atoms(&self.inner).atom_locations
    }

    /// `(location, mass)` of the atoms that carry mass.
    fn atoms(&self) -> Vec<(f64, f64)> {
        mx::meixner_atoms(&self.inner)
    }

    fn u_transform(&self, s: f64, t: f64) -> PyResult<Self> {
        Ok(MeixnerParams { inner: mx::u_transform_params(&self.inner, s, t).map_err(py_err)? })
    }

    /// `(count, flagged)` for `U^{s,s}` from the transition ranges.
    fn predicted_atom_count(&self, s: f64) -> PyResult<(usize, bool)> {
        let p = mx::predicted_atom_count(&self.inner, s).map_err(py_err)?;
        Ok((p.count, p.flagged))
    }

    fn cauchy(&self) -> CauchyTransform {
        CauchyTransform { inner: self.inner.cauchy() }
    }
}

#[pymodule]
fn ranktwo_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(perturbed_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(antidiagonal_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(limit_roots, m)?)?;
    m.add_function(wrap_pyfunction!(interlacing_condition, m)?)?;
    m.add_function(wrap_pyfunction!(verify_interlacing, m)?)?;
    m.add_class::<Interlacing>()?;
    m.add_class::<SVPerturbation>()?;
    m.add_class::<CauchyTransform>()?;
    m.add_class::<MeixnerParams>()?;
    Ok(())
}
