//! Python bindings: multivectors, fields on grids, the Dirac operator,
//! constant tables and the verification suites.

use std::collections::BTreeMap;

use cliffdirac::constants::{self, ConstantsTable, OmegaConvention};
use cliffdirac::dirac;
use cliffdirac::grid::{CliffordField, GridSpec};
use cliffdirac::harness::{run_suite, Suite, SuiteConfig};
use cliffdirac::report::to_json_17;
use cliffdirac::{AlgebraSignature, Error};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn signature(n: usize, m: Option<usize>, complex: bool) -> PyResult<AlgebraSignature> {
    let m = m.unwrap_or(n);
    if complex { AlgebraSignature::complex(n, m) } else { AlgebraSignature::real(n, m) }.map_err(py_err)
}

fn omega(name: &str) -> PyResult<OmegaConvention> {
    name.parse().map_err(py_err)
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

/// Element of R_{0,m} or C_m, coefficients indexed by blade bitmask.
#[pyclass(name = "Multivector", module = "pycliffdirac", skip_from_py_object)]
#[derive(Clone)]
struct PyMultivector {
    inner: cliffdirac::Multivector,
}

#[pymethods]
impl PyMultivector {
    #[new]
    #[pyo3(signature = (m, coeffs, complex = false))]
    fn new(m: usize, coeffs: Vec<Complex64>, complex: bool) -> PyResult<Self> {
        let sig = signature(m, Some(m), complex)?;
        let inner = cliffdirac::Multivector::from_coeffs(sig, coeffs).map_err(py_err)?;
        Ok(Self { inner })
    }

    /// Unit blade `e_A` for the bitmask `mask`.
    #[staticmethod]
    #[pyo3(signature = (m, mask, value = 1.0, complex = false))]
    fn blade(m: usize, mask: usize, value: f64, complex: bool) -> PyResult<Self> {
        let sig = signature(m, Some(m), complex)?;
        if mask >= sig.blade_count() {
            return Err(PyValueError::new_err(format!("blade mask {mask} outside the algebra")));
        }
        Ok(Self { inner: cliffdirac::Multivector::blade(sig, mask, value) })
    }

    #[staticmethod]
    #[pyo3(signature = (m, components, complex = false))]
    fn vector(m: usize, components: Vec<f64>, complex: bool) -> PyResult<Self> {
        let sig = signature(m, Some(m), complex)?;
        Ok(Self { inner: cliffdirac::Multivector::vector(sig, &components).map_err(py_err)? })
    }

    #[getter]
    fn coeffs(&self) -> Vec<Complex64> {
        self.inner.coeffs().to_vec()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.sig().m()
    }

    fn __mul__(&self, other: &Self) -> PyResult<Self> {
        Ok(Self { inner: self.inner.geometric_product(&other.inner).map_err(py_err)? })
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        Ok(Self { inner: self.inner.try_add(&other.inner).map_err(py_err)? })
    }

    fn __sub__(&self, other: &Self) -> PyResult<Self> {
        Ok(Self { inner: self.inner.try_sub(&other.inner).map_err(py_err)? })
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Multivector({:?})", self.inner.coeffs())
    }

    fn scale(&self, factor: f64) -> Self {
        Self { inner: self.inner.scale(factor) }
    }

    fn conjugate(&self) -> Self {
        Self { inner: self.inner.conjugate() }
    }

    fn grade(&self, k: usize) -> PyResult<Self> {
        Ok(Self { inner: self.inner.grade_project(k).map_err(py_err)? })
    }

    fn norm(&self) -> f64 {
        self.inner.norm()
    }

    fn vector_inverse(&self) -> PyResult<Self> {
        Ok(Self { inner: self.inner.vector_inverse().map_err(py_err)? })
    }
}

/// Clifford-valued field sampled at the cell centres of a periodic grid.
#[pyclass(name = "Field", module = "pycliffdirac", skip_from_py_object)]
#[derive(Clone)]
struct PyField {
    inner: CliffordField,
}

fn field_grid(n: usize, points: usize, extent: f64) -> PyResult<GridSpec> {
    GridSpec::new(n, points, extent).map_err(py_err)
}

#[pymethods]
impl PyField {
    /// Build a field from `{blade_mask: samples}`; samples follow the flat
    /// row-major cell order, last axis fastest.
    #[new]
    #[pyo3(signature = (n, points, extent, components, m = None, complex = false))]
    fn new(n: usize, points: usize, extent: f64, components: BTreeMap<usize, Vec<Complex64>>, m: Option<usize>, complex: bool) -> PyResult<Self> {
        let grid = field_grid(n, points, extent)?;
        let sig = signature(n, m, complex)?;
        let mut parts = vec![None; sig.blade_count()];
        for (mask, samples) in components {
            if mask >= parts.len() {
                return Err(PyValueError::new_err(format!("blade mask {mask} outside the algebra")));
            }
            parts[mask] = Some(samples);
        }
        Ok(Self { inner: CliffordField::from_components(grid, sig, parts).map_err(py_err)? })
    }

    /// `exp(-|x - centre|^2 / (2 width^2))` times the blade `e_mask`.
    #[staticmethod]
    #[pyo3(signature = (n, points, extent, width = 1.0, mask = 0, centre = None, m = None, complex = false))]
    #[allow(clippy::too_many_arguments)]
    fn gaussian(n: usize, points: usize, extent: f64, width: f64, mask: usize, centre: Option<Vec<f64>>, m: Option<usize>, complex: bool) -> PyResult<Self> {
        let grid = field_grid(n, points, extent)?;
        let sig = signature(n, m, complex)?;
        if mask >= sig.blade_count() {
            return Err(PyValueError::new_err(format!("blade mask {mask} outside the algebra")));
        }
        if width.is_nan() || width <= 0.0 {
            return Err(PyValueError::new_err("width must be positive"));
        }
        let centre = centre.unwrap_or_else(|| vec![0.0; n]);
        if centre.len() != n {
            return Err(PyValueError::new_err("centre needs one coordinate per axis"));
        }
        let coefficient = cliffdirac::Multivector::blade(sig, mask, 1.0);
        let inner = CliffordField::from_profile(grid, &coefficient, |x| {
            let r2: f64 = x.iter().zip(&centre).map(|(a, b)| (a - b) * (a - b)).sum();
            (-r2 / (2.0 * width * width)).exp()
        })
        .map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn shape(&self) -> (usize, usize, f64) {
        let g = self.inner.grid();
        (g.n(), g.points(), g.extent())
    }

    #[getter]
    fn spacing(&self) -> f64 {
        self.inner.grid().spacing()
    }

    /// Stored components as `{blade_mask: samples}`.
    fn components(&self) -> BTreeMap<usize, Vec<Complex64>> {
        self.inner
            .components()
            .iter()
            .enumerate()
            .filter_map(|(mask, c)| c.as_ref().map(|v| (mask, v.clone())))
            .collect()
    }

    fn value(&self, cell: usize) -> PyResult<PyMultivector> {
        if cell >= self.inner.grid().len() {
            return Err(PyValueError::new_err(format!("cell {cell} outside the grid")));
        }
        Ok(PyMultivector { inner: self.inner.value(cell) })
    }

    fn norm(&self, p: f64) -> PyResult<f64> {
        self.inner.norm(p).map_err(py_err)
    }

    fn weak_norm(&self, q: f64) -> PyResult<f64> {
        self.inner.weak_lq_norm(q).map_err(py_err)
    }

    fn inner_product(&self, other: &Self) -> PyResult<PyMultivector> {
        Ok(PyMultivector { inner: self.inner.inner_product_clifford(&other.inner).map_err(py_err)? })
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        Ok(Self { inner: self.inner.try_add(&other.inner).map_err(py_err)? })
    }

    fn __sub__(&self, other: &Self) -> PyResult<Self> {
        Ok(Self { inner: self.inner.try_sub(&other.inner).map_err(py_err)? })
    }

    fn scale(&self, factor: f64) -> Self {
        Self { inner: self.inner.scale(factor) }
    }

    fn dirac(&self) -> PyResult<Self> {
        Ok(Self { inner: dirac::dirac_apply(&self.inner).map_err(py_err)? })
    }

    fn dirac_power(&self, l: usize) -> PyResult<Self> {
        Ok(Self { inner: dirac::dirac_power(&self.inner, l).map_err(py_err)? })
    }

    fn laplacian(&self) -> PyResult<Self> {
        Ok(Self { inner: dirac::laplacian_apply(&self.inner).map_err(py_err)? })
    }

    fn heat(&self, t: f64) -> PyResult<Self> {
        Ok(Self { inner: dirac::heat_evolve(&self.inner, t).map_err(py_err)? })
    }
}

/// Every constant for the given algebra, as a dict.
#[pyfunction]
#[pyo3(signature = (n, m = None, complex = false, omega = "paper"))]
fn constants_table<'py>(py: Python<'py>, n: usize, m: Option<usize>, complex: bool, omega: &str) -> PyResult<Bound<'py, PyAny>> {
    let table = ConstantsTable::build(signature(n, m, complex)?, self::omega(omega)?).map_err(py_err)?;
    json_to_py(py, &to_json_17(&table).map_err(py_err)?)
}

/// Product constant K_m of the real or complex algebra.
#[pyfunction]
#[pyo3(signature = (m, complex = false))]
fn product_constant(m: usize, complex: bool) -> PyResult<f64> {
    Ok(signature(m, Some(m), complex)?.product_constant())
}

/// `(alpha_new, alpha_prior)` decay thresholds for the weight exponent `k`.
#[pyfunction]
fn zero_mode_thresholds(k: f64) -> PyResult<(f64, f64)> {
    constants::zero_mode_thresholds(k).map_err(py_err)
}

/// Heat decay envelope for an initial field with the given L1 and L2 norms.
#[pyfunction]
fn heat_decay_bound(t: f64, l1_0: f64, l2_0: f64, n: usize, c1: f64) -> PyResult<f64> {
    constants::heat_decay_bound(t, l1_0, l2_0, n, c1).map_err(py_err)
}

/// Run a verification suite and return the report as a dict.
#[pyfunction]
#[pyo3(signature = (suite, grid = 48, extent = 10.0, n = 3, m = None, complex = false, seed = 42, cases = 50, omega = "paper"))]
#[allow(clippy::too_many_arguments)]
fn verify<'py>(
    py: Python<'py>,
    suite: &str,
    grid: usize,
    extent: f64,
    n: usize,
    m: Option<usize>,
    complex: bool,
    seed: u64,
    cases: usize,
    omega: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let suite: Suite = suite.parse().map_err(py_err)?;
    let mut cfg = SuiteConfig::new(suite, field_grid(n, grid, extent)?, signature(n, m, complex)?, seed, cases);
    cfg.omega = self::omega(omega)?;
    let report = py.detach(|| run_suite(&cfg)).map_err(py_err)?;
    json_to_py(py, &report.to_json().map_err(py_err)?)
}

#[pymodule]
fn pycliffdirac(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMultivector>()?;
    m.add_class::<PyField>()?;
    m.add_function(wrap_pyfunction!(constants_table, m)?)?;
    m.add_function(wrap_pyfunction!(product_constant, m)?)?;
    m.add_function(wrap_pyfunction!(zero_mode_thresholds, m)?)?;
    m.add_function(wrap_pyfunction!(heat_decay_bound, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
