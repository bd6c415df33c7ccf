//! Python bindings: `import qmonoidal`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::Serialize;

use qmonoidal::cocycle::build_cocycle;
use qmonoidal::fmatrix::{self, Sign};
use qmonoidal::io::{self, MatrixJson};
use qmonoidal::linalg::CMat;
use qmonoidal::linking::default_level;
use qmonoidal::random::random_unitary;
use qmonoidal::{verify, Error, Variant, Word};

pyo3::create_exception!(qmonoidal, QmonoidalError, PyValueError, "Raised for invalid input and unsupported requests.");
pyo3::create_exception!(qmonoidal, NumericalError, QmonoidalError, "Raised when a numerical check fails.");

/// Convert a core error; the variant name is available as `.kind`.
fn py_err(e: Error) -> PyErr {
    let msg = format!("{}: {e}", e.kind());
    let err = if e.is_numerical() { NumericalError::new_err(msg) } else { QmonoidalError::new_err(msg) };
    Python::attach(|py| {
        let _ = err.value(py).setattr("kind", e.kind());
    });
    err
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for qmonoidal::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

/// Serialize through JSON into plain Python objects.
fn to_py<'py>(py: Python<'py>, v: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (s,))
}

fn variant(s: &str) -> PyResult<Variant> {
    Variant::parse(s).py()
}

fn word(s: &str) -> PyResult<Word> {
    Word::parse(s).py()
}

fn tol_or_default(tol: Option<PyRef<'_, Tolerances>>) -> qmonoidal::Tolerances {
    tol.map(|t| t.0).unwrap_or_default()
}

fn rows_to_matrix(rows: Vec<Vec<Complex64>>) -> PyResult<CMat> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(QmonoidalError::new_err("matrix must be square"));
    }
    Ok(CMat::from_fn(n, n, |i, j| rows[i][j]))
}

fn matrix_to_rows(m: &CMat) -> Vec<Vec<Complex64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

#[pyclass(frozen, module = "qmonoidal")]
struct Tolerances(qmonoidal::Tolerances);

#[pymethods]
impl Tolerances {
    #[new]
    #[pyo3(signature = (rank = 1e-10, check = 1e-8, kms = 1e-7))]
    fn new(rank: f64, check: f64, kms: f64) -> PyResult<Self> {
        let t = qmonoidal::Tolerances { rank, check, kms };
        t.validate().py()?;
        Ok(Tolerances(t))
    }

    #[getter]
    fn rank(&self) -> f64 {
        self.0.rank
    }

    #[getter]
    fn check(&self) -> f64 {
        self.0.check
    }

    #[getter]
    fn kms(&self) -> f64 {
        self.0.kms
    }

    fn __repr__(&self) -> String {
        format!("Tolerances(rank={:e}, check={:e}, kms={:e})", self.0.rank, self.0.check, self.0.kms)
    }
}

/// Invertible complex matrix defining `A_o(F)` or `A_u(F)`.
#[pyclass(frozen, name = "FMatrix", module = "qmonoidal")]
struct PyFMatrix(qmonoidal::FMatrix);

#[pymethods]
impl PyFMatrix {
    /// Build from a square list of rows of complex (or real) numbers.
    #[new]
    fn new(rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        Ok(PyFMatrix(qmonoidal::FMatrix::new(rows_to_matrix(rows)?).py()?))
    }

    #[staticmethod]
    fn identity(n: usize) -> Self {
        PyFMatrix(qmonoidal::FMatrix::identity(n))
    }

    #[staticmethod]
    fn diagonal(d: Vec<f64>) -> PyResult<Self> {
        Ok(PyFMatrix(qmonoidal::FMatrix::diagonal(&d).py()?))
    }

    /// The 2×2 matrix of `SU_q(2)`.
    #[staticmethod]
    fn suq2(q: f64) -> Self {
        PyFMatrix(fmatrix::suq2(q))
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        Ok(PyFMatrix(qmonoidal::FMatrix::new(io::parse_matrix(s).py()?).py()?))
    }

    fn to_json(&self) -> PyResult<String> {
        io::matrix_to_string(self.0.matrix()).py()
    }

    fn to_list(&self) -> Vec<Vec<Complex64>> {
        matrix_to_rows(self.0.matrix())
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    /// `Tr(F*F)`
    fn trace(&self) -> f64 {
        self.0.trace()
    }

    /// `Tr((F*F)^{-1})`
    fn inv_trace(&self) -> f64 {
        self.0.inv_trace()
    }

    fn scaled(&self, lambda: Complex64) -> Self {
        PyFMatrix(self.0.scaled(lambda))
    }

    /// `v F vᵗ`
    fn congruence(&self, v: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let v = rows_to_matrix(v)?;
        if v.nrows() != self.0.n() {
            return Err(QmonoidalError::new_err("congruence matrix has the wrong size"));
        }
        Ok(PyFMatrix(self.0.congruence(&v)))
    }

    fn __repr__(&self) -> String {
        format!("FMatrix(n={}, trace={})", self.0.n(), self.0.trace())
    }
}

/// Sign, trace, quantum dimension and canonical form of an `A_o` matrix.
#[pyfunction]
#[pyo3(signature = (f, tol = None))]
fn classify_ao<'py>(py: Python<'py>, f: &PyFMatrix, tol: Option<PyRef<'_, Tolerances>>) -> PyResult<Bound<'py, PyAny>> {
    let tol = tol_or_default(tol);
    let p = fmatrix::validate_ao(&f.0, &tol).py()?;
    let cf = fmatrix::canonical_form_ao(&fmatrix::normalize_ao(&f.0, &tol).py()?, &tol).py()?;
    let d = to_py(py, &p)?;
    d.set_item("sign", p.sign.value() as i32)?;
    d.set_item("lambdas", cf.lambdas)?;
    d.set_item("fixed_block", cf.fixed_block)?;
    d.set_item("canonical_residual", cf.residual)?;
    Ok(d)
}

/// Traces, quantum dimension and balanced singular values of an `A_u` matrix.
#[pyfunction]
#[pyo3(signature = (f, tol = None))]
fn classify_au<'py>(py: Python<'py>, f: &PyFMatrix, tol: Option<PyRef<'_, Tolerances>>) -> PyResult<Bound<'py, PyAny>> {
    let tol = tol_or_default(tol);
    let d = to_py(py, &fmatrix::validate_au(&f.0, &tol).py()?)?;
    d.set_item("singular_values", fmatrix::canonical_form_au(&f.0, &tol).py()?)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (f1, f2, variant = "ao", tol = None))]
fn equivalent(f1: &PyFMatrix, f2: &PyFMatrix, variant: &str, tol: Option<PyRef<'_, Tolerances>>) -> PyResult<bool> {
    let tol = tol_or_default(tol);
    match self::variant(variant)? {
        Variant::Ao => Ok(fmatrix::equivalent_ao(&f1.0, &f2.0, &tol).py()?.equivalent),
        Variant::Au => fmatrix::equivalent_au(&f1.0, &f2.0, &tol).py(),
    }
}

#[pyfunction]
#[pyo3(signature = (f1, f2, variant = "ao", tol = None))]
fn monoidally_equivalent(
    f1: &PyFMatrix,
    f2: &PyFMatrix,
    variant: &str,
    tol: Option<PyRef<'_, Tolerances>>,
) -> PyResult<bool> {
    let tol = tol_or_default(tol);
    match self::variant(variant)? {
        Variant::Ao => fmatrix::monoidally_equivalent_ao(&f1.0, &f2.0, &tol).py(),
        Variant::Au => fmatrix::monoidally_equivalent_au(&f1.0, &f2.0, &tol).py(),
    }
}

/// Canonical `A_o` matrix of size `n` with the given sign and trace.
#[pyfunction]
#[pyo3(signature = (sign, trace, n, tol = None))]
fn construct_companion(sign: i32, trace: f64, n: usize, tol: Option<PyRef<'_, Tolerances>>) -> PyResult<PyFMatrix> {
    let s = Sign::from_value(sign as f64).py()?;
    Ok(PyFMatrix(fmatrix::construct_ao_companion(s, trace, n, &tol_or_default(tol)).py()?))
}

/// Concrete realization of the representation category.
#[pyclass(frozen, module = "qmonoidal")]
struct Category(Arc<qmonoidal::Realization>);

#[pymethods]
impl Category {
    #[new]
    #[pyo3(signature = (f, variant = "ao", level_cap = None, tol = None))]
    fn new(f: &PyFMatrix, variant: &str, level_cap: Option<usize>, tol: Option<PyRef<'_, Tolerances>>) -> PyResult<Self> {
        let mut r = qmonoidal::Realization::new(self::variant(variant)?, &f.0, &tol_or_default(tol)).py()?;
        if let Some(cap) = level_cap {
            r = r.with_level_cap(cap);
        }
        Ok(Category(Arc::new(r)))
    }

    #[getter]
    fn variant(&self) -> &'static str {
        self.0.variant().name()
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.0.beta()
    }

    #[getter]
    fn qdim(&self) -> f64 {
        self.0.qdim()
    }

    #[getter]
    fn level_cap(&self) -> usize {
        self.0.level_cap()
    }

    /// Irreducible labels of length at most `level`; `"e"` is the unit.
    fn labels(&self, level: usize) -> Vec<String> {
        self.0.variant().labels_up_to(level).iter().map(Word::to_string).collect()
    }

    fn carrier_dim(&self, label: &str) -> PyResult<usize> {
        self.0.carrier_dim(&word(label)?).py()
    }

    fn irrep_qdim(&self, label: &str) -> PyResult<f64> {
        self.0.irrep_qdim(&word(label)?).py()
    }

    /// Multiplicities of the irreducibles in `y ⊗ z`.
    fn fusion(&self, y: &str, z: &str) -> PyResult<BTreeMap<String, usize>> {
        let f = self.0.fusion(&word(y)?, &word(z)?).py()?;
        Ok(f.channels.iter().map(|c| (c.label.to_string(), c.maps.len())).collect())
    }

    /// Ranks of `End(u^{⊗k})` for `k ≤ max` (`A_o` only).
    fn level_ranks(&self, max: usize) -> PyResult<Vec<usize>> {
        self.0.level_ranks(max).py()
    }

    fn sixj(&self, a: &str, x: &str, y: &str, z: &str) -> PyResult<Vec<Vec<Complex64>>> {
        Ok(matrix_to_rows(&self.0.sixj(&word(a)?, &word(x)?, &word(y)?, &word(z)?).py()?))
    }
}

/// Truncated linking algebra of two monoidally equivalent matrices.
#[pyclass(frozen, module = "qmonoidal")]
struct Linking(qmonoidal::LinkingAlgebra);

#[pymethods]
impl Linking {
    #[new]
    #[pyo3(signature = (f1, f2, variant = "ao", level = None, tol = None))]
    fn new(
        f1: &PyFMatrix,
        f2: &PyFMatrix,
        variant: &str,
        level: Option<usize>,
        tol: Option<PyRef<'_, Tolerances>>,
    ) -> PyResult<Self> {
        let (v, tol) = (self::variant(variant)?, tol_or_default(tol));
        let source = Arc::new(qmonoidal::Realization::new(v, &f1.0, &tol).py()?);
        let target = Arc::new(qmonoidal::Realization::new(v, &f2.0, &tol).py()?);
        let level = level.unwrap_or_else(|| default_level(f1.0.n()));
        Ok(Linking(qmonoidal::LinkingAlgebra::build(source, target, level).py()?))
    }

    #[getter]
    fn level(&self) -> usize {
        self.0.level()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn basis_sizes(&self) -> BTreeMap<String, usize> {
        self.0.basis_sizes().into_iter().map(|(x, s)| (x.to_string(), s)).collect()
    }

    /// Residuals of the defining relations.
    fn relations<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0.check_relations().py()?)
    }

    /// Gram matrix of the invariant state: size, agreement and spectrum bound.
    fn gram<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0.gram_report().py()?)
    }

    /// `mult`, `mult_q` and `dim_q` for every label with `2|x| ≤ level`.
    fn multiplicities<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        for x in self.0.labels().iter().filter(|x| 2 * x.len() <= self.0.level()) {
            let s = to_py(py, &self.0.spectral_quantities(x).py()?)?;
            s.set_item("label", x.to_string())?;
            d.set_item(x.to_string(), s)?;
        }
        Ok(d)
    }

    /// Largest KMS residual of the invariant state.
    fn kms(&self) -> PyResult<f64> {
        self.0.kms_check().py()
    }
}

/// Build the dual 2-cocycle of two matrices and report its residuals.
/// With a seed, each nontrivial label gets a random unitary `u_x`.
#[pyfunction]
#[pyo3(signature = (f1, f2, variant = "ao", level = 3, seed = None, tol = None))]
fn cocycle<'py>(
    py: Python<'py>,
    f1: &PyFMatrix,
    f2: &PyFMatrix,
    variant: &str,
    level: usize,
    seed: Option<u64>,
    tol: Option<PyRef<'_, Tolerances>>,
) -> PyResult<Bound<'py, PyAny>> {
    let (v, tol) = (self::variant(variant)?, tol_or_default(tol));
    let source = Arc::new(qmonoidal::Realization::new(v, &f1.0, &tol).py()?);
    let target = Arc::new(qmonoidal::Realization::new(v, &f2.0, &tol).py()?);
    let mut u = BTreeMap::new();
    if let Some(seed) = seed {
        let mut rng = StdRng::seed_from_u64(seed);
        for x in v.labels_up_to(level).into_iter().filter(|x| !x.is_empty()) {
            let d = source.carrier_dim(&x).py()?;
            u.insert(x, random_unitary(d, &mut rng));
        }
    }
    let (c, normalization) = build_cocycle(&source, &target, level, &u).py()?;
    to_py(py, &c.report(normalization).py()?)
}

/// Whether the cocycles of two normalized `A_o` matrices differ by a coboundary.
#[pyfunction]
#[pyo3(signature = (f1, f2, tol = None))]
fn coboundary_equivalent(f1: &PyFMatrix, f2: &PyFMatrix, tol: Option<PyRef<'_, Tolerances>>) -> PyResult<bool> {
    qmonoidal::cocycle::coboundary_equivalent(&f1.0, &f2.0, &tol_or_default(tol)).py()
}

/// `(id, name)` of every acceptance criterion.
#[pyfunction]
fn criteria() -> Vec<(usize, &'static str)> {
    verify::CRITERIA.to_vec()
}

/// Run acceptance criteria (all if `ids` is omitted).
#[pyfunction]
#[pyo3(name = "verify", signature = (ids = None, tol = None))]
fn run_criteria<'py>(py: Python<'py>, ids: Option<Vec<usize>>, tol: Option<PyRef<'_, Tolerances>>) -> PyResult<Bound<'py, PyAny>> {
    let tol = tol_or_default(tol);
    let ids = ids.unwrap_or_else(|| verify::CRITERIA.iter().map(|c| c.0).collect());
    if let Some(bad) = ids.iter().find(|id| !verify::CRITERIA.iter().any(|c| c.0 == **id)) {
        return Err(QmonoidalError::new_err(format!("unknown criterion {bad}")));
    }
    let outcomes: Vec<verify::Outcome> = py.detach(|| ids.iter().map(|&id| verify::run(id, &tol)).collect());
    to_py(py, &outcomes)
}

/// Matrix JSON as accepted by the command line tool.
#[pyfunction]
fn matrix_json<'py>(py: Python<'py>, f: &PyFMatrix) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &MatrixJson::from_matrix(f.0.matrix()).py()?)
}

#[pymodule]
#[pyo3(name = "qmonoidal")]
pub fn qmonoidal_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("QmonoidalError", py.get_type::<QmonoidalError>())?;
    m.add("NumericalError", py.get_type::<NumericalError>())?;
    m.add_class::<Tolerances>()?;
    m.add_class::<PyFMatrix>()?;
    m.add_class::<Category>()?;
    m.add_class::<Linking>()?;
    m.add_function(wrap_pyfunction!(classify_ao, m)?)?;
    m.add_function(wrap_pyfunction!(classify_au, m)?)?;
    m.add_function(wrap_pyfunction!(equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(monoidally_equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(construct_companion, m)?)?;
    m.add_function(wrap_pyfunction!(cocycle, m)?)?;
    m.add_function(wrap_pyfunction!(coboundary_equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(criteria, m)?)?;
    m.add_function(wrap_pyfunction!(run_criteria, m)?)?;
    m.add_function(wrap_pyfunction!(matrix_json, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
