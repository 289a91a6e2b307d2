//! Python bindings for the chain toolbox: model parameters, probe states,
//! and the transition operator with its analysis entry points. Matrices
//! cross the boundary as nested lists of complex numbers.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use qbd_core::spectral::default_probes;
use qbd_core::stationary::boundary_mass;
use qbd_core::{
    classical_stationary, classical_transition_matrix, diagonal_invariance_check,
    explicit_fixed_points, extremality_report, invariant_pure_state_homogeneous,
    invariant_state_baby, invariant_state_diagonal, peripheral_spectrum_with_probes,
    solve_invariant_numeric, subharmonic_probe, theorem_verdicts, ApplyMode, Channel,
    ClassicalStationary, ExtremalityVerdict, InvariantKind, ModelParameters, QbdError,
    QubitState, TruncatedOperator, Truncation,
};

fn err(e: QbdError) -> PyErr {
    match e {
        QbdError::OutOfRange(_)
        | QbdError::TrappingState(_)
        | QbdError::NormalizationViolation { .. }
        | QbdError::ShapeMismatch { .. }
        | QbdError::IndexOutOfRange(_)
        | QbdError::PreconditionViolated(_)
        | QbdError::Config(_) => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn to_array(rows: Vec<Vec<C64>>) -> PyResult<Array2<C64>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    let mut m = Array2::zeros((n, n));
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            m[[i, j]] = v;
        }
    }
    Ok(m)
}

fn to_rows(m: &Array2<C64>) -> Vec<Vec<C64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[[i, j]]).collect())
        .collect()
}

/// Coupling sequences of a chain.
#[pyclass(name = "Model", frozen, from_py_object)]
#[derive(Clone)]
struct PyModel {
    inner: ModelParameters,
}

#[pymethods]
impl PyModel {
    #[staticmethod]
    fn baby(n_max: usize) -> PyResult<Self> {
        Ok(Self { inner: ModelParameters::baby(n_max).map_err(err)? })
    }

    #[staticmethod]
    fn homogeneous(alpha: f64, beta: f64, n_max: usize) -> PyResult<Self> {
        Ok(Self { inner: ModelParameters::homogeneous(alpha, beta, n_max).map_err(err)? })
    }

    #[staticmethod]
    fn jaynes_cummings(g: f64, n_max: usize) -> PyResult<Self> {
        Ok(Self { inner: ModelParameters::jaynes_cummings(g, n_max).map_err(err)? })
    }

    #[staticmethod]
    fn general(alpha: Vec<f64>, beta: Vec<f64>) -> PyResult<Self> {
        Ok(Self { inner: ModelParameters::general(alpha, beta).map_err(err)? })
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind().name()
    }

    #[getter]
    fn n_max(&self) -> usize {
        self.inner.n_max()
    }

    fn alphas(&self) -> Vec<f64> {
        self.inner.alphas().to_vec()
    }

    fn betas(&self) -> Vec<f64> {
        self.inner.betas().to_vec()
    }

    fn __repr__(&self) -> String {
        format!("Model(kind='{}', n_max={})", self.kind(), self.n_max())
    }
}

/// Probe state, parametrized by `lambda` in [0, 1] and `zeta` in the closed
/// unit disc.
#[pyclass(name = "State", frozen, from_py_object)]
#[derive(Clone)]
struct PyState {
    inner: QubitState,
}

#[pymethods]
impl PyState {
    #[new]
    #[pyo3(signature = (lam, zeta = C64::new(0.0, 0.0)))]
    fn new(lam: f64, zeta: C64) -> PyResult<Self> {
        Ok(Self { inner: QubitState::new(lam, zeta).map_err(err)? })
    }

    #[staticmethod]
    fn plus() -> Self {
        Self { inner: QubitState::plus() }
    }

    #[staticmethod]
    fn minus() -> Self {
        Self { inner: QubitState::minus() }
    }

    #[getter(lam)]
    fn lam(&self) -> f64 {
        self.inner.lambda()
    }

    #[getter]
    fn zeta(&self) -> C64 {
        self.inner.zeta()
    }

    #[getter]
    fn nu(&self) -> C64 {
        self.inner.nu()
    }

    fn rotate(&self, theta: C64) -> PyResult<Self> {
        Ok(Self { inner: self.inner.rotate(theta).map_err(err)? })
    }

    fn density_matrix(&self) -> Vec<Vec<C64>> {
        to_rows(&self.inner.density_matrix())
    }

    fn is_faithful(&self) -> bool {
        self.inner.is_faithful()
    }

    fn is_pure(&self) -> bool {
        self.inner.is_pure()
    }

    fn is_diagonal(&self) -> bool {
        self.inner.is_diagonal()
    }

    fn __repr__(&self) -> String {
        format!("State(lam={}, zeta={})", self.inner.lambda(), self.inner.zeta())
    }
}

/// Outcome of an invariant-state computation.
#[pyclass(name = "InvariantState", frozen)]
struct PyInvariantState {
    #[pyo3(get)]
    kind: String,
    #[pyo3(get)]
    residual: Option<f64>,
    #[pyo3(get)]
    q: Option<C64>,
    #[pyo3(get)]
    diagnosis: Option<String>,
    rho: Option<Vec<Vec<C64>>>,
}

#[pymethods]
impl PyInvariantState {
    fn rho(&self) -> Option<Vec<Vec<C64>>> {
        self.rho.clone()
    }

    fn __repr__(&self) -> String {
        format!("InvariantState(kind='{}', residual={:?})", self.kind, self.residual)
    }
}

impl PyInvariantState {
    fn from_core(res: qbd_core::InvariantStateResult) -> Self {
        Self {
            kind: res.kind.name().to_string(),
            residual: if res.kind == InvariantKind::None { None } else { Some(res.residual) },
            q: res.q,
            diagnosis: res.diagnosis,
            rho: res.rho.map(|r| to_rows(r.matrix())),
        }
    }
}

/// The transition operator of a chain at a fixed truncation.
#[pyclass(name = "Channel", frozen)]
struct PyChannel {
    inner: Channel,
}

#[pymethods]
impl PyChannel {
    #[new]
    fn new(model: PyModel, state: PyState, dim: usize) -> PyResult<Self> {
        let trunc = Truncation::new(dim).map_err(err)?;
        Ok(Self { inner: Channel::new(model.inner, state.inner, trunc).map_err(err)? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// Weighted Kraus family as `(weight, matrix)` pairs.
    fn kraus(&self) -> Vec<(f64, Vec<Vec<C64>>)> {
        self.inner
            .kraus()
            .iter()
            .map(|(w, t)| (*w, to_rows(t.matrix())))
            .collect()
    }

    /// Apply one Heisenberg step; `mode` is `kraus`, `dilation`, or
    /// `coefficient`.
    #[pyo3(signature = (x, mode = "kraus"))]
    fn apply_heisenberg(&self, x: Vec<Vec<C64>>, mode: &str) -> PyResult<Vec<Vec<C64>>> {
        let mode = match mode {
            "kraus" => ApplyMode::Kraus,
            "dilation" => ApplyMode::Dilation,
            "coefficient" => ApplyMode::Coefficient,
            other => return Err(PyValueError::new_err(format!("unknown mode '{other}'"))),
        };
        let x = TruncatedOperator::from_matrix(to_array(x)?).map_err(err)?;
        let out = self.inner.apply_heisenberg(&x, mode).map_err(err)?;
        Ok(to_rows(out.matrix()))
    }

    /// Apply one predual (state-side) step.
    fn apply_schrodinger(&self, rho: Vec<Vec<C64>>) -> PyResult<Vec<Vec<C64>>> {
        let rho = TruncatedOperator::from_matrix(to_array(rho)?).map_err(err)?;
        let out = self.inner.apply_schrodinger(&rho).map_err(err)?;
        Ok(to_rows(out.matrix()))
    }

    fn boundary_leakage(&self) -> f64 {
        self.inner.boundary_leakage()
    }

    fn boundary_mass(&self, rho: Vec<Vec<C64>>) -> PyResult<f64> {
        let rho = TruncatedOperator::from_matrix(to_array(rho)?).map_err(err)?;
        Ok(boundary_mass(&self.inner, &rho))
    }

    /// Row-stochastic classical transition matrix on the diagonal.
    fn classical_transition(&self) -> Vec<Vec<f64>> {
        let chain = classical_transition_matrix(&self.inner);
        let t = chain.transition();
        (0..t.nrows())
            .map(|i| (0..t.ncols()).map(|j| t[[i, j]]).collect())
            .collect()
    }

    /// Stationary law of the classical chain, or `None` above the threshold.
    fn classical_stationary(&self) -> Option<Vec<f64>> {
        let chain = classical_transition_matrix(&self.inner);
        match classical_stationary(&chain) {
            ClassicalStationary::Distribution { pi, .. } => Some(pi),
            ClassicalStationary::None { .. } => None,
        }
    }

    fn diagonal_invariant(&self) -> PyResult<(bool, f64)> {
        let d = diagonal_invariance_check(&self.inner).map_err(err)?;
        Ok((d.invariant, d.max_offdiag))
    }

    /// Invariant state by the requested method: `auto`, `diagonal`, `baby`,
    /// `pure`, or `numeric`.
    #[pyo3(signature = (method = "auto", tol = 1e-10, max_iter = 5000))]
    fn invariant_state(&self, method: &str, tol: f64, max_iter: usize) -> PyResult<PyInvariantState> {
        let res = match method {
            "diagonal" => invariant_state_diagonal(&self.inner),
            "baby" => invariant_state_baby(&self.inner),
            "pure" => invariant_pure_state_homogeneous(&self.inner),
            "numeric" => solve_invariant_numeric(&self.inner, tol, max_iter),
            "auto" => {
                let psi = self.inner.psi();
                if matches!(self.inner.model().kind(), qbd_core::ModelKind::Baby) {
                    invariant_state_baby(&self.inner)
                } else if psi.is_diagonal() {
                    invariant_state_diagonal(&self.inner)
                } else if psi.is_pure() {
                    invariant_pure_state_homogeneous(&self.inner)
                } else {
                    solve_invariant_numeric(&self.inner, tol, max_iter)
                }
            }
            other => return Err(PyValueError::new_err(format!("unknown method '{other}'"))),
        };
        Ok(PyInvariantState::from_core(res.map_err(err)?))
    }

    /// Fixed-space dimension, spectral gap, and count of peripheral
    /// eigenvalues away from 1.
    #[pyo3(signature = (tol = 1e-7))]
    fn spectrum(&self, tol: f64) -> PyResult<(usize, f64, usize)> {
        let probes = default_probes(&self.inner);
        let rep = peripheral_spectrum_with_probes(&self.inner, tol, &probes).map_err(err)?;
        Ok((rep.fixed_dim, rep.gap, rep.rogue_peripheral))
    }

    fn subharmonic(&self) -> PyResult<String> {
        Ok(subharmonic_probe(&self.inner, 1e-9).map_err(err)?.summary())
    }

    /// `(verdict, product_rank, operator_rank)`.
    fn extremality(&self) -> PyResult<(String, usize, usize)> {
        let rep = extremality_report(&self.inner).map_err(err)?;
        let verdict = match rep.verdict {
            ExtremalityVerdict::Extremal => "extremal",
            ExtremalityVerdict::NotExtremal(_) => "not_extremal",
            ExtremalityVerdict::Undetermined => "undetermined",
        };
        Ok((verdict.to_string(), rep.gram_rank, rep.kraus_operator_rank))
    }

    /// Expected verdicts `{property: (verdict, basis)}`.
    fn expected_verdicts(&self) -> std::collections::HashMap<String, (String, String)> {
        let v = theorem_verdicts(self.inner.model().kind(), self.inner.psi());
        let mut out = std::collections::HashMap::new();
        for (name, tv) in [
            ("irreducible", v.irreducible),
            ("invariant_state", v.invariant_state),
            ("weak_mixing", v.weak_mixing),
        ] {
            out.insert(name.to_string(), (tv.verdict.as_str().to_string(), tv.basis));
        }
        out
    }

    fn explicit_fixed_points(&self, count: usize) -> PyResult<Vec<Vec<Vec<C64>>>> {
        let family = explicit_fixed_points(&self.inner, count).map_err(err)?;
        Ok(family.iter().map(|y| to_rows(y.matrix())).collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "Channel(model='{}', lam={}, zeta={}, dim={})",
            self.inner.model().kind().name(),
            self.inner.psi().lambda(),
            self.inner.psi().zeta(),
            self.inner.dim()
        )
    }
}

#[pymodule]
fn qbd_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_class::<PyState>()?;
    m.add_class::<PyChannel>()?;
    m.add_class::<PyInvariantState>()?;
    Ok(())
}
