//! Python bindings for the Boolean-to-QAOA toolchain.

use bhtqaoa_core as core;
use bhtqaoa_core::circuit::{BooleanOracleCircuit, PhaseOracleCircuit};
use bhtqaoa_core::optimize::ObjectiveMode;
use bhtqaoa_core::qaoasim::run_qaoa;
use bhtqaoa_core::{
    BoolExpr, EsopForm, MixerConvention, PauliZPolynomial, Problem, QaoaParams, SolveConfig,
};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

create_exception!(bhtqaoa, BhtqaoaError, PyValueError);
create_exception!(bhtqaoa, ParseError, BhtqaoaError);
create_exception!(bhtqaoa, CompileError, BhtqaoaError);
create_exception!(bhtqaoa, UnsatisfiableError, BhtqaoaError);

fn to_py(e: core::Error) -> PyErr {
    let msg = e.to_string();
    match e {
        core::Error::Syntax { .. }
        | core::Error::EmptyInput
        | core::Error::TooManyVariables { .. } => ParseError::new_err(msg),
        core::Error::UnsupportedStructure(_)
        | core::Error::Transform { .. }
        | core::Error::UnsupportedGate(_) => CompileError::new_err(msg),
        core::Error::Unsatisfiable => UnsatisfiableError::new_err(msg),
        _ => BhtqaoaError::new_err(msg),
    }
}

fn to_python<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| BhtqaoaError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A parsed Boolean formula.
#[pyclass(name = "Formula", module = "bhtqaoa", frozen)]
struct PyFormula {
    inner: BoolExpr,
}

#[pymethods]
impl PyFormula {
    #[new]
    #[pyo3(signature = (text, order = None))]
    fn new(text: &str, order: Option<Vec<String>>) -> PyResult<Self> {
        let order = order.unwrap_or_default();
        BoolExpr::parse_with_order(text, &order)
            .map(|inner| PyFormula { inner })
            .map_err(to_py)
    }

    #[getter]
    fn variables(&self) -> Vec<String> {
        self.inner.var_names().to_vec()
    }

    #[getter]
    fn num_vars(&self) -> usize {
        self.inner.num_vars()
    }

    fn evaluate(&self, bits: Vec<bool>) -> PyResult<bool> {
        self.inner.eval(&bits).map_err(to_py)
    }

    fn truth_table(&self) -> PyResult<Vec<bool>> {
        Ok(self.inner.truth_table().map_err(to_py)?.bits().to_vec())
    }

    fn minterms(&self) -> PyResult<Vec<String>> {
        let n = self.inner.num_vars();
        let table = self.inner.truth_table().map_err(to_py)?;
        Ok(table
            .minterms()
            .into_iter()
            .map(|x| core::bitstring(x, n))
            .collect())
    }

    fn synthesize(&self) -> PyResult<PyEsop> {
        let table = self.inner.truth_table().map_err(to_py)?;
        let inner = core::dsop_synthesize(&table)
            .with_var_names(self.inner.var_names())
            .map_err(to_py)?;
        Ok(PyEsop { inner })
    }

    fn boolean_oracle(&self) -> PyResult<PyBooleanOracle> {
        core::build_boolean_oracle(&self.inner)
            .map(|inner| PyBooleanOracle { inner })
            .map_err(to_py)
    }

    fn __str__(&self) -> String {
        self.inner.unparse()
    }

    fn __repr__(&self) -> String {
        format!("Formula({:?})", self.inner.unparse())
    }
}

/// An XOR of cubes.
#[pyclass(name = "Esop", module = "bhtqaoa", frozen)]
struct PyEsop {
    inner: EsopForm,
}

#[pymethods]
impl PyEsop {
    #[new]
    #[pyo3(signature = (text, order = None))]
    fn new(text: &str, order: Option<Vec<String>>) -> PyResult<Self> {
        let order = order.unwrap_or_default();
        core::synth::parse_cubes_with_order(text, &order)
            .map(|inner| PyEsop { inner })
            .map_err(to_py)
    }

    #[getter]
    fn variables(&self) -> Vec<String> {
        self.inner.var_names().to_vec()
    }

    #[getter]
    fn num_vars(&self) -> usize {
        self.inner.num_vars()
    }

    /// `(positive_mask, negative_mask)` per cube.
    #[getter]
    fn cubes(&self) -> Vec<(u32, u32)> {
        self.inner
            .cubes()
            .iter()
            .map(|c| (c.pos(), c.neg()))
            .collect()
    }

    fn is_disjoint(&self) -> bool {
        self.inner.is_disjoint()
    }

    fn truth_table(&self) -> PyResult<Vec<bool>> {
        Ok(self.inner.truth_table().map_err(to_py)?.bits().to_vec())
    }

    fn esop_oracle(&self) -> PyBooleanOracle {
        PyBooleanOracle {
            inner: core::build_esop_oracle(&self.inner),
        }
    }

    fn phase_oracle(&self) -> PyResult<PyPhaseOracle> {
        self.esop_oracle().to_phase()
    }

    fn hamiltonian(&self) -> PyResult<PyHamiltonian> {
        Ok(self.phase_oracle()?.hamiltonian())
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Esop({:?})", self.inner.to_string())
    }
}

/// Reversible oracle writing f(x) onto a target qubit.
#[pyclass(name = "BooleanOracle", module = "bhtqaoa", frozen)]
struct PyBooleanOracle {
    inner: BooleanOracleCircuit,
}

#[pymethods]
impl PyBooleanOracle {
    #[getter]
    fn num_qubits(&self) -> usize {
        self.inner.num_qubits()
    }

    #[getter]
    fn num_ancilla(&self) -> usize {
        self.inner.n_ancilla()
    }

    fn to_phase(&self) -> PyResult<PyPhaseOracle> {
        core::transform_to_phase(&self.inner)
            .map(|inner| PyPhaseOracle { inner })
            .map_err(to_py)
    }

    fn gate_report<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let report = core::gate_report(&[("oracle", core::Stage::Boolean(&self.inner))]);
        to_python(py, report.row("oracle").expect("row exists"))
    }

    fn __str__(&self) -> String {
        self.inner.to_text()
    }
}

/// Ancilla-free oracle applying (-1)^f(x).
#[pyclass(name = "PhaseOracle", module = "bhtqaoa", frozen)]
struct PyPhaseOracle {
    inner: PhaseOracleCircuit,
}

#[pymethods]
impl PyPhaseOracle {
    #[getter]
    fn num_qubits(&self) -> usize {
        self.inner.n_inputs()
    }

    /// Sign `+1` or `-1` applied to basis state `x`.
    fn phase(&self, x: u32) -> i8 {
        self.inner.phase_of_bits(x)
    }

    fn hamiltonian(&self) -> PyHamiltonian {
        PyHamiltonian {
            inner: core::generate_hc(&self.inner),
        }
    }

    fn gate_report<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let report = core::gate_report(&[("oracle", core::Stage::Phase(&self.inner))]);
        to_python(py, report.row("oracle").expect("row exists"))
    }

    fn __str__(&self) -> String {
        self.inner.to_text()
    }
}

/// Diagonal cost Hamiltonian as a sum of Pauli-Z strings.
#[pyclass(name = "Hamiltonian", module = "bhtqaoa", frozen)]
struct PyHamiltonian {
    inner: PauliZPolynomial,
}

#[pymethods]
impl PyHamiltonian {
    #[getter]
    fn num_qubits(&self) -> usize {
        self.inner.num_qubits()
    }

    #[getter]
    fn paulis(&self) -> Vec<String> {
        self.inner
            .to_pauli_strings()
            .into_iter()
            .map(|(p, _)| p)
            .collect()
    }

    #[getter]
    fn coeffs(&self) -> Vec<f64> {
        self.inner
            .to_pauli_strings()
            .into_iter()
            .map(|(_, c)| c)
            .collect()
    }

    fn diag(&self) -> PyResult<Vec<f64>> {
        self.inner.diag().map_err(to_py)
    }

    fn energy(&self, x: u32) -> f64 {
        self.inner.energy(x).to_f64()
    }

    /// Basis-state probabilities after a QAOA circuit with the given angles.
    #[pyo3(signature = (gammas, betas, omega = core::hamiltonian::DEFAULT_OMEGA, mixer_convention = "gate"))]
    fn qaoa_probabilities(
        &self,
        gammas: Vec<f64>,
        betas: Vec<f64>,
        omega: f64,
        mixer_convention: &str,
    ) -> PyResult<Vec<f64>> {
        let convention: MixerConvention = mixer_convention.parse().map_err(to_py)?;
        let mixer =
            core::Mixer::uniform(self.inner.num_qubits(), omega, convention).map_err(to_py)?;
        let params = QaoaParams::new(gammas, betas).map_err(to_py)?;
        let diag = self.inner.diag().map_err(to_py)?;
        Ok(run_qaoa(&diag, &mixer, &params)
            .map_err(to_py)?
            .probabilities())
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Hamiltonian({:?}, {:?})", self.paulis(), self.coeffs())
    }
}

/// Mixer Pauli strings and coefficients for `n` qubits.
#[pyfunction]
#[pyo3(signature = (n, omega = core::hamiltonian::DEFAULT_OMEGA))]
fn mixer(n: usize, omega: f64) -> PyResult<(Vec<String>, Vec<f64>)> {
    Ok(core::build_mixer(n, omega)
        .map_err(to_py)?
        .to_pauli_strings())
}

/// Every satisfying assignment, qubit 0 rightmost.
#[pyfunction]
fn verify(formula: &PyFormula) -> PyResult<Vec<String>> {
    Ok(core::brute_force_solutions(&formula.inner)
        .map_err(to_py)?
        .into_iter()
        .collect())
}

/// Run the full pipeline and return the report as a dict.
#[pyfunction]
#[pyo3(signature = (
    problem,
    *,
    p = None,
    max_p = 6,
    shots = 1024,
    budget = 500,
    restarts = 5,
    seed = core::optimize::DEFAULT_SEED,
    objective = "exact",
    mixer_convention = "gate",
    omega = core::hamiltonian::DEFAULT_OMEGA,
))]
#[allow(clippy::too_many_arguments)]
fn solve<'py>(
    py: Python<'py>,
    problem: &Bound<'py, PyAny>,
    p: Option<usize>,
    max_p: usize,
    shots: u64,
    budget: usize,
    restarts: usize,
    seed: u64,
    objective: &str,
    mixer_convention: &str,
    omega: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let problem = if let Ok(f) = problem.cast::<PyFormula>() {
        Problem::Formula(f.get().inner.clone())
    } else if let Ok(e) = problem.cast::<PyEsop>() {
        Problem::Esop(e.get().inner.clone())
    } else if let Ok(text) = problem.extract::<String>() {
        Problem::Formula(BoolExpr::parse(&text).map_err(to_py)?)
    } else {
        return Err(BhtqaoaError::new_err(
            "problem must be a Formula, Esop or str",
        ));
    };
    let objective = match objective {
        "exact" => ObjectiveMode::Exact,
        "sampled" => ObjectiveMode::Sampled { shots, seed },
        other => {
            return Err(BhtqaoaError::new_err(format!(
                "unknown objective {other:?}"
            )))
        }
    };
    let config = SolveConfig {
        p,
        max_p,
        shots,
        budget,
        restarts,
        seed,
        objective,
        mixer_convention: mixer_convention.parse().map_err(to_py)?,
        omega,
        ..SolveConfig::default()
    };
    let report = py
        .detach(|| core::solve(&problem, &config))
        .map_err(to_py)?;
    to_python(py, &report)
}

#[pymodule]
fn bhtqaoa(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<PyFormula>()?;
    m.add_class::<PyEsop>()?;
    m.add_class::<PyBooleanOracle>()?;
    m.add_class::<PyPhaseOracle>()?;
    m.add_class::<PyHamiltonian>()?;
    m.add_function(wrap_pyfunction!(mixer, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add("BhtqaoaError", py.get_type::<BhtqaoaError>())?;
    m.add("ParseError", py.get_type::<ParseError>())?;
    m.add("CompileError", py.get_type::<CompileError>())?;
    m.add("UnsatisfiableError", py.get_type::<UnsatisfiableError>())?;
    Ok(())
}
