//! Python bindings: suite runs and replays, plus direct access to the
//! transforms, factorizer, notation converters and expression compiler.

use std::collections::BTreeMap;

use num_complex::Complex64;
use pyo3::exceptions::{PyValueError, PyZeroDivisionError};
use pyo3::prelude::*;
use retromorphic::pipeline::replay_trial;
use retromorphic::registry::registry;
use retromorphic::report::ReportRecord;
use retromorphic::suites::{factorization, fourier, notation, vm};
use retromorphic::{find_suite, Rng, SuiteConfig, TrialReport, Verdict};

const DEFAULT_STEP_CAP: u64 = 10_000_000;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn eval_error(e: vm::EvalError) -> PyErr {
    match e {
        vm::EvalError::DivByZero => PyZeroDivisionError::new_err(e.to_string()),
        other => value_error(other),
    }
}

fn config(variant: &str, iterations: u64, seed: u64, eps: f64, step_cap: u64) -> SuiteConfig {
    SuiteConfig {
        iterations,
        master_seed: seed,
        eps,
        step_cap,
        variant_id: variant.to_owned(),
    }
}

/// Outcome counts of one suite run, with the per-trial JSON records.
#[pyclass(frozen, get_all, module = "retromorphic_py")]
struct RunSummary {
    suite: String,
    variant: String,
    passed: u64,
    violations: u64,
    program_errors: u64,
    /// `(trial_index, trial_seed)` of the first non-passing trial.
    first_failure: Option<(u64, u64)>,
    wall_time_s: f64,
    records: Vec<String>,
}

#[pymethods]
impl RunSummary {
    fn all_passed(&self) -> bool {
        self.violations == 0 && self.program_errors == 0
    }

    fn __repr__(&self) -> String {
        format!(
            "RunSummary(suite={:?}, variant={:?}, passed={}, violations={}, program_errors={})",
            self.suite, self.variant, self.passed, self.violations, self.program_errors
        )
    }
}

/// One executed trial. Data fields hold the rendered values, or `None` for
/// stages that were not reached.
#[pyclass(frozen, get_all, module = "retromorphic_py")]
struct Trial {
    suite: String,
    variant: String,
    trial_index: u64,
    trial_seed: u64,
    /// `"pass"`, `"violation"` or `"program_error"`.
    verdict: String,
    /// Failing stage for program errors.
    stage: Option<String>,
    detail: Option<String>,
    mutation: Option<String>,
    m1: Option<String>,
    m2: Option<String>,
    m2_mutated: Option<String>,
    m1_prime: Option<String>,
    transcript: String,
}

#[pymethods]
impl Trial {
    fn __repr__(&self) -> String {
        format!(
            "Trial(suite={:?}, trial_seed={}, verdict={:?})",
            self.suite, self.trial_seed, self.verdict
        )
    }
}

impl From<TrialReport> for Trial {
    fn from(r: TrialReport) -> Self {
        let (stage, detail) = match &r.verdict {
            Verdict::Pass => (None, None),
            Verdict::Violation { detail } => (None, Some(detail.clone())),
            Verdict::ProgramError { stage, message } => {
                (Some(stage.as_str().to_owned()), Some(message.clone()))
            }
        };
        Trial {
            transcript: r.render_transcript(),
            verdict: r.verdict.kind().to_owned(),
            stage,
            detail,
            mutation: r.mutation.as_ref().map(ToString::to_string),
            suite: r.suite,
            variant: r.variant_id,
            trial_index: r.trial_index,
            trial_seed: r.trial_seed,
            m1: r.transcript.m1,
            m2: r.transcript.m2,
            m2_mutated: r.transcript.m2_mutated,
            m1_prime: r.transcript.m1_prime,
        }
    }
}

/// `(name, mode, variants)` for every registered suite.
#[pyfunction]
fn list_suites() -> Vec<(String, String, Vec<String>)> {
    registry()
        .iter()
        .map(|s| {
            (
                s.name().to_owned(),
                s.mode().as_str().to_owned(),
                s.variant_ids(),
            )
        })
        .collect()
}

#[pyfunction]
#[pyo3(signature = (suite, variant="correct", iterations=1000, seed=42, eps=1e-10, step_cap=DEFAULT_STEP_CAP))]
fn run_suite(
    py: Python<'_>,
    suite: &str,
    variant: &str,
    iterations: u64,
    seed: u64,
    eps: f64,
    step_cap: u64,
) -> PyResult<RunSummary> {
    let s = find_suite(suite).map_err(value_error)?;
    let cfg = config(variant, iterations, seed, eps, step_cap);
    let (summary, reports) = py
        .detach(|| retromorphic::run_suite(s.as_ref(), &cfg))
        .map_err(value_error)?;
    Ok(RunSummary {
        suite: summary.suite,
        variant: summary.variant_id,
        passed: summary.pass,
        violations: summary.violation,
        program_errors: summary.program_error,
        first_failure: summary.first_failure,
        wall_time_s: summary.wall_time.as_secs_f64(),
        records: reports
            .iter()
            .map(|r| ReportRecord::from(r).to_line())
            .collect(),
    })
}

/// Re-runs one trial from its seed. `input` replaces the generated input.
#[pyfunction]
#[pyo3(signature = (suite, trial_seed, variant="correct", trial_index=0, input=None, eps=1e-10, step_cap=DEFAULT_STEP_CAP))]
fn replay(
    suite: &str,
    trial_seed: u64,
    variant: &str,
    trial_index: u64,
    input: Option<&str>,
    eps: f64,
    step_cap: u64,
) -> PyResult<Trial> {
    let s = find_suite(suite).map_err(value_error)?;
    let cfg = config(variant, trial_index.saturating_add(1), 0, eps, step_cap);
    let report =
        replay_trial(s.as_ref(), &cfg, trial_index, trial_seed, input).map_err(value_error)?;
    Ok(report.into())
}

#[pyfunction]
fn derive_trial_seed(master_seed: u64, trial_index: u64) -> u64 {
    retromorphic::derive_trial_seed(master_seed, trial_index)
}

#[pyfunction]
#[pyo3(signature = (x, variant="correct"))]
fn dft(x: Vec<Complex64>, variant: &str) -> Vec<Complex64> {
    fourier::dft(&fourier::ComplexSeq(x), variant).0
}

#[pyfunction]
#[pyo3(signature = (x, variant="correct"))]
fn idft(x: Vec<Complex64>, variant: &str) -> Vec<Complex64> {
    fourier::idft(&fourier::ComplexSeq(x), variant).0
}

/// Radix-2 FFT; the length must be a power of two.
#[pyfunction]
fn fft(x: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
    fourier::fft(&fourier::ComplexSeq(x))
        .map(|s| s.0)
        .map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (n, variant="correct", seed=0, step_cap=DEFAULT_STEP_CAP))]
fn pollards_rho(n: u64, variant: &str, seed: u64, step_cap: u64) -> PyResult<Vec<u64>> {
    let mut rng = Rng::from_seed(seed);
    factorization::pollards_rho(n, variant, &mut rng, step_cap)
        .map(|f| f.factors)
        .map_err(value_error)
}

#[pyfunction]
fn is_prime(n: u64) -> bool {
    factorization::is_prime(n)
}

#[pyfunction]
#[pyo3(signature = (expr, variant="correct"))]
fn postfix_to_prefix(expr: &str, variant: &str) -> PyResult<String> {
    notation::postfix_to_prefix(expr, variant).map_err(value_error)
}

#[pyfunction]
fn prefix_to_postfix(expr: &str) -> PyResult<String> {
    notation::prefix_to_postfix(expr).map_err(value_error)
}

/// Parses infix source and prints it back with minimal parentheses.
#[pyfunction]
fn normalize_infix(source: &str) -> PyResult<String> {
    vm::parse_infix(source)
        .map(|ast| vm::print_infix(&ast))
        .map_err(value_error)
}

/// Compiles infix source to bytecode text, one instruction per line.
#[pyfunction]
fn compile(source: &str) -> PyResult<String> {
    let ast = vm::parse_infix(source).map_err(value_error)?;
    Ok(vm::compile(&ast).to_string())
}

#[pyfunction]
#[pyo3(signature = (bytecode, variant="correct"))]
fn decompile(bytecode: &str, variant: &str) -> PyResult<String> {
    let code: vm::Bytecode = bytecode.parse().map_err(value_error)?;
    vm::decompile(&code, variant).map_err(eval_error)
}

#[pyfunction]
#[pyo3(signature = (bytecode, env=BTreeMap::new()))]
fn run_vm(bytecode: &str, env: BTreeMap<char, i64>) -> PyResult<i64> {
    let code: vm::Bytecode = bytecode.parse().map_err(value_error)?;
    vm::run_vm(&code, &vm::Env::new(env)).map_err(eval_error)
}

#[pyfunction]
#[pyo3(signature = (source, env=BTreeMap::new()))]
fn eval_infix(source: &str, env: BTreeMap<char, i64>) -> PyResult<i64> {
    let ast = vm::parse_infix(source).map_err(value_error)?;
    vm::eval_ast(&ast, &vm::Env::new(env)).map_err(eval_error)
}

#[pymodule]
fn retromorphic_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<RunSummary>()?;
    m.add_class::<Trial>()?;
    m.add_function(wrap_pyfunction!(list_suites, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add_function(wrap_pyfunction!(replay, m)?)?;
    m.add_function(wrap_pyfunction!(derive_trial_seed, m)?)?;
    m.add_function(wrap_pyfunction!(dft, m)?)?;
    m.add_function(wrap_pyfunction!(idft, m)?)?;
    m.add_function(wrap_pyfunction!(fft, m)?)?;
    m.add_function(wrap_pyfunction!(pollards_rho, m)?)?;
    m.add_function(wrap_pyfunction!(is_prime, m)?)?;
    m.add_function(wrap_pyfunction!(postfix_to_prefix, m)?)?;
    m.add_function(wrap_pyfunction!(prefix_to_postfix, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_infix, m)?)?;
    m.add_function(wrap_pyfunction!(compile, m)?)?;
    m.add_function(wrap_pyfunction!(decompile, m)?)?;
    m.add_function(wrap_pyfunction!(run_vm, m)?)?;
    m.add_function(wrap_pyfunction!(eval_infix, m)?)?;
    Ok(())
}
