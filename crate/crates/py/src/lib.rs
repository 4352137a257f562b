//! Python bindings for the sparse-field detection toolkit.
//!
//! The module mirrors the core crate's main types and operations: coupling
//! constructors, sparse signals, exact and Glauber sampling, the magnetization
//! statistics, closed-form theory quantities, and the calibrate/power loop.
//! Every randomized entry point takes an explicit seed, and sampling with the
//! same seed matches the `ising-detect sample` CLI draw for draw.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use ising_detect::rng::{self, role};
use ising_detect::{
    calibrate_with_tail, concentration_bound, conditional_variance, cycle_mgf, detection_boundary,
    enumerate_model, estimate_power, evaluate_statistic, f_statistic, make_signal, null_limit,
    run_test, solve_spontaneous_magnetization, verify_suite, CouplingMatrix as CoreCoupling,
    CriticalValue as CoreCrit, Decision, GlauberConfig, ModelSpec, Placement, SamplerBackend,
    SignalPolicy, SignalVector as CoreSignal, SpinConfiguration, StatTag, StatisticKind,
    VerifyScale,
};

fn to_py(e: ising_detect::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_tag(stat: &str) -> PyResult<StatTag> {
    stat.parse::<StatTag>().map_err(to_py)
}

fn parse_backend(backend: &str, n: usize) -> PyResult<SamplerBackend> {
    match backend.replace('-', "_").as_str() {
        "auto" => Ok(SamplerBackend::Auto),
        "enumeration" => Ok(SamplerBackend::Enumeration),
        "curie_weiss_aux" | "aux" => Ok(SamplerBackend::CurieWeissAux),
        "cycle_transfer" => Ok(SamplerBackend::CycleTransfer),
        "glauber" => Ok(SamplerBackend::Glauber(GlauberConfig::default_for(n))),
        "independent" => Ok(SamplerBackend::Independent),
        other => Err(PyValueError::new_err(format!("unknown backend '{other}'"))),
    }
}

fn parse_placement(placement: &str) -> PyResult<Placement> {
    match placement.replace('-', "_").as_str() {
        "prefix" => Ok(Placement::Prefix),
        "uniform_random" | "random" => Ok(Placement::UniformRandom),
        other => Err(PyValueError::new_err(format!("unknown placement '{other}'"))),
    }
}

fn spin_config(spins: Vec<i8>) -> PyResult<SpinConfiguration> {
    SpinConfiguration::new(spins).map_err(to_py)
}

/// Symmetric zero-diagonal coupling matrix for one of the built-in families.
#[pyclass(frozen, skip_from_py_object, name = "CouplingMatrix", module = "ising_detect_py")]
#[derive(Clone)]
struct PyCoupling {
    inner: CoreCoupling,
}

#[pymethods]
impl PyCoupling {
    /// Complete graph with `Q_ij = theta / n`.
    #[staticmethod]
    fn curie_weiss(n: usize, theta: f64) -> PyResult<Self> {
        Ok(PyCoupling { inner: CoreCoupling::curie_weiss(n, theta).map_err(to_py)? })
    }

    /// Nearest-neighbour ring with `Q_ij = theta / 2` per edge.
    #[staticmethod]
    fn cycle(n: usize, theta: f64) -> PyResult<Self> {
        Ok(PyCoupling { inner: CoreCoupling::cycle(n, theta).map_err(to_py)? })
    }

    /// Circulant graph joining each site to its `degree` nearest neighbours,
    /// `Q_ij = theta / degree` per edge.
    #[staticmethod]
    fn regular_circulant(n: usize, theta: f64, degree: usize) -> PyResult<Self> {
        Ok(PyCoupling { inner: CoreCoupling::regular_circulant(n, theta, degree).map_err(to_py)? })
    }

    /// Erdős–Rényi graph with edge probability `edge_prob` and per-edge
    /// weight `theta / (n * edge_prob)`.
    #[staticmethod]
    fn erdos_renyi(n: usize, theta: f64, edge_prob: f64, seed: u64) -> PyResult<Self> {
        Ok(PyCoupling { inner: CoreCoupling::erdos_renyi(n, theta, edge_prob, seed).map_err(to_py)? })
    }

    /// Arbitrary symmetric zero-diagonal matrix from a row-major entry list.
    #[staticmethod]
    fn custom(n: usize, entries: Vec<f64>) -> PyResult<Self> {
        Ok(PyCoupling { inner: CoreCoupling::custom(n, entries).map_err(to_py)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.inner.theta()
    }

    fn entry(&self, i: usize, j: usize) -> PyResult<f64> {
        let n = self.inner.n();
        if i >= n || j >= n {
            return Err(PyValueError::new_err(format!("index ({i}, {j}) out of range for n = {n}")));
        }
        Ok(self.inner.entry(i, j))
    }

    /// Dense row-major copy of the matrix.
    fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.inner.n()).map(|i| self.inner.row(i).to_vec()).collect()
    }

    fn __repr__(&self) -> String {
        format!("CouplingMatrix(n={}, theta={})", self.inner.n(), self.inner.theta())
    }
}

/// Sparse external field: strength `B` on a support set, zero elsewhere.
#[pyclass(frozen, skip_from_py_object, name = "SignalVector", module = "ising_detect_py")]
#[derive(Clone)]
struct PySignal {
    inner: CoreSignal,
}

#[pymethods]
impl PySignal {
    /// The zero field.
    #[staticmethod]
    fn null(n: usize) -> Self {
        PySignal { inner: CoreSignal::null(n) }
    }

    /// `s`-sparse field of strength `strength`; placement is `"prefix"` or
    /// `"uniform_random"` (the latter requires `seed`).
    #[staticmethod]
    #[pyo3(signature = (n, s, strength, placement = "prefix", seed = None))]
    fn sparse(n: usize, s: usize, strength: f64, placement: &str, seed: Option<u64>) -> PyResult<Self> {
        let placement = parse_placement(placement)?;
        Ok(PySignal { inner: make_signal(n, s, strength, placement, seed).map_err(to_py)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn s(&self) -> usize {
        self.inner.s()
    }

    #[getter]
    fn strength(&self) -> f64 {
        self.inner.strength()
    }

    #[getter]
    fn support(&self) -> Vec<usize> {
        self.inner.support().to_vec()
    }

    /// Dense per-site field values.
    fn to_dense(&self) -> Vec<f64> {
        self.inner.to_dense()
    }

    fn __repr__(&self) -> String {
        format!(
            "SignalVector(n={}, s={}, strength={})",
            self.inner.n(),
            self.inner.s(),
            self.inner.strength()
        )
    }
}

/// Monte Carlo critical value for a `>=` rejection rule.
#[pyclass(frozen, skip_from_py_object, name = "CriticalValue", module = "ising_detect_py")]
#[derive(Clone)]
struct PyCrit {
    inner: CoreCrit,
    cal_tail: f64,
}

#[pymethods]
impl PyCrit {
    #[getter]
    fn value(&self) -> f64 {
        self.inner.value
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    #[getter]
    fn m_null(&self) -> usize {
        self.inner.m_null
    }

    #[getter]
    fn stat(&self) -> String {
        self.inner.stat.to_string()
    }

    /// Fraction of the calibration sample at or above `value` (equals the
    /// achieved level up to sampling noise; exceeds `alpha` by at most the
    /// point mass at `value` for lattice-valued statistics).
    #[getter]
    fn cal_tail(&self) -> f64 {
        self.cal_tail
    }

    fn __repr__(&self) -> String {
        format!(
            "CriticalValue(stat='{}', alpha={}, m_null={}, value={})",
            self.inner.stat, self.inner.alpha, self.inner.m_null, self.inner.value
        )
    }
}

fn model_spec(q: &PyCoupling, mu: Option<&PySignal>, backend: &str) -> PyResult<ModelSpec> {
    let backend = parse_backend(backend, q.inner.n())?;
    let spec = ModelSpec::null_model(q.inner.clone(), backend);
    Ok(match mu {
        None => spec,
        Some(sig) => {
            if sig.inner.n() != q.inner.n() {
                return Err(PyValueError::new_err(format!(
                    "signal length {} does not match coupling size {}",
                    sig.inner.n(),
                    q.inner.n()
                )));
            }
            spec.with_signal(SignalPolicy::Fixed(sig.inner.clone()))
        }
    })
}

/// Draw `draws` spin configurations; rows of `+1`/`-1`. `mu` is a
/// `SignalVector` (external field), `None` for the null. With the same seed
/// this reproduces the `ising-detect sample` CLI stream.
#[pyfunction]
#[pyo3(signature = (q, draws, seed, mu = None, backend = "auto"))]
fn sample(
    q: &PyCoupling,
    draws: usize,
    seed: u64,
    mu: Option<&PySignal>,
    backend: &str,
) -> PyResult<Vec<Vec<i8>>> {
    let spec = model_spec(q, mu, backend)?;
    let prepared = spec.prepare().map_err(to_py)?;
    (0..draws)
        .map(|i| {
            let mut rng = rng::stream(seed, role::SAMPLE_CLI, i as u64);
            Ok(prepared.draw(&mut rng).map_err(to_py)?.spins().to_vec())
        })
        .collect()
}

/// Exact total-spin law `[(t, P(T = t)), ...]` by enumeration (`n <= 14`).
#[pyfunction]
#[pyo3(signature = (q, mu = None))]
fn exact_magnetization_pmf(q: &PyCoupling, mu: Option<&PySignal>) -> PyResult<Vec<(i64, f64)>> {
    let null = CoreSignal::null(q.inner.n());
    let field = mu.map(|m| m.inner.clone()).unwrap_or(null);
    let model = enumerate_model(&q.inner, &field).map_err(to_py)?;
    Ok(model.magnetization_pmf())
}

/// Evaluate one named statistic on a spin vector. `stat` is one of
/// `"sqrt_n_mean"`, `"quarter_root_mean"`, `"cond_centered"`.
#[pyfunction]
fn statistic(stat: &str, spins: Vec<i8>, q: &PyCoupling) -> PyResult<f64> {
    let kind = StatisticKind::from_tag(parse_tag(stat)?, &q.inner);
    evaluate_statistic(&kind, &spin_config(spins)?).map_err(to_py)
}

/// The centered-field functional
/// `f(x) = (1/n) sum_i (x_i - tanh((Qx)_i + mu_i))`.
#[pyfunction]
fn f_stat(spins: Vec<i8>, q: &PyCoupling, mu: &PySignal) -> PyResult<f64> {
    f_statistic(&spin_config(spins)?, &q.inner, &mu.inner).map_err(to_py)
}

/// Monte Carlo calibration of the level-`alpha` critical value on the null
/// model.
#[pyfunction]
#[pyo3(signature = (q, stat, alpha, m_null, seed, backend = "auto"))]
fn calibrate(
    q: &PyCoupling,
    stat: &str,
    alpha: f64,
    m_null: usize,
    seed: u64,
    backend: &str,
) -> PyResult<PyCrit> {
    let kind = StatisticKind::from_tag(parse_tag(stat)?, &q.inner);
    let spec = model_spec(q, None, backend)?;
    let (crit, cal_tail) =
        calibrate_with_tail(&spec, &kind, alpha, m_null, seed).map_err(to_py)?;
    Ok(PyCrit { inner: crit, cal_tail })
}

/// Rejection rate of the calibrated test under `q` with optional
/// `SignalVector` field `mu`;
/// returns `(p_hat, ci_halfwidth)`.
#[pyfunction]
#[pyo3(signature = (q, stat, crit, replicates, seed, mu = None, backend = "auto"))]
fn power(
    q: &PyCoupling,
    stat: &str,
    crit: &PyCrit,
    replicates: usize,
    seed: u64,
    mu: Option<&PySignal>,
    backend: &str,
) -> PyResult<(f64, f64)> {
    let kind = StatisticKind::from_tag(parse_tag(stat)?, &q.inner);
    let spec = model_spec(q, mu, backend)?;
    let est = estimate_power(&spec, &kind, &crit.inner, replicates, seed).map_err(to_py)?;
    Ok((est.p_hat, est.ci_halfwidth))
}

/// Apply a calibrated test to one spin vector; `True` means reject.
#[pyfunction]
fn test_rejects(spins: Vec<i8>, stat: &str, crit: &PyCrit, q: &PyCoupling) -> PyResult<bool> {
    let kind = StatisticKind::from_tag(parse_tag(stat)?, &q.inner);
    let decision = run_test(&spin_config(spins)?, &kind, &crit.inner).map_err(to_py)?;
    Ok(decision == Decision::Reject)
}

/// Detection-boundary exponent `r*(theta, a)`.
#[pyfunction]
fn boundary_exponent(theta: f64, a: f64) -> PyResult<f64> {
    Ok(detection_boundary(theta, a).map_err(to_py)?.exponent())
}

/// CDF of the null limit law of the scaled magnetization at `theta`.
#[pyfunction]
fn null_cdf(theta: f64, x: f64) -> PyResult<f64> {
    Ok(null_limit(theta).map_err(to_py)?.cdf(x))
}

/// Quantile of the null limit law of the scaled magnetization at `theta`.
#[pyfunction]
fn null_quantile(theta: f64, p: f64) -> PyResult<f64> {
    null_limit(theta).map_err(to_py)?.quantile(p).map_err(to_py)
}

/// Positive root of `m = tanh(theta m)` (zero for `theta <= 1`).
#[pyfunction]
fn spontaneous_magnetization(theta: f64) -> PyResult<f64> {
    if theta <= 1.0 {
        return Ok(0.0);
    }
    Ok(solve_spontaneous_magnetization(theta).map_err(to_py)?.root)
}

/// Variance of the conditional normal limit law for `theta > 1`.
#[pyfunction]
fn conditional_limit_variance(theta: f64) -> PyResult<f64> {
    conditional_variance(theta).map_err(to_py)
}

/// Tail bound for the centered-field functional at level `t`.
#[pyfunction]
fn tail_bound(q: &PyCoupling, t: f64) -> PyResult<f64> {
    concentration_bound(&q.inner, t).map_err(to_py)
}

/// Transfer-matrix normalized moment generating function of the total spin
/// on the `n`-cycle: `Z(cycle, h 1) / (2 cosh theta)^n` with `h = t /
/// sqrt(n)`. At `t = 0` this equals `1 + tanh(theta)^n`.
#[pyfunction]
fn cycle_moment_generating(theta: f64, t: f64, n: usize) -> PyResult<f64> {
    cycle_mgf(theta, t, n).map_err(to_py)
}

/// Run the self-check suite (`scale` in `{"quick", "full"}`); returns
/// `(name, passed, detail)` per check.
#[pyfunction]
#[pyo3(signature = (scale = "quick", seed = 42))]
fn verify(scale: &str, seed: u64) -> PyResult<Vec<(String, bool, String)>> {
    let scale = match scale {
        "quick" => VerifyScale::Quick,
        "full" => VerifyScale::Full,
        other => return Err(PyValueError::new_err(format!("unknown scale '{other}'"))),
    };
    let report = verify_suite(scale, seed).map_err(to_py)?;
    Ok(report.entries.into_iter().map(|e| (e.name, e.passed, e.detail)).collect())
}

#[pymodule]
fn ising_detect_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCoupling>()?;
    m.add_class::<PySignal>()?;
    m.add_class::<PyCrit>()?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(exact_magnetization_pmf, m)?)?;
    m.add_function(wrap_pyfunction!(statistic, m)?)?;
    m.add_function(wrap_pyfunction!(f_stat, m)?)?;
    m.add_function(wrap_pyfunction!(calibrate, m)?)?;
    m.add_function(wrap_pyfunction!(power, m)?)?;
    m.add_function(wrap_pyfunction!(test_rejects, m)?)?;
    m.add_function(wrap_pyfunction!(boundary_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(null_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(null_quantile, m)?)?;
    m.add_function(wrap_pyfunction!(spontaneous_magnetization, m)?)?;
    m.add_function(wrap_pyfunction!(conditional_limit_variance, m)?)?;
    m.add_function(wrap_pyfunction!(tail_bound, m)?)?;
    m.add_function(wrap_pyfunction!(cycle_moment_generating, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
