//! Python bindings. Reports come back as plain dicts, built from the same
//! JSON the CLI prints.

// pyo3 0.22's macros convert PyErr into itself
#![allow(clippy::useless_conversion)]

use std::collections::BTreeMap;

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;
use threshold_lab::decomposition::{
    efron_stein, hypercontractive_sigma_with, influence_report, talagrand_report, verify_hypercontractivity_with,
    verify_level_bound, SigmaMode,
};
use threshold_lab::families;
use threshold_lab::io::{from_json_with_schema, CHOICE_SCHEMA, FUNCTION_SCHEMA, PROFILE_SCHEMA};
use threshold_lab::qfun::{expectation, prob_value, value_distribution};
use threshold_lab::rng::stream;
use threshold_lab::social_choice::{
    is_rational, mcgarvey_profile, plurality_choice, saari_search, subset_mask, ChoiceFunction,
    indeterminacy_experiment, LinearOrder, Tournament, VoterProfile,
};
use threshold_lab::structure::{check_fair, check_monotone, check_symmetric, check_zero_monotone, SymmetryGroup};
use threshold_lab::threshold::{
    bound_shape, jury_experiment, russo_report, scan_path, simplex_sweep, threshold_window, Method, DEFAULT_GRID,
    DEFAULT_SAMPLES,
};
use threshold_lab::{Error, FamilySpec, GraphPropertyKind, MeasurePath, ProductMeasure, QaryFunction, SimplexSampler, TieBreak};

create_exception!(_core, ThresholdLabError, PyValueError);

fn err(e: Error) -> PyErr {
    ThresholdLabError::new_err(e.to_string())
}

fn to_py<T: Serialize + ?Sized>(py: Python<'_>, value: &T) -> PyResult<PyObject> {
    let text = serde_json::to_string(value).map_err(|e| ThresholdLabError::new_err(e.to_string()))?;
    Ok(py.import_bound("json")?.call_method1("loads", (text,))?.unbind())
}

fn tie_break(name: &str) -> PyResult<TieBreak> {
    match name {
        "first_occurrence" => Ok(TieBreak::FirstOccurrence),
        "smallest_index" => Ok(TieBreak::SmallestIndex),
        _ => Err(PyValueError::new_err(format!("unknown tie break {name:?}"))),
    }
}

fn method(mode: &str, samples: usize, seed: u64) -> PyResult<Method> {
    match mode {
        "exact" => Ok(Method::Exact),
        "monte_carlo" => Ok(Method::MonteCarlo { samples, seed }),
        _ => Err(PyValueError::new_err(format!("unknown method {mode:?}"))),
    }
}

/// A function `[q]^n -> [q]` (or to the reals), tabulated or given by a family oracle.
#[pyclass(name = "Function", module = "threshold_lab")]
#[derive(Clone)]
struct PyFunction(QaryFunction);

#[pymethods]
impl PyFunction {
    /// Symbol-valued table in big-endian order; `codomain_size` defaults to `q`.
    #[staticmethod]
    #[pyo3(signature = (q, n, table, codomain_size=None))]
    fn from_table(q: usize, n: usize, table: Vec<u32>, codomain_size: Option<usize>) -> PyResult<Self> {
        QaryFunction::from_symbols(q, n, codomain_size.unwrap_or(q), table).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_reals(q: usize, n: usize, table: Vec<f64>) -> PyResult<Self> {
        QaryFunction::from_reals(q, n, table).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        from_json_with_schema(text, FUNCTION_SCHEMA).map(Self).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (q, n, tie_break="first_occurrence"))]
    fn plurality(q: usize, n: usize, tie_break: &str) -> PyResult<Self> {
        families::plurality(q, n, self::tie_break(tie_break)?).map(Self).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (q, arity, depth, tie_break="first_occurrence"))]
    fn recursive_plurality(q: usize, arity: usize, depth: usize, tie_break: &str) -> PyResult<Self> {
        families::recursive_plurality(q, arity, depth, self::tie_break(tie_break)?).map(Self).map_err(err)
    }

    /// `property` is one of most_popular_color, max_clique_color, min_independent_set_color.
    #[staticmethod]
    fn graph_property(vertices: usize, q: usize, property: &str) -> PyResult<Self> {
        let kind = match property {
            "most_popular_color" => GraphPropertyKind::MostPopularColor,
            "max_clique_color" => GraphPropertyKind::MaxCliqueColor,
            "min_independent_set_color" => GraphPropertyKind::MinIndependentSetColor,
            _ => return Err(PyValueError::new_err(format!("unknown property {property:?}"))),
        };
        families::graph_property(vertices, q, kind).map(Self).map_err(err)
    }

    #[staticmethod]
    fn antisym_majority(n: usize) -> PyResult<Self> {
        families::antisym_majority(n).map(Self).map_err(err)
    }

    #[staticmethod]
    fn dictator(q: usize, n: usize, coordinate: usize) -> PyResult<Self> {
        families::dictator(q, n, coordinate).map(Self).map_err(err)
    }

    #[getter]
    fn q(&self) -> usize {
        self.0.q()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn __call__(&self, x: Vec<u32>) -> PyResult<f64> {
        self.0.eval_real(&x).map_err(err)
    }

    fn tabulate(&self) -> PyResult<Self> {
        self.0.tabulate().map(Self).map_err(err)
    }

    /// Values as floats, big-endian over inputs.
    fn table(&self) -> PyResult<Vec<f64>> {
        Ok(self.0.reals().map_err(err)?.into_owned())
    }

    fn indicator(&self, a: u32) -> PyResult<Self> {
        self.0.indicator(a).map(Self).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        let v = threshold_lab::io::with_schema(FUNCTION_SCHEMA, &self.0).map_err(err)?;
        Ok(threshold_lab::io::to_pretty(&v))
    }

    fn __repr__(&self) -> String {
        let kind = self.0.family().map_or("table", FamilySpec::name);
        format!("Function(q={}, n={}, {kind})", self.0.q(), self.0.n())
    }
}

/// A product measure given by its atoms.
#[pyclass(name = "Measure", module = "threshold_lab")]
#[derive(Clone)]
struct PyMeasure(ProductMeasure);

#[pymethods]
impl PyMeasure {
    #[new]
    fn new(atoms: Vec<f64>) -> PyResult<Self> {
        ProductMeasure::new(atoms).map(Self).map_err(err)
    }

    #[staticmethod]
    fn uniform(q: usize) -> Self {
        Self(ProductMeasure::uniform(q))
    }

    #[getter]
    fn atoms(&self) -> Vec<f64> {
        self.0.atoms().to_vec()
    }

    fn __repr__(&self) -> String {
        format!("Measure({:?})", self.0.atoms())
    }
}

fn measure_or_uniform(mu: Option<&PyMeasure>, q: usize) -> ProductMeasure {
    mu.map_or_else(|| ProductMeasure::uniform(q), |m| m.0.clone())
}

/// A choice function on subsets of `{0..m-1}`, keyed by member lists.
#[pyclass(name = "ChoiceFunction", module = "threshold_lab")]
#[derive(Clone)]
struct PyChoice(ChoiceFunction);

#[pymethods]
impl PyChoice {
    /// `choices` maps tuples of alternatives to the chosen one; singletons may be omitted.
    #[new]
    fn new(m: usize, choices: &Bound<'_, PyDict>) -> PyResult<Self> {
        let mut map = BTreeMap::new();
        for (k, v) in choices.iter() {
            let members: Vec<usize> = k.extract()?;
            map.insert(subset_mask(&members), v.extract::<usize>()?);
        }
        ChoiceFunction::from_map(m, &map).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_order(ranking: Vec<usize>) -> PyResult<Self> {
        let order = LinearOrder::new(ranking).map_err(err)?;
        ChoiceFunction::from_order(&order).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        from_json_with_schema(text, CHOICE_SCHEMA).map(Self).map_err(err)
    }

    #[getter]
    fn m(&self) -> usize {
        self.0.m()
    }

    fn __call__(&self, subset: Vec<usize>) -> PyResult<usize> {
        self.0.choice(subset_mask(&subset)).map_err(err)
    }

    /// The ranking it comes from, if it is rational.
    fn rational(&self) -> Option<Vec<usize>> {
        is_rational(&self.0).map(|o| o.ranking().to_vec())
    }

    fn to_json(&self) -> PyResult<String> {
        let v = threshold_lab::io::with_schema(CHOICE_SCHEMA, &self.0).map_err(err)?;
        Ok(threshold_lab::io::to_pretty(&v))
    }
}

/// Weighted linear orders (best first).
#[pyclass(name = "Profile", module = "threshold_lab")]
#[derive(Clone)]
struct PyProfile(VoterProfile);

#[pymethods]
impl PyProfile {
    /// One ranking per voter.
    #[new]
    fn new(voters: Vec<Vec<usize>>) -> PyResult<Self> {
        let orders = voters.into_iter().map(LinearOrder::new).collect::<Result<Vec<_>, _>>().map_err(err)?;
        VoterProfile::from_voters(orders).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        from_json_with_schema(text, PROFILE_SCHEMA).map(Self).map_err(err)
    }

    #[getter]
    fn m(&self) -> usize {
        self.0.m()
    }

    #[getter]
    fn size(&self) -> u64 {
        self.0.size()
    }

    fn voters(&self) -> Vec<Vec<usize>> {
        self.0.voters().map(|o| o.ranking().to_vec()).collect()
    }

    /// Pairs `(a, b)` with a strict majority preferring `a` to `b`.
    fn strict_majority(&self) -> Vec<(usize, usize)> {
        self.0.strict_majority()
    }

    #[pyo3(signature = (subset, tie_break="first_occurrence"))]
    fn plurality(&self, subset: Vec<usize>, tie_break: &str) -> PyResult<usize> {
        plurality_choice(&self.0, subset_mask(&subset), self::tie_break(tie_break)?).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        let v = threshold_lab::io::with_schema(PROFILE_SCHEMA, &self.0).map_err(err)?;
        Ok(threshold_lab::io::to_pretty(&v))
    }

    fn __repr__(&self) -> String {
        format!("Profile(m={}, voters={})", self.0.m(), self.0.size())
    }
}

#[pyfunction]
#[pyo3(signature = (f, mu=None))]
fn mean(f: &PyFunction, mu: Option<&PyMeasure>) -> PyResult<f64> {
    expectation(&f.0, &measure_or_uniform(mu, f.0.q())).map_err(err)
}

/// `P_mu[f = a]`.
#[pyfunction]
#[pyo3(signature = (f, a, mu=None))]
fn probability(f: &PyFunction, a: u32, mu: Option<&PyMeasure>) -> PyResult<f64> {
    prob_value(&f.0, &measure_or_uniform(mu, f.0.q()), a).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (f, mu=None))]
fn distribution(f: &PyFunction, mu: Option<&PyMeasure>) -> PyResult<Vec<f64>> {
    value_distribution(&f.0, &measure_or_uniform(mu, f.0.q())).map_err(err)
}

/// Monotone, fair, symmetric and (for binary functions) 0-monotone verdicts.
/// `group` is full, cyclic, none, or a list of generating permutations.
#[pyfunction]
#[pyo3(signature = (f, group=None))]
fn check(py: Python<'_>, f: &PyFunction, group: Option<&Bound<'_, PyAny>>) -> PyResult<PyObject> {
    let t = f.0.tabulate().map_err(err)?;
    let n = t.n();
    let group = match group {
        None => Some(SymmetryGroup::full(n)),
        Some(g) => match g.extract::<String>() {
            Ok(name) => match name.as_str() {
                "full" => Some(SymmetryGroup::full(n)),
                "cyclic" => Some(SymmetryGroup::cyclic(n)),
                "none" => None,
                _ => return Err(PyValueError::new_err(format!("unknown group {name:?}"))),
            },
            Err(_) => Some(SymmetryGroup::new(n, g.extract()?).map_err(err)?),
        },
    };
    let out = PyDict::new_bound(py);
    out.set_item("monotone", to_py(py, &check_monotone(&t).map_err(err)?)?)?;
    out.set_item("fair", to_py(py, &check_fair(&t).map_err(err)?)?)?;
    let symmetric = group.map(|g| check_symmetric(&t, &g)).transpose().map_err(err)?;
    out.set_item("symmetric", to_py(py, &symmetric)?)?;
    let zero = if t.is_binary().map_err(err)? { Some(check_zero_monotone(&t).map_err(err)?) } else { None };
    out.set_item("zero_monotone", to_py(py, &zero)?)?;
    Ok(out.into_any().unbind())
}

/// Efron-Stein components keyed by coordinate subsets.
#[pyfunction]
#[pyo3(signature = (f, mu=None))]
fn decompose(py: Python<'_>, f: &PyFunction, mu: Option<&PyMeasure>) -> PyResult<PyObject> {
    let d = efron_stein(&f.0, &measure_or_uniform(mu, f.0.q())).map_err(err)?;
    to_py(py, &d.to_record())
}

#[pyfunction]
#[pyo3(signature = (f, mu=None))]
fn influences(py: Python<'_>, f: &PyFunction, mu: Option<&PyMeasure>) -> PyResult<PyObject> {
    to_py(py, &influence_report(&f.0, &measure_or_uniform(mu, f.0.q())).map_err(err)?)
}

/// `alpha^2 / 6` (safe) or the sharper two-point constant (exact).
#[pyfunction]
#[pyo3(signature = (alpha, mode="safe"))]
fn hypercontractive_sigma(alpha: f64, mode: &str) -> PyResult<f64> {
    let mode = match mode {
        "safe" => SigmaMode::Safe,
        "exact" => SigmaMode::Exact,
        _ => return Err(PyValueError::new_err(format!("unknown mode {mode:?}"))),
    };
    hypercontractive_sigma_with(alpha, mode).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (g, mu, mode="safe"))]
fn verify_hypercontractivity(py: Python<'_>, g: &PyFunction, mu: &PyMeasure, mode: &str) -> PyResult<PyObject> {
    let mode = if mode == "exact" { SigmaMode::Exact } else { SigmaMode::Safe };
    to_py(py, &verify_hypercontractivity_with(&g.0, &mu.0, mode).map_err(err)?)
}

#[pyfunction]
fn verify_level(py: Python<'_>, g: &PyFunction, mu: &PyMeasure, k: usize) -> PyResult<PyObject> {
    to_py(py, &verify_level_bound(&g.0, &mu.0, k).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (f, mu=None))]
fn talagrand(py: Python<'_>, f: &PyFunction, mu: Option<&PyMeasure>) -> PyResult<PyObject> {
    to_py(py, &talagrand_report(&f.0, &measure_or_uniform(mu, f.0.q())).map_err(err)?)
}

fn base_measure(f: &QaryFunction, anchor: u32, base: Option<Vec<f64>>) -> PyResult<ProductMeasure> {
    match base {
        Some(atoms) => ProductMeasure::new(atoms).map_err(err),
        None => Ok(MeasurePath::uniform_base(f.q(), anchor as usize).map_err(err)?.base().clone()),
    }
}

/// `G(t) = P[f = anchor]` along `t delta_anchor + (1 - t) base`.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (f, anchor=0, base=None, grid=DEFAULT_GRID, method="exact", samples=DEFAULT_SAMPLES, seed=0))]
fn scan(
    py: Python<'_>,
    f: &PyFunction,
    anchor: u32,
    base: Option<Vec<f64>>,
    grid: usize,
    method: &str,
    samples: usize,
    seed: u64,
) -> PyResult<PyObject> {
    let base = base_measure(&f.0, anchor, base)?;
    let c = scan_path(&f.0, anchor, &base, grid, self::method(method, samples, seed)?).map_err(err)?;
    to_py(py, &c)
}

/// The interval where `G` runs from `eps` to `1 - eps`.
#[pyfunction]
#[pyo3(signature = (f, anchor=0, eps=0.1, base=None, grid=DEFAULT_GRID, method="exact", samples=DEFAULT_SAMPLES, seed=0))]
#[allow(clippy::too_many_arguments)]
fn window(
    py: Python<'_>,
    f: &PyFunction,
    anchor: u32,
    eps: f64,
    base: Option<Vec<f64>>,
    grid: usize,
    method: &str,
    samples: usize,
    seed: u64,
) -> PyResult<PyObject> {
    let base = base_measure(&f.0, anchor, base)?;
    let c = scan_path(&f.0, anchor, &base, grid, self::method(method, samples, seed)?).map_err(err)?;
    let w = threshold_window(&c, eps, &f.0).map_err(err)?;
    let out = to_py(py, &w)?;
    out.bind(py).set_item("bound_shape", bound_shape(eps, f.0.n()))?;
    Ok(out)
}

#[pyfunction]
#[pyo3(signature = (f, t, anchor=0, base=None, step=1e-4))]
fn russo(py: Python<'_>, f: &PyFunction, t: f64, anchor: u32, base: Option<Vec<f64>>, step: f64) -> PyResult<PyObject> {
    let base = base_measure(&f.0, anchor, base)?;
    let path = MeasurePath::new(anchor as usize, base).map_err(err)?;
    to_py(py, &russo_report(&f.0, &path, t, step).map_err(err)?)
}

/// Simplex measure of `{mu : eps <= P_mu[f = anchor] <= 1 - eps}`.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (f, anchor=0, eps=0.1, samples=DEFAULT_SAMPLES, seed=0, method="exact", inner_samples=1000))]
fn sweep(
    py: Python<'_>,
    f: &PyFunction,
    anchor: u32,
    eps: f64,
    samples: usize,
    seed: u64,
    method: &str,
    inner_samples: usize,
) -> PyResult<PyObject> {
    let mut sampler = SimplexSampler::new(f.0.q(), seed);
    let m = self::method(method, inner_samples, seed)?;
    to_py(py, &simplex_sweep(&f.0, anchor, eps, &mut sampler, samples, m).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (f, mu, symbol=0, samples=DEFAULT_SAMPLES, seed=0))]
fn jury(py: Python<'_>, f: &PyFunction, mu: &PyMeasure, symbol: u32, samples: usize, seed: u64) -> PyResult<PyObject> {
    to_py(py, &jury_experiment(&f.0, &mu.0, symbol, samples, seed).map_err(err)?)
}

/// A profile whose strict majority relation is the tournament `pairs` (winner, loser).
#[pyfunction]
fn mcgarvey(m: usize, pairs: Vec<(usize, usize)>) -> PyResult<PyProfile> {
    let t = Tournament::from_pairs(m, &pairs).map_err(err)?;
    mcgarvey_profile(&t).map(PyProfile).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (m, seed=0))]
fn random_tournament(m: usize, seed: u64) -> Vec<(usize, usize)> {
    Tournament::random(m, &mut stream(seed, 0)).pairs()
}

/// A profile realizing `c` under plurality, or None when none exists.
/// The returned dict has the profile under "profile" as a `Profile`.
#[pyfunction]
#[pyo3(signature = (c, budget=200))]
fn saari(py: Python<'_>, c: &PyChoice, budget: u64) -> PyResult<Option<PyObject>> {
    let Some(r) = saari_search(&c.0, budget).map_err(err)? else { return Ok(None) };
    let out = to_py(py, &r)?;
    out.bind(py).set_item("profile", Py::new(py, PyProfile(r.profile))?)?;
    Ok(Some(out))
}

#[pyfunction]
#[pyo3(signature = (c, profile, voters, samples=DEFAULT_SAMPLES, seed=0))]
fn indeterminacy(
    py: Python<'_>,
    c: &PyChoice,
    profile: &PyProfile,
    voters: usize,
    samples: usize,
    seed: u64,
) -> PyResult<PyObject> {
    to_py(py, &indeterminacy_experiment(&c.0, &profile.0, voters, samples, seed).map_err(err)?)
}

#[pymodule]
fn _core(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ThresholdLabError", m.py().get_type_bound::<ThresholdLabError>())?;
    m.add_class::<PyFunction>()?;
    m.add_class::<PyMeasure>()?;
    m.add_class::<PyChoice>()?;
    m.add_class::<PyProfile>()?;
    m.add_function(wrap_pyfunction!(mean, m)?)?;
    m.add_function(wrap_pyfunction!(probability, m)?)?;
    m.add_function(wrap_pyfunction!(distribution, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(influences, m)?)?;
    m.add_function(wrap_pyfunction!(hypercontractive_sigma, m)?)?;
    m.add_function(wrap_pyfunction!(verify_hypercontractivity, m)?)?;
    m.add_function(wrap_pyfunction!(verify_level, m)?)?;
    m.add_function(wrap_pyfunction!(talagrand, m)?)?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    m.add_function(wrap_pyfunction!(window, m)?)?;
    m.add_function(wrap_pyfunction!(russo, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(jury, m)?)?;
    m.add_function(wrap_pyfunction!(mcgarvey, m)?)?;
    m.add_function(wrap_pyfunction!(random_tournament, m)?)?;
    m.add_function(wrap_pyfunction!(saari, m)?)?;
    m.add_function(wrap_pyfunction!(indeterminacy, m)?)?;
    let names = [
        "ThresholdLabError", "Function", "Measure", "ChoiceFunction", "Profile", "mean", "probability",
        "distribution", "check", "decompose", "influences", "hypercontractive_sigma", "verify_hypercontractivity",
        "verify_level", "talagrand", "scan", "window", "russo", "sweep", "jury", "mcgarvey", "random_tournament",
        "saari", "indeterminacy",
    ];
    m.add("__all__", names.to_vec())?;
    Ok(())
}
