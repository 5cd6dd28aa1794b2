//! Python bindings: Smith normal form and friends, difference operators,
//! tower verification and the extension decision procedure.
//!
//! Files are exchanged as JSON strings in the same formats the `extdec`
//! command-line tool reads and writes.

use extcore::abelian::{self, FgAbGroup, GroupHom, IntMatrix};
use extcore::decide::{self as engine, Answer, GenParams, Verdict};
use extcore::diffcalc::{check_congruence, ActionAlgebra, DiffOperator, GValuedMap};
use extcore::{format, sample, tower};
use num_bigint::BigInt;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn matrix(rows: Vec<Vec<BigInt>>) -> PyResult<IntMatrix> {
    let cols = rows.first().map_or(0, Vec::len);
    IntMatrix::from_rows(rows, cols).map_err(err)
}

fn group(orders: Vec<BigInt>) -> PyResult<FgAbGroup> {
    FgAbGroup::new(orders).map_err(err)
}

fn hom(source: Vec<BigInt>, target: Vec<BigInt>, rows: Vec<Vec<BigInt>>) -> PyResult<GroupHom> {
    let (s, t) = (group(source)?, group(target)?);
    let m = if rows.is_empty() { IntMatrix::zeros(t.rank(), s.rank()) } else { matrix(rows)? };
    GroupHom::new(s, t, m).map_err(err)
}

/// Smith normal form `U A V = D`; returns a dict with `u`, `d`, `v`,
/// `u_inv`, `v_inv` (lists of rows) and `diagonal`.
#[pyfunction]
fn snf<'py>(py: Python<'py>, rows: Vec<Vec<BigInt>>) -> PyResult<Bound<'py, PyDict>> {
    let res = abelian::snf(&matrix(rows)?);
    let out = PyDict::new(py);
    out.set_item("u", res.u.to_rows())?;
    out.set_item("d", res.d.to_rows())?;
    out.set_item("v", res.v.to_rows())?;
    out.set_item("u_inv", res.u_inv.to_rows())?;
    out.set_item("v_inv", res.v_inv.to_rows())?;
    out.set_item("diagonal", res.diagonal())?;
    Ok(out)
}

/// Orders of the primary decomposition of `⊕ Z/q_i` (0 stands for `Z`), with
/// the matrices of the isomorphism and its inverse.
#[pyfunction]
fn primary_decomposition<'py>(py: Python<'py>, orders: Vec<BigInt>) -> PyResult<Bound<'py, PyDict>> {
    let (g, to, from) = abelian::primary_decomposition(&group(orders)?);
    let out = PyDict::new(py);
    out.set_item("orders", g.orders().to_vec())?;
    out.set_item("to", to.matrix().to_rows())?;
    out.set_item("from", from.matrix().to_rows())?;
    Ok(out)
}

/// Kernel of the homomorphism given by `rows` as `(orders, injection rows)`.
#[pyfunction]
fn kernel(source: Vec<BigInt>, target: Vec<BigInt>, rows: Vec<Vec<BigInt>>) -> PyResult<(Vec<BigInt>, Vec<Vec<BigInt>>)> {
    let (k, inj) = abelian::kernel(&hom(source, target, rows)?);
    Ok((k.orders().to_vec(), inj.matrix().to_rows()))
}

/// A preimage of `value`, or `None`.
#[pyfunction]
fn solve(source: Vec<BigInt>, target: Vec<BigInt>, rows: Vec<Vec<BigInt>>, value: Vec<BigInt>) -> PyResult<Option<Vec<BigInt>>> {
    let h = hom(source, target, rows)?;
    let v = h.target().element(value).map_err(err)?;
    Ok(abelian::solve(&h, &v).map_err(err)?.map(|x| x.into_coords()))
}

/// The operator `D_{q,ℓ}`, `q = p^m`.
#[pyclass(name = "DiffOperator", frozen)]
struct PyDiffOperator {
    inner: DiffOperator,
}

#[pymethods]
impl PyDiffOperator {
    #[new]
    fn new(p: u64, m: u32, l0: u64) -> PyResult<Self> {
        Ok(Self { inner: DiffOperator::build(p, m, l0).map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: format::parse_operator(text).map_err(err)? })
    }

    fn to_json(&self) -> String {
        format::write_operator(&self.inner)
    }

    #[getter]
    fn p(&self) -> u64 {
        self.inner.p()
    }

    #[getter]
    fn m(&self) -> u32 {
        self.inner.m()
    }

    #[getter]
    fn q(&self) -> BigInt {
        self.inner.q()
    }

    #[getter]
    fn ell(&self) -> u64 {
        self.inner.ell()
    }

    #[getter]
    fn theta(&self) -> BigInt {
        self.inner.theta().clone()
    }

    /// `[(coefficient, superscript), …]`, largest superscript first.
    #[getter]
    fn terms(&self) -> Vec<(BigInt, BigInt)> {
        self.inner.terms().iter().map(|t| (t.coefficient.clone(), t.superscript.clone())).collect()
    }

    /// Exhaustive congruence check for one map. `table[x * t_size + y]` is
    /// `x + y`; `values[x]` are coordinates in `⊕ Z/orders`.
    /// Returns the failing `(x, y)` pairs.
    fn check(
        &self,
        s_size: usize,
        t_size: usize,
        table: Vec<usize>,
        zero: usize,
        orders: Vec<BigInt>,
        values: Vec<Vec<BigInt>>,
    ) -> PyResult<Vec<(usize, usize)>> {
        let alg = ActionAlgebra::new(s_size, t_size, table, zero).map_err(err)?;
        let g = group(orders)?;
        let values = values.into_iter().map(|v| g.element(v)).collect::<Result<_, _>>().map_err(err)?;
        let f = GValuedMap::new(alg, g, values).map_err(err)?;
        let report = check_congruence(&self.inner, &f).map_err(err)?;
        Ok(report.violations.iter().map(|v| (v.x, v.y)).collect())
    }

    /// Random sweep as in `extdec diff check`: `(checks, violations)`.
    #[pyo3(signature = (trials=50, seed=0, max_s=6, max_t=6))]
    fn sweep(&self, trials: u64, seed: u64, max_s: usize, max_t: usize) -> PyResult<(usize, usize)> {
        if max_s == 0 || max_t == 0 {
            return Err(err("max_s and max_t must be positive"));
        }
        let q = u64::try_from(self.inner.q()).map_err(|_| err("q too large to sample"))?;
        let targets = [FgAbGroup::cyclic(q), FgAbGroup::new([q, q]).map_err(err)?];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut checks, mut bad) = (0, 0);
        for trial in 0..trials {
            let alg = sample::random_algebra(&mut rng, max_s, max_t);
            let f = sample::random_map(&mut rng, &alg, &targets[(trial % 2) as usize]);
            let report = check_congruence(&self.inner, &f).map_err(err)?;
            checks += report.checks;
            bad += report.violations.len();
        }
        Ok((checks, bad))
    }

    fn __repr__(&self) -> String {
        self.inner.to_string()
    }
}

/// Builds the action ladder of a tower file and audits it.
#[pyfunction]
#[pyo3(signature = (text, l0=2))]
fn verify_tower<'py>(py: Python<'py>, text: &str, l0: u64) -> PyResult<Bound<'py, PyDict>> {
    let t = format::parse_tower(text).map_err(err)?;
    let ladder = tower::build_actions(&t, l0).map_err(err)?;
    let report = tower::verify_ladder(&t, &ladder).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("thetas", ladder.thetas())?;
    out.set_item("common_theta", tower::common_theta(&ladder))?;
    out.set_item("checks", report.checks)?;
    out.set_item("violations", report.violations.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>())?;
    Ok(out)
}

fn verdict<'py>(py: Python<'py>, v: &Verdict) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    out.set_item("verdict", if v.answer == Answer::Yes { "YES" } else { "NO" })?;
    out.set_item("witness", v.witness)?;
    out.set_item("h0", v.h0.as_ref().map(|h| h.coords().to_vec()))?;
    out.set_item("h0_size", v.h0_size)?;
    Ok(out)
}

/// Structural violations of an instance file; empty when valid.
#[pyfunction]
fn validate_instance(text: &str) -> PyResult<Vec<String>> {
    let inst = format::parse_instance(text).map_err(err)?;
    Ok(engine::validate_instance(&inst).violations.iter().map(|v| format!("{v:?}")).collect())
}

#[pyfunction]
#[pyo3(name = "decide")]
fn decide_instance<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyDict>> {
    let inst = format::parse_instance(text).map_err(err)?;
    verdict(py, &engine::decide(&inst).map_err(err)?)
}

#[pyfunction]
fn brute_force<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyDict>> {
    let inst = format::parse_instance(text).map_err(err)?;
    verdict(py, &engine::brute_force(&inst).map_err(err)?)
}

/// Instance file text, byte-identical for equal arguments.
#[pyfunction]
#[pyo3(signature = (seed, theta=4, max_rank=2, summands=vec![2, 3, 4, 8], free_rank=0, radius=3, hint=None))]
fn generate_instance(
    seed: u64,
    theta: u64,
    max_rank: usize,
    summands: Vec<u64>,
    free_rank: usize,
    radius: u64,
    hint: Option<bool>,
) -> PyResult<String> {
    let params = GenParams { theta, max_rank, summands, free_rank, radius, hint };
    Ok(format::write_instance(&engine::generate_instance(&params, seed).map_err(err)?))
}

#[pymodule]
fn extdec(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDiffOperator>()?;
    m.add_function(wrap_pyfunction!(snf, m)?)?;
    m.add_function(wrap_pyfunction!(primary_decomposition, m)?)?;
    m.add_function(wrap_pyfunction!(kernel, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(verify_tower, m)?)?;
    m.add_function(wrap_pyfunction!(validate_instance, m)?)?;
    m.add_function(wrap_pyfunction!(decide_instance, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force, m)?)?;
    m.add_function(wrap_pyfunction!(generate_instance, m)?)?;
    m.add("FORMAT_VERSION", format::FORMAT_VERSION)?;
    Ok(())
}
