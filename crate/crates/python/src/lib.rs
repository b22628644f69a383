//! Python bindings: `import highway_toll`.

use std::path::PathBuf;

use highway_toll as ht;
use highway_toll::axioms::{check_axiom, Axiom, SuiteConfig};
use highway_toll::{Allocation, AllocationRule, Method, TollError};
use pyo3::exceptions::{PyIndexError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: TollError) -> PyErr {
    match e {
        TollError::IndexOutOfRange { .. } => PyIndexError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn allocation(x: Vec<f64>) -> PyResult<Allocation> {
    Allocation::new(x).map_err(err)
}

/// Upper-triangular toll matrix over `n` segments, 1-based.
#[pyclass(name = "TollMatrix", module = "highway_toll")]
pub struct PyTollMatrix {
    inner: ht::TollMatrix,
}

#[pymethods]
impl PyTollMatrix {
    /// Builds from a dense square grid where `grid[h-1][k-1]` is `t_hk`.
    #[new]
    fn new(grid: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(PyTollMatrix { inner: ht::TollMatrix::from_dense(&grid).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (rows, n=None))]
    fn from_triplets(rows: Vec<(usize, usize, f64)>, n: Option<usize>) -> PyResult<Self> {
        Ok(PyTollMatrix { inner: ht::TollMatrix::from_triplets(rows, n).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (path, segments=None))]
    fn load(path: PathBuf, segments: Option<usize>) -> PyResult<Self> {
        Ok(PyTollMatrix { inner: ht::io::load_matrix(&path, segments).map_err(err)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn get(&self, entry: usize, exit: usize) -> PyResult<f64> {
        ht::Trip::checked(entry, exit, self.inner.n()).map_err(err)?;
        Ok(self.inner.get(entry, exit))
    }

    fn total(&self) -> f64 {
        self.inner.total()
    }

    fn trips(&self) -> Vec<(usize, usize, f64)> {
        self.inner.trips().map(|(t, v)| (t.entry, t.exit, v)).collect()
    }

    fn dense(&self) -> Vec<Vec<f64>> {
        self.inner.dense()
    }

    fn __repr__(&self) -> String {
        format!("TollMatrix(n={}, trips={})", self.inner.n(), self.inner.trip_count())
    }
}

#[pyfunction]
fn ses(t: &PyTollMatrix) -> Vec<f64> {
    ht::ses(&t.inner).into_vec()
}

#[pyfunction]
fn sps(t: &PyTollMatrix) -> Vec<f64> {
    ht::sps(&t.inner).into_vec()
}

#[pyfunction]
fn scs(t: &PyTollMatrix) -> Vec<f64> {
    ht::scs(&t.inner).into_vec()
}

/// Applies a method (`ses`, `sps`, `scs`) or an alternative rule by name.
#[pyfunction]
fn allocate(t: &PyTollMatrix, method: &str) -> PyResult<Vec<f64>> {
    if let Ok(m) = method.parse::<Method>() {
        return Ok(m.apply(&t.inner).into_vec());
    }
    let rule = ht::counterexample_method(method).map_err(err)?;
    Ok(rule.allocate(&t.inner).into_vec())
}

#[pyfunction]
fn family_allocate(t: &PyTollMatrix, scheme: &str) -> PyResult<Vec<f64>> {
    let s = ht::builtin_scheme(scheme).map_err(err)?;
    Ok(ht::family_allocate(&t.inner, &s).map_err(err)?.into_vec())
}

#[pyfunction]
fn shapley(t: &PyTollMatrix) -> PyResult<Vec<f64>> {
    let g = ht::game_from(&t.inner).map_err(err)?;
    Ok(ht::shapley_oracle(&g).map_err(err)?.into_vec())
}

#[pyfunction]
fn tau(t: &PyTollMatrix) -> PyResult<Vec<f64>> {
    let g = ht::game_from(&t.inner).map_err(err)?;
    Ok(ht::tau_oracle(&g).map_err(err)?.into_vec())
}

#[pyfunction]
fn average_tree(t: &PyTollMatrix) -> PyResult<Vec<f64>> {
    let g = ht::game_from(&t.inner).map_err(err)?;
    Ok(ht::at_oracle(&g).into_vec())
}

/// Core membership of `x`; violations as `(entry, exit, value, allocated)`.
#[pyfunction]
#[pyo3(signature = (t, x, tol=ht::DEFAULT_TOLERANCE))]
fn core_check<'py>(py: Python<'py>, t: &PyTollMatrix, x: Vec<f64>, tol: f64) -> PyResult<Bound<'py, PyDict>> {
    let g = ht::game_from(&t.inner).map_err(err)?;
    let r = ht::game::core_check_with(&g, &allocation(x)?, tol).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("is_member", r.is_member)?;
    d.set_item("efficient", r.efficient)?;
    d.set_item("efficiency_gap", r.efficiency_gap)?;
    let violated: Vec<(usize, usize, f64, f64)> =
        r.violated.iter().map(|v| (v.entry, v.exit, v.value, v.allocated)).collect();
    d.set_item("violated", violated)?;
    Ok(d)
}

#[pyfunction]
fn sps_core_criterion<'py>(py: Python<'py>, t: &PyTollMatrix) -> PyResult<Bound<'py, PyDict>> {
    let c = ht::sps_core_criterion(&t.inner);
    let d = PyDict::new(py);
    d.set_item("satisfied", c.satisfied)?;
    d.set_item("beta", c.beta)?;
    d.set_item("worst_interval", c.worst_interval.map(|w| (w.entry, w.exit)))?;
    d.set_item("rhs_max", c.rhs_max)?;
    Ok(d)
}

#[pyfunction]
fn gini(x: Vec<f64>) -> PyResult<f64> {
    ht::equity::gini(&x).map_err(err)
}

#[pyfunction]
fn lorenz(x: Vec<f64>) -> PyResult<Vec<(f64, f64)>> {
    Ok(ht::equity::lorenz(&x).map_err(err)?.points)
}

/// `(spearman, pearson)`.
#[pyfunction]
fn rank_correlations(x: Vec<f64>, y: Vec<f64>) -> PyResult<(f64, f64)> {
    let c = ht::equity::rank_correlations(&x, &y).map_err(err)?;
    Ok((c.spearman, c.pearson))
}

/// 1-based segments of the top and bottom positions; ties by lower index.
#[pyfunction]
#[pyo3(signature = (x, top=3, bottom=3))]
fn ranking(x: Vec<f64>, top: usize, bottom: usize) -> (Vec<usize>, Vec<usize>) {
    let r = ht::equity::ranking(&x, top, bottom);
    (r.top.iter().map(|s| s.segment).collect(), r.bottom.iter().map(|s| s.segment).collect())
}

#[pyfunction]
#[pyo3(signature = (n, density=1.0, max_toll=10.0, seed=0))]
fn random_matrix(n: usize, density: f64, max_toll: f64, seed: u64) -> PyResult<PyTollMatrix> {
    Ok(PyTollMatrix { inner: ht::random_matrix(n, density, max_toll, seed).map_err(err)? })
}

/// Seeded check of one axiom; returns `(holds, instances_checked, witness)`.
#[pyfunction]
#[pyo3(signature = (method, axiom, trials=200, seed=1))]
fn axiom_holds(method: &str, axiom: &str, trials: usize, seed: u64) -> PyResult<(bool, usize, Option<String>)> {
    let axiom: Axiom = axiom.parse().map_err(err)?;
    let config = SuiteConfig { trials, seed, ..SuiteConfig::default() };
    let v = match method.parse::<Method>() {
        Ok(m) => check_axiom(&m, axiom, &config),
        Err(_) => check_axiom(&ht::counterexample_method(method).map_err(err)?, axiom, &config),
    };
    Ok((v.holds, v.instances_checked, v.witness.map(|w| w.instance.describe())))
}

#[pymodule]
#[pyo3(name = "highway_toll")]
fn highway_toll_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTollMatrix>()?;
    m.add_function(wrap_pyfunction!(ses, m)?)?;
    m.add_function(wrap_pyfunction!(sps, m)?)?;
    m.add_function(wrap_pyfunction!(scs, m)?)?;
    m.add_function(wrap_pyfunction!(allocate, m)?)?;
    m.add_function(wrap_pyfunction!(family_allocate, m)?)?;
    m.add_function(wrap_pyfunction!(shapley, m)?)?;
    m.add_function(wrap_pyfunction!(tau, m)?)?;
    m.add_function(wrap_pyfunction!(average_tree, m)?)?;
    m.add_function(wrap_pyfunction!(core_check, m)?)?;
    m.add_function(wrap_pyfunction!(sps_core_criterion, m)?)?;
    m.add_function(wrap_pyfunction!(gini, m)?)?;
    m.add_function(wrap_pyfunction!(lorenz, m)?)?;
    m.add_function(wrap_pyfunction!(rank_correlations, m)?)?;
    m.add_function(wrap_pyfunction!(ranking, m)?)?;
    m.add_function(wrap_pyfunction!(random_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(axiom_holds, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> PyTollMatrix {
        PyTollMatrix::from_triplets(vec![(1, 2, 1.0), (1, 3, 1.0)], Some(3)).unwrap()
    }

    #[test]
    fn wrappers_delegate() {
        let t = example();
        assert_eq!(t.n(), 3);
        assert_eq!(sps(&t), vec![0.8, 0.8, 0.4]);
        assert_eq!(allocate(&t, "ses").unwrap(), ses(&t));
        assert_eq!(allocate(&t, "A2_zero").unwrap(), vec![0.0; 3]);
        assert!(allocate(&t, "nope").is_err());
        let x = scs(&t);
        assert!(family_allocate(&t, "scs").unwrap().iter().zip(&x).all(|(a, b)| (a - b).abs() < 1e-12));
        assert_eq!(ranking(vec![1.0, 3.0, 2.0], 1, 1), (vec![2], vec![1]));
    }

    #[test]
    fn axiom_wrapper() {
        let (holds, checked, witness) = axiom_holds("scs", "linearity", 20, 3).unwrap();
        assert!(holds && checked == 20 && witness.is_none());
        let (holds, _, witness) = axiom_holds("ses", "weighted_segment_symmetry", 20, 3).unwrap();
        assert!(!holds && witness.is_some());
    }
}
