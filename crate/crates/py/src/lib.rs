//! Python bindings: the `atlab` extension module.

use std::time::Duration;

use atlab_core::bench;
use atlab_core::codecs::{self, Scheme};
use atlab_core::ensemble::{self, SelectionConfig};
use atlab_core::grammar;
use atlab_core::sat::{self, CanonicalEnumerator, SatError};
use atlab_core::{assembly_index_exact, assembly_index_split_branch, ExactLimits, IndexError, MinimalSubspace, ObjectString};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyBytes, PyDict, PyFloat, PyList, PyString};
use serde_json::Value;

create_exception!(atlab, GuardError, PyException, "A resource guard refused the request.");

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn index_err(e: IndexError) -> PyErr {
    GuardError::new_err(e.to_string())
}

fn sat_err(e: SatError) -> PyErr {
    match e {
        SatError::Guard { .. } | SatError::Budget { .. } | SatError::Index(_) => GuardError::new_err(e.to_string()),
        _ => value_err(e),
    }
}

fn object(s: &str) -> PyResult<ObjectString> {
    s.parse().map_err(value_err)
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => PyBool::new(py, *b).to_owned().into_any(),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.into_pyobject(py)?.into_any(),
            (_, Some(u)) => u.into_pyobject(py)?.into_any(),
            _ => PyFloat::new(py, n.as_f64().unwrap_or(f64::NAN)).into_any(),
        },
        Value::String(s) => PyString::new(py, s).into_any(),
        Value::Array(a) => {
            let l = PyList::empty(py);
            for x in a {
                l.append(to_py(py, x)?)?;
            }
            l.into_any()
        }
        Value::Object(o) => {
            let d = PyDict::new(py);
            for (k, x) in o {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn ser<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &serde_json::to_value(v).map_err(value_err)?)
}

/// A rooted assembly subspace building one object, with its index.
#[pyclass(frozen, module = "atlab")]
struct Witness {
    inner: MinimalSubspace,
    #[pyo3(get)]
    exact: bool,
}

#[pymethods]
impl Witness {
    #[getter]
    fn index(&self) -> usize {
        self.inner.index
    }

    #[getter]
    fn terminal(&self) -> String {
        self.inner.terminal_object().to_string()
    }

    #[getter]
    fn vertices(&self) -> Vec<String> {
        self.inner.space.vertices.iter().map(|v| v.to_string()).collect()
    }

    /// Edges as `(source, label, target, side)` tuples of objects.
    #[getter]
    fn edges(&self) -> Vec<(String, String, String, String)> {
        let s = &self.inner.space;
        s.edges
            .iter()
            .map(|e| {
                (
                    s.vertices[e.source].to_string(),
                    s.vertices[e.label].to_string(),
                    s.vertices[e.target].to_string(),
                    e.side.to_string(),
                )
            })
            .collect()
    }

    #[getter]
    fn gamma_min(&self) -> usize {
        self.inner.gamma_min.len()
    }

    #[getter]
    fn gamma_max(&self) -> usize {
        self.inner.gamma_max.len()
    }

    fn to_json(&self) -> String {
        self.inner.to_json_value().to_string()
    }

    fn to_dot(&self) -> String {
        self.inner.space.to_dot()
    }

    /// Straight-line grammar, one rule per line.
    fn grammar(&self) -> PyResult<String> {
        Ok(grammar::space_to_cfg(&self.inner).map_err(value_err)?.to_string())
    }

    fn grammar_metrics<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        ser(py, &grammar::grammar_metrics(&self.inner).map_err(value_err)?)
    }

    /// S_AT stream of this witness (with the `SAT1` file magic).
    fn sat_encode<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyBytes>> {
        let code = sat::encode_sat(&self.inner, &mut CanonicalEnumerator::default()).map_err(sat_err)?;
        Ok(PyBytes::new(py, &code.to_file_bytes()))
    }

    fn __repr__(&self) -> String {
        format!(
            "Witness(terminal={:?}, index={}, exact={})",
            self.inner.terminal_object().as_str(),
            self.inner.index,
            if self.exact { "True" } else { "False" }
        )
    }
}

/// Exact assembly index; raises `GuardError` over `max_len` or on timeout.
#[pyfunction]
#[pyo3(signature = (x, max_len = atlab_core::index::DEFAULT_MAX_LEN, timeout = 60.0))]
fn assembly_index(x: &str, max_len: usize, timeout: f64) -> PyResult<Witness> {
    let limits = ExactLimits { max_len, timeout: Duration::from_secs_f64(timeout.max(0.0)) };
    let r = assembly_index_exact(&object(x)?, limits).map_err(index_err)?;
    Ok(Witness { inner: r.witness, exact: true })
}

/// Deterministic split-branch upper bound on the assembly index.
#[pyfunction]
fn split_branch_index(x: &str) -> PyResult<Witness> {
    let r = assembly_index_split_branch(&object(x)?);
    Ok(Witness { inner: r.witness, exact: false })
}

/// LZ-family factorization: `{"factors", "bits", "hex"}`.
#[pyfunction]
fn factorize<'py>(py: Python<'py>, x: &str, scheme: &str) -> PyResult<Bound<'py, PyAny>> {
    let scheme: Scheme = scheme.parse().map_err(value_err)?;
    let f = codecs::factorize(&object(x)?, scheme);
    to_py(
        py,
        &serde_json::json!({"factors": f.factor_count, "bits": f.bit_length, "hex": f.pack().to_hex()}),
    )
}

#[pyfunction]
fn rle_runs(x: &str) -> PyResult<Vec<(String, usize)>> {
    Ok(codecs::rle_encode(&object(x)?).runs.into_iter().map(|(b, n)| ((b as char).to_string(), n)).collect())
}

#[pyfunction]
fn rle_bits(x: &str) -> PyResult<f64> {
    Ok(codecs::rle_encode(&object(x)?).summary.size_bits)
}

#[pyfunction]
fn huffman_bits(x: &str) -> PyResult<f64> {
    Ok(codecs::huffman_length(&object(x)?).summary.size_bits)
}

#[pyfunction]
fn entropy_bits(x: &str) -> PyResult<f64> {
    Ok(codecs::empirical_entropy(&object(x)?).size_bits)
}

#[pyfunction]
fn k_upper_bound(x: &str) -> PyResult<usize> {
    Ok(codecs::k_upper_bound(&object(x)?).bits)
}

/// Decodes an S_AT stream, with or without the `SAT1` magic.
#[pyfunction]
fn sat_decode(data: &[u8]) -> PyResult<String> {
    let bytes = sat::read_sat_file(data).unwrap_or(data);
    Ok(sat::decode_sat(bytes, &mut CanonicalEnumerator::default()).map_err(sat_err)?.to_string())
}

/// Recovers an object from the vertex set of one of its minimal subspaces.
#[pyfunction]
fn decode_from_vertex_set(vertices: Vec<String>) -> PyResult<String> {
    let vs = vertices.iter().map(|v| object(v)).collect::<PyResult<Vec<_>>>()?;
    Ok(sat::decode_from_vertex_set(&vs, sat::DEFAULT_BUDGET).map_err(sat_err)?.to_string())
}

/// Assembly number of `[(object, copies), ...]`; indices are computed.
#[pyfunction]
fn assembly_number(items: Vec<(String, u64)>) -> PyResult<f64> {
    let items = items.into_iter().map(|(o, n)| Ok((object(&o)?, n))).collect::<PyResult<Vec<_>>>()?;
    Ok(ensemble::assembly_number(&ensemble::Ensemble::from_copies(items).map_err(value_err)?))
}

/// Prefix code over a JSON catalog; one dict per ensemble.
#[pyfunction]
fn ensemble_code<'py>(py: Python<'py>, catalog_json: &str) -> PyResult<Bound<'py, PyAny>> {
    let cat = ensemble::catalog_from_json(catalog_json).map_err(value_err)?;
    let code = ensemble::ensemble_prefix_code(&cat, &ensemble::catalog_measure(&cat)).map_err(value_err)?;
    ser(py, &code)
}

/// Biased-selection run; returns the ensemble's items and assembly number.
#[pyfunction]
#[pyo3(signature = (steps, bias, seed = 0, pool = "01"))]
fn simulate_selection<'py>(py: Python<'py>, steps: usize, bias: f64, seed: u64, pool: &str) -> PyResult<Bound<'py, PyAny>> {
    let cfg = SelectionConfig { pool: pool.as_bytes().to_vec(), steps, bias, seed };
    let e = ensemble::simulate_selection(&cfg).map_err(value_err)?;
    to_py(py, &serde_json::json!({"assembly_number": ensemble::assembly_number(&e), "items": e.items}))
}

/// Per-object metric rows for a list of strings.
#[pyfunction]
fn corpus_metrics<'py>(py: Python<'py>, corpus: Vec<String>) -> PyResult<Bound<'py, PyAny>> {
    ser(py, &bench::corpus_metrics(&corpus, ExactLimits::default()).map_err(value_err)?)
}

#[pyfunction]
fn spearman(x: Vec<f64>, y: Vec<f64>) -> PyResult<Option<f64>> {
    if x.len() != y.len() {
        return Err(value_err("columns differ in length"));
    }
    Ok(bench::spearman_rho(&x, &y))
}

#[pyfunction]
fn divergence<'py>(py: Python<'py>, n_max: u64) -> PyResult<Bound<'py, PyAny>> {
    if n_max < 4 {
        return Err(value_err("n_max must be at least 4"));
    }
    ser(py, &bench::divergence_demo(n_max))
}

#[pymodule]
fn atlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("GuardError", m.py().get_type::<GuardError>())?;
    m.add_class::<Witness>()?;
    m.add_function(wrap_pyfunction!(assembly_index, m)?)?;
    m.add_function(wrap_pyfunction!(split_branch_index, m)?)?;
    m.add_function(wrap_pyfunction!(factorize, m)?)?;
    m.add_function(wrap_pyfunction!(rle_runs, m)?)?;
    m.add_function(wrap_pyfunction!(rle_bits, m)?)?;
    m.add_function(wrap_pyfunction!(huffman_bits, m)?)?;
    m.add_function(wrap_pyfunction!(entropy_bits, m)?)?;
    m.add_function(wrap_pyfunction!(k_upper_bound, m)?)?;
    m.add_function(wrap_pyfunction!(sat_decode, m)?)?;
    m.add_function(wrap_pyfunction!(decode_from_vertex_set, m)?)?;
    m.add_function(wrap_pyfunction!(assembly_number, m)?)?;
    m.add_function(wrap_pyfunction!(ensemble_code, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_selection, m)?)?;
    m.add_function(wrap_pyfunction!(corpus_metrics, m)?)?;
    m.add_function(wrap_pyfunction!(spearman, m)?)?;
    m.add_function(wrap_pyfunction!(divergence, m)?)?;
    Ok(())
}
