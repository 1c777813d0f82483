//! Python bindings: build sequence sets, analyze them and verify exports.

use num_bigint::BigUint;
use pyo3::create_exception;
use pyo3::exceptions::{PyMemoryError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;

use spreadseq::analysis::{
    coherence_bruteforce, coherence_by_rank, mem_budget, papr_critical_set, papr_set,
    SpreadingMatrix, DEFAULT_OVERSAMPLE,
};
use spreadseq::constructions::{count_configs as count, ConstructionSpec, Variant};
use spreadseq::export::ExportDoc;
use spreadseq::random::seeded_spec;
use spreadseq::report::{analyze, verify_matrix, AnalysisOptions};
use spreadseq::Error;

create_exception!(spreadseq, ConditionViolation, PyValueError);
create_exception!(spreadseq, ParseError, PyValueError);
create_exception!(spreadseq, CapacityError, PyMemoryError);

fn py_err(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::Parse { .. } => ParseError::new_err(msg),
        Error::Capacity { .. } => CapacityError::new_err(msg),
        _ => ConditionViolation::new_err(msg),
    }
}

fn variant(name: &str) -> PyResult<Variant> {
    name.parse().map_err(py_err)
}

fn json_value<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

fn to_json<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// A spreading sequence set: L blocks of p^m sequences of length p^m over Z_q.
#[pyclass(module = "spreadseq", frozen)]
struct SequenceSet {
    phi: SpreadingMatrix,
    rejections: Option<usize>,
}

#[pymethods]
impl SequenceSet {
    #[getter]
    fn p(&self) -> u32 {
        self.phi.p().get()
    }

    #[getter]
    fn m(&self) -> usize {
        self.phi.m()
    }

    #[getter]
    fn h(&self) -> usize {
        self.phi.h()
    }

    #[getter]
    fn q(&self) -> u32 {
        self.phi.q()
    }

    #[getter]
    fn rows(&self) -> usize {
        self.phi.rows()
    }

    #[getter]
    fn cols(&self) -> usize {
        self.phi.cols()
    }

    #[getter]
    fn blocks(&self) -> usize {
        self.phi.blocks()
    }

    /// Candidate draws thrown away before a seeded draw succeeded.
    #[getter]
    fn rejections(&self) -> Option<usize> {
        self.rejections
    }

    /// The generating matrices, one m x m list per block.
    fn matrices(&self) -> Vec<Vec<Vec<u8>>> {
        self.phi
            .family()
            .members()
            .iter()
            .map(|a| a.matrix().to_rows())
            .collect()
    }

    /// Phase exponents k of column c in block `block` (0-based); entries are omega_q^k.
    fn column(&self, block: usize, c: u64) -> PyResult<Vec<u32>> {
        Ok(self.phi.column(block, c).map_err(py_err)?.phases)
    }

    /// Every column, in block order.
    fn columns(&self) -> PyResult<Vec<Vec<u32>>> {
        let pm = self.phi.materialize(mem_budget()).map_err(py_err)?;
        Ok(pm.columns.into_iter().map(|c| c.phases).collect())
    }

    fn rank_table(&self) -> Vec<Vec<usize>> {
        self.phi.family().rank_table()
    }

    /// Coherence mu. The rank formula is exact only for h = 1.
    #[pyo3(signature = (brute_force = false))]
    fn coherence(&self, brute_force: bool) -> PyResult<f64> {
        let r = if brute_force {
            coherence_bruteforce(&self.phi)
        } else {
            coherence_by_rank(self.phi.family())
        };
        Ok(r.map_err(py_err)?.mu)
    }

    #[pyo3(signature = (oversample = DEFAULT_OVERSAMPLE))]
    fn papr(&self, oversample: usize) -> PyResult<f64> {
        papr_set(&self.phi, oversample).map_err(py_err)
    }

    /// Set PAPR sampled only at t = j/M.
    fn papr_critical(&self) -> PyResult<f64> {
        papr_critical_set(&self.phi).map_err(py_err)
    }

    /// Full analysis report as a dict.
    #[pyo3(signature = (oversample = DEFAULT_OVERSAMPLE, brute_force = false, verify = true))]
    fn analyze<'py>(
        &self,
        py: Python<'py>,
        oversample: usize,
        brute_force: bool,
        verify: bool,
    ) -> PyResult<Bound<'py, PyAny>> {
        let opts = AnalysisOptions {
            oversample,
            brute_force,
            verify,
            papr: true,
        };
        let report = analyze(&self.phi, &opts).map_err(py_err)?;
        json_value(py, &to_json(&report)?)
    }

    /// The JSON export document.
    #[pyo3(signature = (normalize = false))]
    fn to_json(&self, normalize: bool) -> PyResult<String> {
        ExportDoc::from_spreading(&self.phi, normalize)
            .and_then(|d| d.to_json())
            .map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "SequenceSet({}, p={}, m={}, q={}, {} x {})",
            self.phi.family().provenance().construction,
            self.p(),
            self.m(),
            self.q(),
            self.rows(),
            self.cols()
        )
    }
}

fn list(v: Option<Vec<u8>>) -> Vec<u8> {
    v.unwrap_or_default()
}

/// Build a sequence set from explicit parameters or, with `seed`, from a
/// seeded draw of valid ones. Any h > 1 lifts the variant to q = p^h.
#[pyfunction]
#[pyo3(signature = (
    variant_name, p, m, *, h = 1, pi = None, a = None, b = None, d = None,
    tau = None, s = None, e = None, base = None, seed = None
))]
#[allow(clippy::too_many_arguments)]
fn build(
    variant_name: &str,
    p: u32,
    m: usize,
    h: usize,
    pi: Option<Vec<usize>>,
    a: Option<Vec<u8>>,
    b: Option<Vec<u8>>,
    d: Option<Vec<Vec<u8>>>,
    tau: Option<usize>,
    s: Option<usize>,
    e: Option<u8>,
    base: Option<&str>,
    seed: Option<u64>,
) -> PyResult<SequenceSet> {
    let v = variant(variant_name)?;
    let base = base.map(variant).transpose()?;
    let (v, base) = match (v, h) {
        (Variant::CorollaryLift, _) => (v, base),
        (v, 1) => (v, None),
        (v, _) => (Variant::CorollaryLift, Some(v)),
    };
    let (spec, rejections) = match seed {
        Some(seed) => {
            let draw = seeded_spec(v, base, p, m, h, seed).map_err(py_err)?;
            (draw.spec, Some(draw.rejections))
        }
        None => (
            ConstructionSpec {
                variant: v,
                p,
                m,
                h,
                pi: pi.ok_or_else(|| ConditionViolation::new_err("pi is required without seed"))?,
                a: list(a),
                b: list(b),
                d: d.unwrap_or_default(),
                tau,
                s,
                e,
                base,
            },
            None,
        ),
    };
    let phi = spec.build().map_err(py_err)?;
    Ok(SequenceSet { phi, rejections })
}

/// Check a JSON export; returns the verification report as a dict.
#[pyfunction]
#[pyo3(signature = (text, oversample = DEFAULT_OVERSAMPLE))]
fn verify_json<'py>(py: Python<'py>, text: &str, oversample: usize) -> PyResult<Bound<'py, PyAny>> {
    let doc = ExportDoc::from_json(text).map_err(py_err)?;
    let pm = doc.phase_matrix().map_err(py_err)?;
    let family = doc.family().map_err(py_err)?;
    let leads = doc.leading_coordinates();
    let report = verify_matrix(&pm, doc.p, doc.m, leads.as_deref(), Some(&family), oversample)
        .map_err(py_err)?;
    let out = json_value(py, &to_json(&report)?)?;
    out.set_item("passed", report.passed())?;
    Ok(out)
}

/// Number of distinct parameter configurations of a variant.
#[pyfunction]
fn count_configs(variant_name: &str, p: u32, m: usize) -> PyResult<BigUint> {
    let p = spreadseq::fp::PrimeModulus::new(p).map_err(py_err)?;
    count(variant(variant_name)?, p, m).map_err(py_err)
}

#[pyfunction]
fn variants() -> Vec<&'static str> {
    Variant::ALL.iter().map(|v| v.name()).collect()
}

#[pymodule]
#[pyo3(name = "spreadseq")]
fn spreadseq_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<SequenceSet>()?;
    m.add_function(wrap_pyfunction!(build, m)?)?;
    m.add_function(wrap_pyfunction!(verify_json, m)?)?;
    m.add_function(wrap_pyfunction!(count_configs, m)?)?;
    m.add_function(wrap_pyfunction!(variants, m)?)?;
    m.add("ConditionViolation", m.py().get_type::<ConditionViolation>())?;
    m.add("ParseError", m.py().get_type::<ParseError>())?;
    m.add("CapacityError", m.py().get_type::<CapacityError>())?;
    Ok(())
}
