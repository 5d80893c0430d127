//! Python bindings: load scenarios, run them, and poke the trust model.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use sentinet::attacks::{taxonomy_of, AttackKind};
use sentinet::flows::{FeatureVector, FlowKey};
use sentinet::packet::Proto;
use sentinet::topology::NodeId;
use sentinet::trust::{TrustModel, TrustParams};
use sentinet::{run_scenario, RunOptions, Scenario};

/// A parsed and validated scenario file.
#[pyclass(name = "Scenario")]
struct PyScenario {
    inner: Scenario,
}

#[pymethods]
impl PyScenario {
    /// Loads and validates a scenario from a TOML file.
    #[staticmethod]
    fn load(path: &str) -> PyResult<PyScenario> {
        let inner = Scenario::load(std::path::Path::new(path))
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyScenario { inner })
    }

    /// Parses a scenario from TOML text.
    #[staticmethod]
    #[pyo3(signature = (text, name = "scenario"))]
    fn from_toml(text: &str, name: &str) -> PyResult<PyScenario> {
        let inner = Scenario::from_toml_str(text, name)
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyScenario { inner })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn duration(&self) -> f64 {
        self.inner.duration
    }

    #[getter]
    fn node_names(&self) -> Vec<String> {
        self.inner
            .topology
            .nodes
            .iter()
            .map(|n| n.name.clone())
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Scenario(name={:?}, nodes={}, attacks={})",
            self.inner.name,
            self.inner.topology.nodes.len(),
            self.inner.attacks.len()
        )
    }

    /// Runs the scenario and returns the result. `seed` falls back to the
    /// scenario's own seed, then 42.
    #[pyo3(signature = (seed = None, strip_tags = false))]
    fn run(&self, seed: Option<u64>, strip_tags: bool) -> PyResult<PyRunResult> {
        let out = run_scenario(&self.inner, &RunOptions { seed, strip_tags });
        if !out.stats.conservation_holds() {
            return Err(PyRuntimeError::new_err("packet accounting out of balance"));
        }
        Ok(PyRunResult {
            report_json: out.report.to_json(),
            csv: out.report.to_csv(),
            log_text: out.log.render(),
            log_hash: out.log.hash(),
            injected: out.stats.injected,
            delivered: out.stats.delivered,
            queue_dropped: out.stats.queue_dropped,
            filter_dropped: out.stats.filter_dropped,
            in_flight: out.stats.in_flight,
        })
    }
}

/// Outcome of one run: the report, the event log, and packet accounting.
#[pyclass(name = "RunResult")]
struct PyRunResult {
    report_json: String,
    csv: String,
    log_text: String,
    #[pyo3(get)]
    log_hash: String,
    #[pyo3(get)]
    injected: u64,
    #[pyo3(get)]
    delivered: u64,
    #[pyo3(get)]
    queue_dropped: u64,
    #[pyo3(get)]
    filter_dropped: u64,
    #[pyo3(get)]
    in_flight: u64,
}

#[pymethods]
impl PyRunResult {
    /// The metrics report as a dict.
    fn report<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let json = py.import("json")?;
        json.call_method1("loads", (self.report_json.as_str(),))
    }

    fn report_csv(&self) -> &str {
        &self.csv
    }

    fn log_lines(&self) -> Vec<String> {
        self.log_text.lines().map(str::to_string).collect()
    }

    fn conservation_holds(&self) -> bool {
        self.injected
            == self.delivered + self.queue_dropped + self.filter_dropped + self.in_flight
    }

    fn __repr__(&self) -> String {
        format!(
            "RunResult(injected={}, delivered={}, hash={})",
            self.injected,
            self.delivered,
            &self.log_hash[..12]
        )
    }
}

fn parse_proto(s: &str) -> PyResult<Proto> {
    match s {
        "udp" => Ok(Proto::Udp),
        "icmp" => Ok(Proto::Icmp),
        "tcp_like" => Ok(Proto::TcpLike),
        other => Err(PyValueError::new_err(format!("unknown protocol {other:?}"))),
    }
}

/// Standalone trust model, for experimenting with clustering and feedback.
#[pyclass(name = "TrustModel")]
struct PyTrustModel {
    inner: TrustModel,
}

#[pymethods]
impl PyTrustModel {
    #[new]
    #[pyo3(signature = (tau = 0.5, eta = 0.05, alpha = 0.1, theta_mal = 0.3, theta_ben = 0.7, prior = 0.5))]
    fn new(tau: f64, eta: f64, alpha: f64, theta_mal: f64, theta_ben: f64, prior: f64) -> Self {
        PyTrustModel {
            inner: TrustModel::new(TrustParams {
                tau,
                eta,
                alpha,
                theta_mal,
                theta_ben,
                prior,
                ..TrustParams::default()
            }),
        }
    }

    /// Feeds one flow window in; returns the cluster id it attached to.
    fn observe(&mut self, features: [f64; 4], src: u32, dst: u32, proto: &str, now: f64) -> PyResult<u32> {
        let key = FlowKey {
            src: NodeId(src),
            dst: NodeId(dst),
            proto: parse_proto(proto)?,
        };
        Ok(self.inner.observe(&FeatureVector(features), key, now).cluster)
    }

    /// Applies one feedback observation in [0, 1] to a cluster.
    fn update_trust(&mut self, cluster: u32, o: f64) -> PyResult<f64> {
        self.inner
            .update_trust(cluster, o)
            .map(|u| u.trust_after)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    /// `malicious`, `unknown`, or `benign`.
    fn classify(&self, cluster: u32) -> PyResult<String> {
        self.inner
            .classify(cluster)
            .map(|c| c.to_string())
            .ok_or_else(|| PyValueError::new_err(format!("unknown cluster {cluster}")))
    }

    fn clusters<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        let list = PyList::empty(py);
        for c in self.inner.clusters() {
            let d = PyDict::new(py);
            d.set_item("id", c.id)?;
            d.set_item("centroid", c.centroid.0)?;
            d.set_item("trust", c.trust)?;
            d.set_item("weight", c.weight)?;
            d.set_item("shadow", c.shadow)?;
            list.append(d)?;
        }
        Ok(list)
    }
}

/// Feature vector for one flow window, as computed by the sensors.
#[pyfunction]
fn extract_features(
    pkt_count: u64,
    byte_sum: u64,
    sub_counts: [u64; 10],
    window_len: f64,
    dst_fanin: usize,
) -> PyResult<[f64; 4]> {
    if pkt_count == 0 {
        return Err(PyValueError::new_err("feature extraction needs packets"));
    }
    let stats = sentinet::flows::WindowStats {
        pkt_count,
        byte_sum,
        sub_counts,
        last_active: 0.0,
    };
    Ok(sentinet::flows::extract_features(&stats, window_len, dst_fanin).0)
}

/// Supported attack kinds with their classification axes.
#[pyfunction]
fn list_attacks(py: Python<'_>) -> PyResult<Bound<'_, PyList>> {
    let list = PyList::empty(py);
    for kind in AttackKind::ALL {
        let t = taxonomy_of(kind);
        let d = PyDict::new(py);
        d.set_item("kind", kind.to_string())?;
        d.set_item("dispersion", t.dispersion.to_string())?;
        d.set_item("target", t.target.to_string())?;
        d.set_item("scheme", t.scheme.to_string())?;
        d.set_item("impact", t.impact.to_string())?;
        list.append(d)?;
    }
    Ok(list)
}

#[pymodule]
pub fn sentinet_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScenario>()?;
    m.add_class::<PyRunResult>()?;
    m.add_class::<PyTrustModel>()?;
    m.add_function(wrap_pyfunction!(extract_features, m)?)?;
    m.add_function(wrap_pyfunction!(list_attacks, m)?)?;
    Ok(())
}
