//! Python bindings for the facial coding schemes and diversity report.

use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use facediv_core::config::{BinConfig, ExtractConfig};
use facediv_core::craniofacial;
use facediv_core::diversity::{self, BinPolicy, EvennessBase};
use facediv_core::features::{Dimension, FeatureTable as CoreTable};
use facediv_core::geometry::{map_keypoints, BBox, FaceRecord, KeypointSet68, Point2};
use facediv_core::manifest::Manifest;
use facediv_core::pipeline;
use facediv_core::preprocess::{quality_filter as core_quality_filter, QualityPolicy, Verdict};

create_exception!(facediv, FacedivError, PyValueError, "Invalid input to a facediv operation.");

fn err(e: facediv_core::Error) -> PyErr {
    FacedivError::new_err(e.to_string())
}

fn evenness(name: &str) -> PyResult<EvennessBase> {
    match name {
        "nominal" => Ok(EvennessBase::Nominal),
        "occupied" => Ok(EvennessBase::Occupied),
        other => Err(FacedivError::new_err(format!("evenness must be 'nominal' or 'occupied', got {other:?}"))),
    }
}

fn keypoints(points: Vec<(f64, f64)>) -> PyResult<KeypointSet68> {
    KeypointSet68::new(points.into_iter().map(|(x, y)| Point2::new(x, y)).collect()).map_err(err)
}

#[pyclass(frozen, get_all, skip_from_py_object, module = "facediv")]
#[derive(Clone)]
struct DiversityScores {
    shannon_h: f64,
    shannon_e: f64,
    simpson_d: f64,
    simpson_e: f64,
    mean: f64,
    variance: f64,
    classes: usize,
}

impl From<diversity::DiversityScores> for DiversityScores {
    fn from(s: diversity::DiversityScores) -> Self {
        Self {
            shannon_h: s.shannon_h,
            shannon_e: s.shannon_e,
            simpson_d: s.simpson_d,
            simpson_e: s.simpson_e,
            mean: s.mean,
            variance: s.variance,
            classes: s.classes,
        }
    }
}

#[pymethods]
impl DiversityScores {
    fn __repr__(&self) -> String {
        format!(
            "DiversityScores(shannon_h={}, shannon_e={}, simpson_d={}, simpson_e={}, mean={}, variance={}, classes={})",
            self.shannon_h, self.shannon_e, self.simpson_d, self.simpson_e, self.mean, self.variance, self.classes
        )
    }
}

#[pyclass(frozen, module = "facediv")]
struct Histogram {
    inner: diversity::Histogram,
}

#[pymethods]
impl Histogram {
    #[new]
    fn new(edges: Vec<f64>, counts: Vec<u64>) -> PyResult<Self> {
        Ok(Self { inner: diversity::Histogram::from_counts(edges, counts).map_err(err)? })
    }

    /// Bins `values` into `bins` equal-width classes, or into the classes
    /// given by `edges`.
    #[staticmethod]
    #[pyo3(signature = (values, bins = 6, edges = None))]
    fn from_values(values: Vec<f64>, bins: usize, edges: Option<Vec<f64>>) -> PyResult<Self> {
        let policy = match edges {
            Some(e) => BinPolicy::FixedEdges(e),
            None => BinPolicy::EqualWidth(bins),
        };
        Ok(Self { inner: diversity::bin_values(&values, &policy).map_err(err)? })
    }

    #[getter]
    fn edges(&self) -> Vec<f64> {
        self.inner.edges.clone()
    }

    #[getter]
    fn counts(&self) -> Vec<u64> {
        self.inner.counts.clone()
    }

    #[getter]
    fn probabilities(&self) -> Vec<f64> {
        self.inner.probabilities.clone()
    }

    fn merge(&self, other: &Histogram) -> PyResult<Histogram> {
        Ok(Histogram { inner: self.inner.merge(&other.inner).map_err(err)? })
    }

    /// Diversity and evenness of the histogram. Mean and variance come from
    /// `raw` when given.
    #[pyo3(signature = (raw = None, evenness = "nominal"))]
    fn scores(&self, raw: Option<Vec<f64>>, evenness: &str) -> PyResult<DiversityScores> {
        let raw = raw.unwrap_or_default();
        Ok(diversity::diversity_scores(&self.inner, &raw, self::evenness(evenness)?).into())
    }

    fn __len__(&self) -> usize {
        self.inner.bins()
    }

    fn __repr__(&self) -> String {
        format!("Histogram(edges={:?}, counts={:?})", self.inner.edges, self.inner.counts)
    }
}

#[pyclass(frozen, module = "facediv")]
struct FeatureTable {
    inner: CoreTable,
}

#[pymethods]
impl FeatureTable {
    /// Reads a feature table written by `extract` (CSV or JSON).
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Self { inner: pipeline::load_features(&path).map_err(err)? })
    }

    #[getter]
    fn columns(&self) -> Vec<&'static str> {
        CoreTable::csv_header()
    }

    #[getter]
    fn face_ids(&self) -> Vec<String> {
        self.inner.rows.iter().map(|r| r.face_id.clone()).collect()
    }

    fn column(&self, key: &str) -> PyResult<Vec<Option<f64>>> {
        let d: Dimension = key.parse().map_err(err)?;
        Ok(self.inner.column(d))
    }

    /// One dict per face, keyed by column name; invalid cells are None.
    fn rows<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.inner
            .rows
            .iter()
            .map(|r| {
                let d = PyDict::new(py);
                d.set_item("face_id", &r.face_id)?;
                for &dim in Dimension::ALL {
                    d.set_item(dim.key(), r.get(dim))?;
                }
                Ok(d)
            })
            .collect()
    }

    fn to_csv(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        self.inner.write_csv(&mut buf).map_err(err)?;
        String::from_utf8(buf).map_err(|e| FacedivError::new_err(e.to_string()))
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(err)
    }

    /// Diversity report. `bins` is an optional TOML binning config.
    #[pyo3(signature = (bins = None))]
    fn report(&self, py: Python<'_>, bins: Option<&str>) -> PyResult<Report> {
        let bins = match bins {
            Some(s) => BinConfig::from_toml_str(s).map_err(err)?,
            None => BinConfig::default(),
        };
        let rep = py.detach(|| pipeline::run_report(&self.inner, &bins)).map_err(err)?;
        Ok(Report { inner: rep })
    }

    fn __len__(&self) -> usize {
        self.inner.rows.len()
    }
}

#[pyclass(frozen, module = "facediv")]
struct Report {
    inner: diversity::DiversityReport,
}

#[pymethods]
impl Report {
    /// One dict per dimension, in canonical order.
    fn rows<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.inner
            .rows
            .iter()
            .map(|r| {
                let d = PyDict::new(py);
                d.set_item("dimension", r.dimension.key())?;
                d.set_item("coding_scheme", &r.coding_scheme)?;
                d.set_item("measurement", &r.measurement)?;
                d.set_item("n", r.n)?;
                d.set_item("excluded", r.excluded)?;
                d.set_item("scores", r.scores.map(DiversityScores::from))?;
                d.set_item("reason", &r.reason)?;
                Ok(d)
            })
            .collect()
    }

    fn histogram(&self, key: &str) -> PyResult<Option<Histogram>> {
        let d: Dimension = key.parse().map_err(err)?;
        Ok(self
            .inner
            .rows
            .iter()
            .find(|r| r.dimension == d)
            .and_then(|r| r.histogram.clone())
            .map(|inner| Histogram { inner }))
    }

    fn to_csv(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        self.inner.write_csv(&mut buf).map_err(err)?;
        String::from_utf8(buf).map_err(|e| FacedivError::new_err(e.to_string()))
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(err)
    }

    fn write(&self, out_dir: PathBuf) -> PyResult<Vec<PathBuf>> {
        pipeline::write_report(&self.inner, &out_dir).map_err(err)
    }
}

/// Runs the quality gate and every extractor over a manifest. Returns the
/// feature table and a list of `(face_id, reason)` rejections.
#[pyfunction]
#[pyo3(signature = (manifest, workers = 1, policy = None, out_dir = None))]
fn extract(
    py: Python<'_>,
    manifest: PathBuf,
    workers: usize,
    policy: Option<&str>,
    out_dir: Option<PathBuf>,
) -> PyResult<(FeatureTable, Vec<(String, String)>)> {
    let cfg = match policy {
        Some(s) => ExtractConfig::from_toml_str(s).map_err(err)?,
        None => ExtractConfig::default(),
    };
    let out = py
        .detach(|| -> facediv_core::Result<_> {
            let m = Manifest::load(&manifest)?;
            let out = pipeline::run_extract(&m, &cfg, workers)?;
            if let Some(dir) = &out_dir {
                pipeline::write_extract(&out, dir)?;
            }
            Ok(out)
        })
        .map_err(err)?;
    let rejections = out.rejections.into_iter().map(|r| (r.face_id, r.reason)).collect();
    Ok((FeatureTable { inner: out.table }, rejections))
}

/// Parses a manifest and returns its record count.
#[pyfunction]
fn validate_manifest(path: PathBuf) -> PyResult<usize> {
    Ok(Manifest::load(&path).map_err(err)?.records.len())
}

#[pyfunction]
fn ita(l: f64, b: f64) -> PyResult<f64> {
    facediv_core::skin::ita(l, b).map_err(err)
}

#[pyfunction]
fn expected_age(softmax: Vec<f64>) -> PyResult<f64> {
    facediv_core::annotation::expected_age(&softmax).map_err(err)
}

/// The 28 craniofacial measures of a 68-point face, keyed by column name.
/// `top_y` is the top edge of the face region.
#[pyfunction]
fn craniofacial_measures<'py>(py: Python<'py>, points: Vec<(f64, f64)>, top_y: f64) -> PyResult<Bound<'py, PyDict>> {
    let lm = map_keypoints(&keypoints(points)?, top_y).map_err(err)?;
    let mut values: Vec<Option<f64>> = craniofacial::distances(&lm).values().into_iter().map(Some).collect();
    values.extend(craniofacial::areas(&lm).values().into_iter().map(Some));
    values.extend(craniofacial::ratios(&lm).values());
    let d = PyDict::new(py);
    for (dim, v) in Dimension::ALL.iter().zip(values) {
        d.set_item(dim.key(), v)?;
    }
    Ok(d)
}

/// Quality gate with the default policy. Returns None when accepted, else
/// the name of the first failing rule.
#[pyfunction]
fn quality_filter(bbox: (f64, f64, f64, f64), points: Vec<(f64, f64)>, pose_class: u8) -> PyResult<Option<String>> {
    let r = FaceRecord {
        face_id: String::new(),
        image_path: String::new(),
        bbox: BBox::new(bbox.0, bbox.1, bbox.2, bbox.3),
        keypoints: keypoints(points)?,
        pose_class,
        mask_path: None,
        aux: None,
    };
    Ok(match core_quality_filter(&r, &QualityPolicy::default()) {
        Verdict::Accept => None,
        Verdict::Reject(why) => Some(why.to_string()),
    })
}

/// `(key, coding scheme, measurement)` for every report dimension.
#[pyfunction]
fn dimensions() -> Vec<(&'static str, &'static str, &'static str)> {
    Dimension::ALL.iter().map(|d| (d.key(), d.coding_scheme(), d.measurement())).collect()
}

#[pyfunction]
fn canonical_keypoints() -> Vec<(f64, f64)> {
    facediv_core::synth::canonical_keypoints().points().iter().map(|p| (p.x, p.y)).collect()
}

#[pymodule]
pub fn facediv(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("FacedivError", m.py().get_type::<FacedivError>())?;
    m.add_class::<DiversityScores>()?;
    m.add_class::<Histogram>()?;
    m.add_class::<FeatureTable>()?;
    m.add_class::<Report>()?;
    m.add_function(wrap_pyfunction!(extract, m)?)?;
    m.add_function(wrap_pyfunction!(validate_manifest, m)?)?;
    m.add_function(wrap_pyfunction!(ita, m)?)?;
    m.add_function(wrap_pyfunction!(expected_age, m)?)?;
    m.add_function(wrap_pyfunction!(craniofacial_measures, m)?)?;
    m.add_function(wrap_pyfunction!(quality_filter, m)?)?;
    m.add_function(wrap_pyfunction!(dimensions, m)?)?;
    m.add_function(wrap_pyfunction!(canonical_keypoints, m)?)?;
    Ok(())
}
