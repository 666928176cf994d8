//! Histogram binning and the Shannon / Simpson diversity and evenness scores.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{BinConfig, ExtractConfig};
use crate::error::{Error, Result};
use crate::features::{format_sig6, Dimension, FeatureTable};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinPolicy {
    /// Explicit ascending boundaries. Values outside fall into the end bins.
    FixedEdges(Vec<f64>),
    /// `B` equal bins over `[min, max]`, top edge inclusive.
    EqualWidth(usize),
}

impl BinPolicy {
    pub fn bin_count(&self) -> usize {
        match self {
            BinPolicy::FixedEdges(e) => e.len().saturating_sub(1),
            BinPolicy::EqualWidth(b) => *b,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            BinPolicy::EqualWidth(0) => Err(Error::InvalidBins("zero bins".into())),
            BinPolicy::EqualWidth(_) => Ok(()),
            BinPolicy::FixedEdges(e) => {
                if e.len() < 2 {
                    return Err(Error::InvalidBins("need at least two edges".into()));
                }
                if e.iter().any(|v| !v.is_finite()) || e.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidBins(format!("edges not strictly ascending: {e:?}")));
                }
                Ok(())
            }
        }
    }
}

/// Which class count `S` the evenness scores divide by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvennessBase {
    /// Total number of bins.
    #[default]
    Nominal,
    /// Number of bins with a non-zero count.
    Occupied,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub probabilities: Vec<f64>,
}

impl Histogram {
    pub fn from_counts(edges: Vec<f64>, counts: Vec<u64>) -> Result<Self> {
        BinPolicy::FixedEdges(edges.clone()).validate()?;
        if counts.len() + 1 != edges.len() {
            return Err(Error::InvalidBins(format!("{} edges for {} counts", edges.len(), counts.len())));
        }
        let total: u64 = counts.iter().sum();
        let probabilities = if total == 0 {
            vec![0.0; counts.len()]
        } else {
            counts.iter().map(|&c| c as f64 / total as f64).collect()
        };
        Ok(Self { edges, counts, probabilities })
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn occupied(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// Bin-wise sum of two histograms over the same edges.
    pub fn merge(&self, other: &Histogram) -> Result<Histogram> {
        if self.edges != other.edges {
            return Err(Error::InvalidBins("cannot merge histograms with different edges".into()));
        }
        let counts = self.counts.iter().zip(&other.counts).map(|(a, b)| a + b).collect();
        Histogram::from_counts(self.edges.clone(), counts)
    }
}

fn equal_width_edges(values: &[f64], bins: usize) -> Vec<f64> {
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let width = if max > min { (max - min) / bins as f64 } else { 1.0 };
    let mut edges: Vec<f64> = (0..=bins).map(|i| min + width * i as f64).collect();
    if max > min {
        edges[bins] = max;
    }
    edges
}

pub fn bin_values(values: &[f64], policy: &BinPolicy) -> Result<Histogram> {
    policy.validate()?;
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let edges = match policy {
        BinPolicy::FixedEdges(e) => e.clone(),
        BinPolicy::EqualWidth(b) => equal_width_edges(values, *b),
    };
    let b = edges.len() - 1;
    let interior = &edges[1..b];
    let mut counts = vec![0u64; b];
    for &v in values {
        counts[interior.partition_point(|&e| e <= v)] += 1;
    }
    Histogram::from_counts(edges, counts)
}

/// `-sum p ln p` with `0 ln 0 = 0`.
pub fn shannon_h(p: &[f64]) -> f64 {
    -p.iter().filter(|&&v| v > 0.0).map(|&v| v * v.ln()).sum::<f64>()
}

/// `1 / sum p^2` over non-zero bins.
pub fn simpson_d(p: &[f64]) -> f64 {
    1.0 / p.iter().filter(|&&v| v > 0.0).map(|&v| v * v).sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiversityScores {
    pub shannon_h: f64,
    pub shannon_e: f64,
    pub simpson_d: f64,
    pub simpson_e: f64,
    pub mean: f64,
    /// Population variance.
    pub variance: f64,
    pub classes: usize,
}

pub fn mean_variance(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var)
}

/// Scores for a histogram with at least one count. Mean and variance come
/// from the raw values.
pub fn diversity_scores(h: &Histogram, raw: &[f64], base: EvennessBase) -> DiversityScores {
    let s = match base {
        EvennessBase::Nominal => h.bins(),
        EvennessBase::Occupied => h.occupied(),
    };
    let shannon_h = shannon_h(&h.probabilities);
    let simpson_d = simpson_d(&h.probabilities);
    // a single class is trivially even
    let shannon_e = if s > 1 { shannon_h / (s as f64).ln() } else { 1.0 };
    let (mean, variance) = mean_variance(raw);
    DiversityScores { shannon_h, shannon_e, simpson_d, simpson_e: simpson_d / s as f64, mean, variance, classes: s }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub dimension: Dimension,
    pub coding_scheme: String,
    pub measurement: String,
    /// Valid values that entered the histogram.
    pub n: usize,
    /// Faces whose value was missing or invalid.
    pub excluded: usize,
    pub policy: BinPolicy,
    pub scores: Option<DiversityScores>,
    #[serde(skip)]
    pub histogram: Option<Histogram>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityReport {
    pub version: u32,
    pub faces: usize,
    pub bins: BinConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extract_config: Option<ExtractConfig>,
    pub rows: Vec<ReportRow>,
}

pub const REPORT_VERSION: u32 = 1;

pub fn summarize(d: Dimension, column: &[Option<f64>], policy: BinPolicy, base: EvennessBase) -> ReportRow {
    let values: Vec<f64> = column.iter().flatten().copied().collect();
    let mut row = ReportRow {
        dimension: d,
        coding_scheme: d.coding_scheme().into(),
        measurement: d.measurement().into(),
        n: values.len(),
        excluded: column.len() - values.len(),
        policy,
        scores: None,
        histogram: None,
        reason: None,
    };
    match bin_values(&values, &row.policy) {
        Ok(h) => {
            row.scores = Some(diversity_scores(&h, &values, base));
            row.histogram = Some(h);
        }
        Err(e) => row.reason = Some(e.to_string()),
    }
    row
}

/// One row per canonical dimension, in canonical order.
pub fn report(table: &FeatureTable, bins: &BinConfig) -> Result<DiversityReport> {
    if table.rows.is_empty() {
        return Err(Error::EmptyTable);
    }
    bins.validate()?;
    let rows =
        Dimension::ALL.par_iter().map(|&d| summarize(d, &table.column(d), bins.policy_for(d), bins.evenness)).collect();
    Ok(DiversityReport {
        version: REPORT_VERSION,
        faces: table.rows.len(),
        bins: bins.clone(),
        extract_config: table.config.clone(),
        rows,
    })
}

pub const REPORT_HEADER: [&str; 10] = [
    "Coding Scheme",
    "Measurement",
    "Simpson D",
    "Simpson E",
    "Shannon H",
    "Shannon E",
    "Mean",
    "Var",
    "N",
    "Excluded",
];

impl DiversityReport {
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
        out.write_record(REPORT_HEADER).map_err(csv_err)?;
        for r in &self.rows {
            let nums = match &r.scores {
                Some(s) => [s.simpson_d, s.simpson_e, s.shannon_h, s.shannon_e, s.mean, s.variance].map(format_sig6),
                None => Default::default(),
            };
            let mut rec = vec![r.coding_scheme.clone(), r.measurement.clone()];
            rec.extend(nums);
            rec.push(r.n.to_string());
            rec.push(r.excluded.to_string());
            out.write_record(&rec).map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
