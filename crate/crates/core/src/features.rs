//! The canonical feature dimensions and the per-face feature table.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::ExtractConfig;
use crate::error::{Error, Result};

pub const FEATURE_TABLE_VERSION: u32 = 1;

macro_rules! dimensions {
    ($($variant:ident => ($key:literal, $scheme:literal, $label:literal),)*) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum Dimension {
            $($variant,)*
        }

        impl Dimension {
            pub const ALL: &'static [Dimension] = &[$(Dimension::$variant,)*];

            /// Column name in feature tables.
            pub fn key(self) -> &'static str {
                match self {
                    $(Dimension::$variant => $key,)*
                }
            }

            pub fn coding_scheme(self) -> &'static str {
                match self {
                    $(Dimension::$variant => $scheme,)*
                }
            }

            /// Row label in the diversity report.
            pub fn measurement(self) -> &'static str {
                match self {
                    $(Dimension::$variant => $label,)*
                }
            }
        }
    };
}

dimensions! {
    NSto => ("n_sto", "Craniofacial Distance", "n-sto"),
    PsPi => ("ps_pi", "Craniofacial Distance", "ps-pi"),
    OrPi => ("or_pi", "Craniofacial Distance", "or-pi"),
    SnCprime => ("sn_cprime", "Craniofacial Distance", "sn-c'"),
    SnSto => ("sn_sto", "Craniofacial Distance", "sn-sto"),
    StoLi => ("sto_li", "Craniofacial Distance", "sto-li"),
    CphCph => ("cph_cph", "Craniofacial Distance", "cph-cph"),
    SbalLs => ("sbal_ls", "Craniofacial Distance", "sbal-ls"),
    TnN => ("tn_n", "Craniofacial Area", "tn-n"),
    TnGn => ("tn_gn", "Craniofacial Area", "tn-gn"),
    NGn => ("n_gn", "Craniofacial Area", "n-gn"),
    SnGn => ("sn_gn", "Craniofacial Area", "sn-gn"),
    ZyZy => ("zy_zy", "Craniofacial Area", "zy-zy"),
    GoGo => ("go_go", "Craniofacial Area", "go-go"),
    EnEn => ("en_en", "Craniofacial Area", "en-en"),
    EnEx => ("en_ex", "Craniofacial Area", "en-ex"),
    ExEx => ("ex_ex", "Craniofacial Area", "ex-ex"),
    NSn => ("n_sn", "Craniofacial Area", "n-sn"),
    AlAl => ("al_al", "Craniofacial Area", "al-al"),
    ChCh => ("ch_ch", "Craniofacial Area", "ch-ch"),
    FacialIndex => ("facial_index", "Craniofacial Ratio", "(n-gn)/(zy-zy)"),
    MandibularIndex => ("mandibular_index", "Craniofacial Ratio", "(sto-gn)/(go-go)"),
    IntercanthalIndex => ("intercanthal_index", "Craniofacial Ratio", "(en-en)/(ex-ex)"),
    OrbitalWidthIndex => ("orbital_width_index", "Craniofacial Ratio", "(ex-en)/(en-en)"),
    EyeFissureIndex => ("eye_fissure_index", "Craniofacial Ratio", "(ps-pi)/(ex-en)"),
    NasalIndex => ("nasal_index", "Craniofacial Ratio", "(al-al)/(n-sn)"),
    VermilionHeightIndex => ("vermilion_height_index", "Craniofacial Ratio", "(ls-sto)/(sto-li)"),
    MouthFaceWidthIndex => ("mouth_face_width_index", "Craniofacial Ratio", "(ch-ch)/(zy-zy)"),
    DensityDifference => ("density_difference", "Facial Symmetry", "Density difference"),
    EdgeOrientationSimilarity => ("edge_orientation_similarity", "Facial Symmetry", "Edge or. similarity"),
    LipsL => ("lips_l_contrast", "Facial Contrast", "Lips L contrast"),
    LipsA => ("lips_a_contrast", "Facial Contrast", "Lips a contrast"),
    LipsB => ("lips_b_contrast", "Facial Contrast", "Lips b contrast"),
    EyesL => ("eyes_l_contrast", "Facial Contrast", "Eyes L contrast"),
    EyesA => ("eyes_a_contrast", "Facial Contrast", "Eyes a contrast"),
    EyesB => ("eyes_b_contrast", "Facial Contrast", "Eyes b contrast"),
    EyebrowsL => ("eyebrows_l_contrast", "Facial Contrast", "Eb L contrast"),
    EyebrowsA => ("eyebrows_a_contrast", "Facial Contrast", "Eb a contrast"),
    EyebrowsB => ("eyebrows_b_contrast", "Facial Contrast", "Eb b contrast"),
    Ita => ("ita", "Skin Color", "ITA"),
    AgePred => ("age_pred", "Age", "Age prediction"),
    GenderPred => ("gender_pred", "Gender", "Gender prediction"),
    GenderLabel => ("gender_label", "Subjective Annotation", "Gender labeling"),
    AgeLabel => ("age_label", "Subjective Annotation", "Age labeling"),
    PoseSigned => ("pose_signed", "Pose & Resolution", "Pose"),
    Iod => ("iod", "Pose & Resolution", "IOD"),
    BoxSize => ("box_size", "Pose & Resolution", "Face Region Size"),
}

impl Dimension {
    pub fn index(self) -> usize {
        self as usize
    }
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Dimension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Dimension::ALL
            .iter()
            .copied()
            .find(|d| d.key() == s)
            .ok_or_else(|| Error::FeatureParse(format!("unknown dimension {s:?}")))
    }
}

impl Serialize for Dimension {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.key())
    }
}

impl<'de> Deserialize<'de> for Dimension {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub face_id: String,
    /// One cell per entry of [`Dimension::ALL`]; `None` marks an invalid cell.
    pub values: Vec<Option<f64>>,
    /// Why a cell is invalid, keyed by dimension.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub invalid: BTreeMap<Dimension, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl FeatureRow {
    pub fn new(face_id: impl Into<String>) -> Self {
        Self {
            face_id: face_id.into(),
            values: vec![None; Dimension::ALL.len()],
            invalid: BTreeMap::new(),
            flags: Vec::new(),
        }
    }

    pub fn get(&self, d: Dimension) -> Option<f64> {
        self.values[d.index()]
    }

    pub fn set(&mut self, d: Dimension, v: f64) {
        if v.is_finite() {
            self.values[d.index()] = Some(v);
            self.invalid.remove(&d);
        } else {
            self.invalidate(d, "non-finite value");
        }
    }

    pub fn set_opt(&mut self, d: Dimension, v: Option<f64>, reason: &str) {
        match v {
            Some(v) => self.set(d, v),
            None => self.invalidate(d, reason),
        }
    }

    pub fn invalidate(&mut self, d: Dimension, reason: impl Into<String>) {
        self.values[d.index()] = None;
        self.invalid.insert(d, reason.into());
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureTable {
    pub rows: Vec<FeatureRow>,
    /// Extraction settings, carried through to the report when known.
    pub config: Option<ExtractConfig>,
}

#[derive(Serialize, Deserialize)]
struct TableDocument {
    version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    config: Option<ExtractConfig>,
    columns: Vec<Dimension>,
    rows: Vec<FeatureRow>,
}

/// Decimal with six significant digits, scientific outside `1e-4..1e6`.
pub fn format_sig6(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.5e}");
    let exp: i32 = sci.split_once('e').map_or(0, |(_, e)| e.parse().unwrap_or(0));
    if (-4..6).contains(&exp) {
        format!("{:.*}", (5 - exp) as usize, v)
    } else {
        sci
    }
}

impl FeatureTable {
    pub fn column(&self, d: Dimension) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r.get(d)).collect()
    }

    pub fn csv_header() -> Vec<&'static str> {
        std::iter::once("face_id").chain(Dimension::ALL.iter().map(|d| d.key())).collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(Self::csv_header()).map_err(csv_err)?;
        for r in &self.rows {
            let cells = std::iter::once(r.face_id.clone())
                .chain(r.values.iter().map(|v| v.map(format_sig6).unwrap_or_default()));
            out.write_record(cells).map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let header: Vec<String> = rd.headers().map_err(csv_err)?.iter().map(String::from).collect();
        if header != Self::csv_header() {
            return Err(Error::FeatureParse("unexpected feature table header".into()));
        }
        let mut rows = Vec::new();
        for (i, rec) in rd.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let mut row = FeatureRow::new(&rec[0]);
            for (d, cell) in Dimension::ALL.iter().zip(rec.iter().skip(1)) {
                if cell.is_empty() {
                    row.invalidate(*d, "missing");
                } else {
                    let v: f64 = cell
                        .parse()
                        .map_err(|_| Error::FeatureParse(format!("row {}: bad number {cell:?} in {d}", i + 1)))?;
                    row.set(*d, v);
                }
            }
            rows.push(row);
        }
        Ok(Self { rows, config: None })
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = TableDocument {
            version: FEATURE_TABLE_VERSION,
            config: self.config.clone(),
            columns: Dimension::ALL.to_vec(),
            rows: self.rows.clone(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: TableDocument = serde_json::from_str(s)?;
        if doc.version != FEATURE_TABLE_VERSION {
            return Err(Error::FeatureParse(format!("unsupported version {}", doc.version)));
        }
        if doc.columns != Dimension::ALL {
            return Err(Error::FeatureParse("unexpected feature table columns".into()));
        }
        if let Some(r) = doc.rows.iter().find(|r| r.values.len() != Dimension::ALL.len()) {
            return Err(Error::FeatureParse(format!("row {} has {} values", r.face_id, r.values.len())));
        }
        Ok(Self { rows: doc.rows, config: doc.config })
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::FeatureParse(e.to_string())
}
