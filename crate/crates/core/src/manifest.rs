//! Line-delimited JSON manifest of detected faces.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::annotation::{AuxAnnotations, Vote};
use crate::error::{Error, Result};
use crate::geometry::{BBox, FaceRecord, KeypointSet68};

/// Softmax given inline or as a path to a JSON array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SoftmaxSource {
    Inline(Vec<f64>),
    Path(String),
}

/// One manifest line as written on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestLine {
    pub face_id: String,
    pub image_path: String,
    pub bbox: BBox,
    pub keypoints: KeypointSet68,
    pub pose_class: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub age_softmax: Option<SoftmaxSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gender_score: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub votes: Option<Vec<Vote>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    /// Directory that relative paths resolve against.
    pub base_dir: PathBuf,
    pub records: Vec<FaceRecord>,
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let p = Path::new(p);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

impl ManifestLine {
    fn into_record(self, base: &Path) -> std::result::Result<FaceRecord, String> {
        let age_softmax = match self.age_softmax {
            None => None,
            Some(SoftmaxSource::Inline(v)) => Some(v),
            Some(SoftmaxSource::Path(p)) => {
                let path = resolve(base, &p);
                let text =
                    std::fs::read_to_string(&path).map_err(|e| format!("age_softmax {}: {e}", path.display()))?;
                Some(serde_json::from_str(&text).map_err(|e| format!("age_softmax {}: {e}", path.display()))?)
            }
        };
        let aux = if age_softmax.is_none() && self.gender_score.is_none() && self.votes.is_none() {
            None
        } else {
            Some(AuxAnnotations { age_softmax, gender_score: self.gender_score, votes: self.votes })
        };
        let r = FaceRecord {
            face_id: self.face_id,
            image_path: self.image_path,
            bbox: self.bbox,
            keypoints: self.keypoints,
            pose_class: self.pose_class,
            mask_path: self.mask_path,
            aux,
        };
        r.validate().map_err(|e| e.to_string())?;
        Ok(r)
    }

    pub fn from_record(r: &FaceRecord) -> Self {
        let aux = r.aux.clone().unwrap_or_default();
        Self {
            face_id: r.face_id.clone(),
            image_path: r.image_path.clone(),
            bbox: r.bbox,
            keypoints: r.keypoints.clone(),
            pose_class: r.pose_class,
            mask_path: r.mask_path.clone(),
            age_softmax: aux.age_softmax.map(SoftmaxSource::Inline),
            gender_score: aux.gender_score,
            votes: aux.votes,
        }
    }
}

impl Manifest {
    /// Parses manifest text. Blank lines are skipped; line numbers in errors
    /// are 1-based.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut records = Vec::new();
        let mut seen = HashSet::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let err = |message: String| Error::ManifestParse { line: line_no, message };
            let raw: ManifestLine = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
            let r = raw.into_record(base_dir).map_err(err)?;
            if !seen.insert(r.face_id.clone()) {
                return Err(err(format!("duplicate face_id {:?}", r.face_id)));
            }
            records.push(r);
        }
        Ok(Self { base_dir: base_dir.to_path_buf(), records })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    pub fn image_path(&self, r: &FaceRecord) -> PathBuf {
        resolve(&self.base_dir, &r.image_path)
    }

    pub fn mask_path(&self, r: &FaceRecord) -> Option<PathBuf> {
        r.mask_path.as_deref().map(|p| resolve(&self.base_dir, p))
    }

    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(&ManifestLine::from_record(r))?);
            out.push('\n');
        }
        Ok(out)
    }
}
