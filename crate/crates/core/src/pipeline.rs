//! Dataset-level orchestration: manifest in, feature table and diversity
//! report out.

use std::fs;
use std::path::{Path, PathBuf};

use image::RgbImage;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::annotation::{expected_age, weighted_vote};
use crate::color::LabImage;
use crate::config::{BinConfig, ExtractConfig};
use crate::contrast::contrast_vector;
use crate::craniofacial::{areas, distances, ratios};
use crate::diversity::{report, DiversityReport};
use crate::error::{Error, Result};
use crate::features::{Dimension, FeatureRow, FeatureTable};
use crate::geometry::{map_keypoints, FaceRecord, Point2};
use crate::manifest::Manifest;
use crate::pose::pose_resolution;
use crate::preprocess::{quality_filter, rectify, Verdict};
use crate::raster::{warp_mask, Mask};
use crate::skin::face_ita;
use crate::symmetry::{rectify_for_symmetry, symmetry_scores};

const DISTANCE_DIMS: [Dimension; 8] = [
    Dimension::NSto,
    Dimension::PsPi,
    Dimension::OrPi,
    Dimension::SnCprime,
    Dimension::SnSto,
    Dimension::StoLi,
    Dimension::CphCph,
    Dimension::SbalLs,
];

const AREA_DIMS: [Dimension; 12] = [
    Dimension::TnN,
    Dimension::TnGn,
    Dimension::NGn,
    Dimension::SnGn,
    Dimension::ZyZy,
    Dimension::GoGo,
    Dimension::EnEn,
    Dimension::EnEx,
    Dimension::ExEx,
    Dimension::NSn,
    Dimension::AlAl,
    Dimension::ChCh,
];

const RATIO_DIMS: [Dimension; 8] = [
    Dimension::FacialIndex,
    Dimension::MandibularIndex,
    Dimension::IntercanthalIndex,
    Dimension::OrbitalWidthIndex,
    Dimension::EyeFissureIndex,
    Dimension::NasalIndex,
    Dimension::VermilionHeightIndex,
    Dimension::MouthFaceWidthIndex,
];

const CONTRAST_DIMS: [Dimension; 9] = [
    Dimension::LipsL,
    Dimension::LipsA,
    Dimension::LipsB,
    Dimension::EyesL,
    Dimension::EyesA,
    Dimension::EyesB,
    Dimension::EyebrowsL,
    Dimension::EyebrowsA,
    Dimension::EyebrowsB,
];

/// Inputs to feature extraction for one accepted face.
pub struct FaceInput<'a> {
    pub record: &'a FaceRecord,
    pub image: &'a RgbImage,
    /// Skin mask aligned with `image`.
    pub mask: Option<&'a Mask>,
}

fn invalidate_all(row: &mut FeatureRow, dims: &[Dimension], reason: &str) {
    for &d in dims {
        row.invalidate(d, reason);
    }
}

/// Runs every extractor on one face. Extractor failures invalidate cells,
/// never the row.
pub fn extract_features(input: &FaceInput<'_>, cfg: &ExtractConfig) -> FeatureRow {
    let r = input.record;
    let mut row = FeatureRow::new(r.face_id.clone());

    match pose_resolution(r) {
        Ok(p) => {
            row.set(Dimension::PoseSigned, p.pose_signed as f64);
            row.set(Dimension::Iod, p.iod);
            row.set(Dimension::BoxSize, p.box_size);
        }
        Err(e) => {
            row.invalidate(Dimension::PoseSigned, e.to_string());
            row.set(Dimension::Iod, crate::preprocess::inter_ocular_distance(&r.keypoints));
            row.set(Dimension::BoxSize, (r.bbox.width * r.bbox.height).sqrt());
        }
    }

    let geometric: Vec<Dimension> = DISTANCE_DIMS
        .iter()
        .chain(&AREA_DIMS)
        .chain(&RATIO_DIMS)
        .chain(&CONTRAST_DIMS)
        .chain(&[Dimension::Ita])
        .copied()
        .collect();
    match rectify(input.image, &r.keypoints, &cfg.rectify) {
        Err(e) => invalidate_all(&mut row, &geometric, &format!("rectification: {e}")),
        Ok(rf) => {
            let top = rf.transform.apply(Point2::new(r.bbox.center().x, r.bbox.y)).y;
            match map_keypoints(&rf.keypoints, top) {
                Ok(lm) => {
                    for (d, v) in DISTANCE_DIMS.iter().zip(distances(&lm).values()) {
                        row.set(*d, v);
                    }
                    for (d, v) in AREA_DIMS.iter().zip(areas(&lm).values()) {
                        row.set(*d, v);
                    }
                    for (d, v) in RATIO_DIMS.iter().zip(ratios(&lm).values()) {
                        row.set_opt(*d, v, "denominator below 1e-6 px");
                    }
                }
                Err(e) => {
                    let msg = e.to_string();
                    invalidate_all(&mut row, &DISTANCE_DIMS, &msg);
                    invalidate_all(&mut row, &AREA_DIMS, &msg);
                    invalidate_all(&mut row, &RATIO_DIMS, &msg);
                }
            }

            let lab = LabImage::from_rgb(&rf.image);
            let c = contrast_vector(&lab, &rf.keypoints, &cfg.contrast);
            for (d, v) in CONTRAST_DIMS.iter().zip(c.values()) {
                row.set_opt(*d, v, "contrast undefined");
            }

            let mask =
                input.mask.map(|m| warp_mask(m, &rf.transform, rf.image.width() as usize, rf.image.height() as usize));
            match face_ita(&lab, &rf.keypoints, mask.as_ref(), top, &cfg.ita) {
                Ok(ita) => row.set(Dimension::Ita, ita.face_ita),
                Err(e) => row.invalidate(Dimension::Ita, e.to_string()),
            }
        }
    }

    match rectify_for_symmetry(input.image, &r.keypoints, &cfg.symmetry_anchors) {
        Ok(sf) => {
            let s = symmetry_scores(&sf.gray, &cfg.symmetry);
            row.set(Dimension::DensityDifference, s.density_difference);
            row.set_opt(Dimension::EdgeOrientationSimilarity, s.edge_orientation_similarity, "no edges");
        }
        Err(e) => {
            let msg = format!("symmetry normalization: {e}");
            row.invalidate(Dimension::DensityDifference, msg.clone());
            row.invalidate(Dimension::EdgeOrientationSimilarity, msg);
        }
    }

    let aux = r.aux.clone().unwrap_or_default();
    match aux.age_softmax.as_deref().map(expected_age) {
        Some(Ok(a)) => row.set(Dimension::AgePred, a),
        Some(Err(e)) => row.invalidate(Dimension::AgePred, e.to_string()),
        None => row.invalidate(Dimension::AgePred, "not provided"),
    }
    row.set_opt(Dimension::GenderPred, aux.gender_score, "not provided");
    match aux.votes.as_deref().map(weighted_vote) {
        Some(Ok(v)) => {
            row.set(Dimension::GenderLabel, v.gender_label.code());
            row.set(Dimension::AgeLabel, v.age_value);
            if v.gender_tie {
                row.flags.push("gender_tie".into());
            }
            if v.age_group_tie {
                row.flags.push("age_group_tie".into());
            }
            if !v.age_consistent {
                row.flags.push("age_group_mismatch".into());
            }
        }
        Some(Err(e)) => {
            row.invalidate(Dimension::GenderLabel, e.to_string());
            row.invalidate(Dimension::AgeLabel, e.to_string());
        }
        None => {
            row.invalidate(Dimension::GenderLabel, "not provided");
            row.invalidate(Dimension::AgeLabel, "not provided");
        }
    }
    row
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub face_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractOutput {
    pub table: FeatureTable,
    pub rejections: Vec<Rejection>,
}

impl ExtractOutput {
    pub fn is_partial(&self) -> bool {
        !self.rejections.is_empty()
    }
}

enum Outcome {
    Row(FeatureRow),
    Rejected(Rejection),
}

fn load_mask(path: &Path) -> std::result::Result<Mask, String> {
    let img = image::open(path).map_err(|e| format!("mask {}: {e}", path.display()))?.to_luma8();
    let mut m = Mask::new(img.width() as usize, img.height() as usize, false);
    for (x, y, p) in img.enumerate_pixels() {
        m.set(x as usize, y as usize, p.0[0] > 0);
    }
    Ok(m)
}

fn process(manifest: &Manifest, r: &FaceRecord, cfg: &ExtractConfig) -> Outcome {
    let reject = |reason: String| Outcome::Rejected(Rejection { face_id: r.face_id.clone(), reason });
    if let Verdict::Reject(why) = quality_filter(r, &cfg.quality) {
        return reject(why.to_string());
    }
    let path = manifest.image_path(r);
    let image = match image::open(&path) {
        Ok(img) => img.to_rgb8(),
        Err(e) => return reject(Error::ImageRead { path, message: e.to_string() }.to_string()),
    };
    let mask = manifest.mask_path(r).map(|p| load_mask(&p));
    let mask = match mask {
        Some(Ok(m)) if (m.width(), m.height()) == (image.width() as usize, image.height() as usize) => Some(m),
        Some(Ok(_)) => return reject("mask size differs from image".into()),
        Some(Err(e)) => return reject(e),
        None => None,
    };
    Outcome::Row(extract_features(&FaceInput { record: r, image: &image, mask: mask.as_ref() }, cfg))
}

/// Quality gate and extraction for every record. Output order follows the
/// manifest for any worker count.
pub fn run_extract(manifest: &Manifest, cfg: &ExtractConfig, workers: usize) -> Result<ExtractOutput> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let outcomes: Vec<Outcome> =
        pool.install(|| manifest.records.par_iter().map(|r| process(manifest, r, cfg)).collect());
    let mut table = FeatureTable { rows: Vec::new(), config: Some(cfg.clone()) };
    let mut rejections = Vec::new();
    for o in outcomes {
        match o {
            Outcome::Row(r) => table.rows.push(r),
            Outcome::Rejected(r) => rejections.push(r),
        }
    }
    Ok(ExtractOutput { table, rejections })
}

pub const FEATURES_CSV: &str = "features.csv";
pub const FEATURES_JSON: &str = "features.json";
pub const REJECTIONS_CSV: &str = "rejections.csv";
pub const REPORT_CSV: &str = "report.csv";
pub const REPORT_JSON: &str = "report.json";
pub const HISTOGRAM_DIR: &str = "histograms";

pub fn write_extract(out: &ExtractOutput, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut csv_buf = Vec::new();
    out.table.write_csv(&mut csv_buf)?;
    fs::write(dir.join(FEATURES_CSV), csv_buf)?;
    fs::write(dir.join(FEATURES_JSON), out.table.to_json()? + "\n")?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &out.rejections {
        w.serialize(r).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    if out.rejections.is_empty() {
        w.write_record(["face_id", "reason"]).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    fs::write(dir.join(REJECTIONS_CSV), bytes)?;
    Ok(())
}

/// Loads a feature table from its CSV or JSON form, chosen by extension.
pub fn load_features(path: &Path) -> Result<FeatureTable> {
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        FeatureTable::from_json(&fs::read_to_string(path)?)
    } else {
        FeatureTable::read_csv(fs::File::open(path)?)
    }
}

pub fn run_report(table: &FeatureTable, bins: &BinConfig) -> Result<DiversityReport> {
    report(table, bins)
}

#[derive(Serialize)]
struct HistogramFile<'a> {
    dimension: Dimension,
    coding_scheme: &'a str,
    measurement: &'a str,
    edges: &'a [f64],
    counts: &'a [u64],
    probabilities: &'a [f64],
}

/// Writes the report CSV and JSON plus one histogram file per dimension.
pub fn write_report(rep: &DiversityReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let hist_dir = dir.join(HISTOGRAM_DIR);
    fs::create_dir_all(&hist_dir)?;
    let mut buf = Vec::new();
    rep.write_csv(&mut buf)?;
    fs::write(dir.join(REPORT_CSV), buf)?;
    fs::write(dir.join(REPORT_JSON), rep.to_json()? + "\n")?;
    let mut written = vec![dir.join(REPORT_CSV), dir.join(REPORT_JSON)];
    for row in &rep.rows {
        let Some(h) = &row.histogram else { continue };
        let file = HistogramFile {
            dimension: row.dimension,
            coding_scheme: &row.coding_scheme,
            measurement: &row.measurement,
            edges: &h.edges,
            counts: &h.counts,
            probabilities: &h.probabilities,
        };
        let path = hist_dir.join(format!("{}.json", row.dimension.key()));
        fs::write(&path, serde_json::to_string_pretty(&file)? + "\n")?;
        written.push(path);
    }
    Ok(written)
}
