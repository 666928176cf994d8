//! Facial-region contrast for lips, eyes and eyebrows in each CIE-Lab channel.
//!
//! Channels are shifted to non-negative intensities before use: `L` is
//! rescaled from `[0, 100]` to `[0, 255]`, `a` and `b` are offset by +128.
//! The outer region is the annulus between the part polygon and the same
//! polygon scaled 1.5x about its vertex centroid.

use serde::{Deserialize, Serialize};

use crate::color::LabImage;
use crate::error::{Error, Result};
use crate::geometry::{KeypointSet68, Point2, Side};
use crate::raster::{polygon_area, rasterize_polygon, scale_polygon, Mask, Plane};

const MIN_POLYGON_AREA: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FacialPart {
    Lips,
    Eyes,
    Eyebrows,
}

impl FacialPart {
    pub const ALL: [FacialPart; 3] = [FacialPart::Lips, FacialPart::Eyes, FacialPart::Eyebrows];

    pub fn name(self) -> &'static str {
        match self {
            FacialPart::Lips => "lips",
            FacialPart::Eyes => "eyes",
            FacialPart::Eyebrows => "eyebrows",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LabChannel {
    L,
    A,
    B,
}

impl LabChannel {
    pub const ALL: [LabChannel; 3] = [LabChannel::L, LabChannel::A, LabChannel::B];

    /// Non-negative encoding of the channel.
    pub fn encode(self, lab: &LabImage) -> Plane {
        match self {
            LabChannel::L => lab.l.map(|v| v * 255.0 / 100.0),
            LabChannel::A => lab.a.map(|v| v + 128.0),
            LabChannel::B => lab.b.map(|v| v + 128.0),
        }
    }
}

/// How region intensities are aggregated before forming the contrast ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContrastForm {
    /// Mean intensity per region (area independent).
    #[default]
    Mean,
    /// Raw intensity sums per region.
    Sum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContrastConfig {
    pub outer_scale: f64,
    pub form: ContrastForm,
    pub min_denominator: f64,
}

impl Default for ContrastConfig {
    fn default() -> Self {
        Self { outer_scale: 1.5, form: ContrastForm::Mean, min_denominator: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionRings {
    pub inner: Vec<Point2>,
    pub outer: Vec<Point2>,
}

impl RegionRings {
    pub fn from_inner(inner: Vec<Point2>, outer_scale: f64) -> Result<Self> {
        let area = polygon_area(&inner);
        if area < MIN_POLYGON_AREA {
            return Err(Error::DegenerateGeometry(format!("region polygon area {area:.3} px^2 < 4")));
        }
        let outer = scale_polygon(&inner, outer_scale);
        Ok(Self { inner, outer })
    }
}

/// Inner/outer polygons for a facial part: one ring for the lips, a left and
/// a right ring for eyes and eyebrows.
pub fn region_rings(k: &KeypointSet68, part: FacialPart, outer_scale: f64) -> Result<Vec<RegionRings>> {
    let polys: Vec<Vec<Point2>> = match part {
        FacialPart::Lips => vec![k.outer_lips().to_vec()],
        FacialPart::Eyes => vec![k.eye(Side::Left).to_vec(), k.eye(Side::Right).to_vec()],
        FacialPart::Eyebrows => vec![k.brow(Side::Left).to_vec(), k.brow(Side::Right).to_vec()],
    };
    polys.into_iter().map(|p| RegionRings::from_inner(p, outer_scale)).collect()
}

/// Incremental mean; exact for constant input.
fn running_mean(values: impl Iterator<Item = f64>) -> f64 {
    let mut m = 0.0;
    for (i, v) in values.enumerate() {
        m += (v - m) / (i + 1) as f64;
    }
    m
}

/// Contrast `(outer - inner) / (outer + inner)` of one ring in one encoded channel.
pub fn ring_contrast(plane: &Plane, ring: &RegionRings, cfg: &ContrastConfig) -> Result<f64> {
    let (w, h) = (plane.width(), plane.height());
    let inner = rasterize_polygon(&ring.inner, w, h);
    let annulus = rasterize_polygon(&ring.outer, w, h).and_not(&inner);
    let (n_in, n_out) = (inner.count(), annulus.count());
    if n_in == 0 {
        return Err(Error::EmptyRegion { region: "inner".into(), pixels: 0 });
    }
    if n_out == 0 {
        return Err(Error::EmptyRegion { region: "outer".into(), pixels: 0 });
    }
    let aggregate = |m: &Mask| match cfg.form {
        ContrastForm::Mean => running_mean(m.iter_set().map(|(x, y)| plane.get(x, y))),
        ContrastForm::Sum => m.iter_set().map(|(x, y)| plane.get(x, y)).sum(),
    };
    let (v_in, v_out) = (aggregate(&inner), aggregate(&annulus));
    let den = v_out + v_in;
    if den < cfg.min_denominator {
        return Err(Error::NumericDegenerate(format!("contrast denominator {den:e}")));
    }
    Ok((v_out - v_in) / den)
}

/// Contrast of a part in one channel, averaging left and right rings.
pub fn region_contrast(plane: &Plane, rings: &[RegionRings], cfg: &ContrastConfig) -> Result<f64> {
    let mut acc = 0.0;
    for ring in rings {
        acc += ring_contrast(plane, ring, cfg)?;
    }
    Ok(acc / rings.len() as f64)
}

/// The nine part x channel contrasts; `None` marks an invalid measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContrastVector {
    pub lips_l: Option<f64>,
    pub lips_a: Option<f64>,
    pub lips_b: Option<f64>,
    pub eyes_l: Option<f64>,
    pub eyes_a: Option<f64>,
    pub eyes_b: Option<f64>,
    pub eyebrows_l: Option<f64>,
    pub eyebrows_a: Option<f64>,
    pub eyebrows_b: Option<f64>,
}

impl ContrastVector {
    /// Values ordered lips, eyes, eyebrows; each L, a, b.
    pub fn values(&self) -> [Option<f64>; 9] {
        [
            self.lips_l,
            self.lips_a,
            self.lips_b,
            self.eyes_l,
            self.eyes_a,
            self.eyes_b,
            self.eyebrows_l,
            self.eyebrows_a,
            self.eyebrows_b,
        ]
    }
}

pub fn contrast_vector(lab: &LabImage, k: &KeypointSet68, cfg: &ContrastConfig) -> ContrastVector {
    let planes = LabChannel::ALL.map(|c| c.encode(lab));
    let mut out = [None; 9];
    for (pi, part) in FacialPart::ALL.iter().enumerate() {
        let Ok(rings) = region_rings(k, *part, cfg.outer_scale) else {
            continue;
        };
        for (ci, plane) in planes.iter().enumerate() {
            out[pi * 3 + ci] = region_contrast(plane, &rings, cfg).ok();
        }
    }
    ContrastVector {
        lips_l: out[0],
        lips_a: out[1],
        lips_b: out[2],
        eyes_l: out[3],
        eyes_a: out[4],
        eyes_b: out[5],
        eyebrows_l: out[6],
        eyebrows_a: out[7],
        eyebrows_b: out[8],
    }
}
