//! Quality gate and geometric normalization of detected faces.

use std::collections::BTreeSet;
use std::fmt;

use image::{Rgb, RgbImage};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{centroid, BBox, FaceRecord, KeypointSet68, Point2, Side};
use crate::transform::Affine2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QualityPolicy {
    pub min_face_side: f64,
    pub min_iod: f64,
    pub allowed_poses: BTreeSet<u8>,
}

impl Default for QualityPolicy {
    fn default() -> Self {
        Self { min_face_side: 50.0, min_iod: 30.0, allowed_poses: [0, 3, 4].into_iter().collect() }
    }
}

impl QualityPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_face_side > 0.0) || !(self.min_iod > 0.0) {
            return Err(Error::Config("quality thresholds must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    Size,
    Iod,
    Pose,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RejectReason::Size => "size",
            RejectReason::Iod => "iod",
            RejectReason::Pose => "pose",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject(RejectReason),
}

/// Inter-ocular distance between the eye centroids; zero when the eye
/// centers coincide.
pub fn inter_ocular_distance(k: &KeypointSet68) -> f64 {
    let l = centroid(k.eye(Side::Left));
    let r = centroid(k.eye(Side::Right));
    l.distance(r)
}

/// Rules are checked in order size, IOD, pose; the first failure is reported.
pub fn quality_filter(r: &FaceRecord, p: &QualityPolicy) -> Verdict {
    if r.bbox.width < p.min_face_side || r.bbox.height < p.min_face_side {
        return Verdict::Reject(RejectReason::Size);
    }
    if inter_ocular_distance(&r.keypoints) < p.min_iod {
        return Verdict::Reject(RejectReason::Iod);
    }
    if !p.allowed_poses.contains(&r.pose_class) {
        return Verdict::Reject(RejectReason::Pose);
    }
    Verdict::Accept
}

/// Centroids of the six contour keypoints of each eye, as `(left, right)`.
pub fn eye_centers(k: &KeypointSet68) -> Result<(Point2, Point2)> {
    let l = centroid(k.eye(Side::Left));
    let r = centroid(k.eye(Side::Right));
    if l.distance(r) < 1e-9 {
        return Err(Error::DegenerateGeometry("eye centers coincide".into()));
    }
    if l.x >= r.x {
        return Err(Error::DegenerateGeometry("left eye center is not left of right eye center".into()));
    }
    Ok((l, r))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RectifyFrame {
    pub left_eye: Point2,
    pub right_eye: Point2,
    pub width: u32,
    pub height: u32,
}

impl Default for RectifyFrame {
    fn default() -> Self {
        Self { left_eye: Point2::new(40.0, 48.0), right_eye: Point2::new(88.0, 48.0), width: 128, height: 128 }
    }
}

#[derive(Debug, Clone)]
pub struct RectifiedFace {
    pub image: RgbImage,
    pub transform: Affine2,
    pub eye_centers_after: (Point2, Point2),
    /// Input keypoints mapped into the rectified frame.
    pub keypoints: KeypointSet68,
}

/// Similarity transform taking the eye centers of `k` onto the frame anchors.
pub fn rectifying_transform(k: &KeypointSet68, frame: &RectifyFrame) -> Result<Affine2> {
    let (l, r) = eye_centers(k)?;
    Affine2::similarity_from_pairs([l, r], [frame.left_eye, frame.right_eye])
}

/// Rotates, scales and translates the face so the eye centers land on the
/// frame anchors. Bilinear resampling, black fill.
pub fn rectify(image: &RgbImage, k: &KeypointSet68, frame: &RectifyFrame) -> Result<RectifiedFace> {
    let transform = rectifying_transform(k, frame)?;
    let (l, r) = eye_centers(k)?;
    let out = crate::raster::warp_rgb(image, &transform, frame.width, frame.height);
    Ok(RectifiedFace {
        image: out,
        transform,
        eye_centers_after: (transform.apply(l), transform.apply(r)),
        keypoints: k.transformed(&transform),
    })
}

/// Integer pixel rectangle of `bbox` grown by `expansion` (0.5 = 50%) in each
/// dimension about its center.
pub fn expanded_rect(bbox: &BBox, expansion: f64) -> (i64, i64, u32, u32) {
    let c = bbox.center();
    let w = bbox.width * (1.0 + expansion);
    let h = bbox.height * (1.0 + expansion);
    let x0 = (c.x - w / 2.0).round() as i64;
    let y0 = (c.y - h / 2.0).round() as i64;
    (x0, y0, w.round().max(1.0) as u32, h.round().max(1.0) as u32)
}

/// Crop of the expanded box; parts outside the image are black.
pub fn context_crop(image: &RgbImage, bbox: &BBox, expansion: f64) -> RgbImage {
    let (x0, y0, w, h) = expanded_rect(bbox, expansion);
    RgbImage::from_fn(w, h, |x, y| {
        let sx = x0 + x as i64;
        let sy = y0 + y as i64;
        if sx >= 0 && sy >= 0 && (sx as u32) < image.width() && (sy as u32) < image.height() {
            *image.get_pixel(sx as u32, sy as u32)
        } else {
            Rgb([0, 0, 0])
        }
    })
}
