//! Facial symmetry: density difference and edge orientation similarity over a
//! 128x128 face whose mid-line is the vertical line `x = 64`.
//!
//! Pixel column `x` in the left half is paired with column `127 - x`.

use image::RgbImage;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{KeypointSet68, Point2};
use crate::raster::{warp_plane, Plane};
use crate::transform::Affine2;

pub const SYMMETRY_SIZE: usize = 128;

/// Target locations for the inner canthi (`c1`, `c2`) and the philtrum (`c3`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SymmetryAnchors {
    pub c1: Point2,
    pub c2: Point2,
    pub c3: Point2,
}

impl Default for SymmetryAnchors {
    fn default() -> Self {
        Self { c1: Point2::new(40.0, 48.0), c2: Point2::new(88.0, 48.0), c3: Point2::new(64.0, 84.0) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrientationMode {
    /// Gradient direction as a vector; opposite gradients give -1.
    #[default]
    Vector,
    /// Undirected line orientation (doubled angle); opposite gradients give +1.
    Line,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SymmetryConfig {
    /// Minimum Sobel magnitude (intensities in `[0, 1]`) for a pixel to count.
    pub edge_threshold: f64,
    pub orientation: OrientationMode,
}

impl Default for SymmetryConfig {
    fn default() -> Self {
        Self { edge_threshold: 1.0 / 255.0, orientation: OrientationMode::Vector }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryScores {
    pub density_difference: f64,
    /// `None` when the face has no usable edges.
    pub edge_orientation_similarity: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SymmetryFace {
    pub gray: Plane,
    pub transform: Affine2,
}

/// ITU-R BT.601 luma, scaled to `[0, 1]`.
pub fn to_gray(img: &RgbImage) -> Plane {
    Plane::from_fn(img.width() as usize, img.height() as usize, |x, y| {
        let p = img.get_pixel(x as u32, y as u32).0;
        (0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64) / 255.0
    })
}

/// Source points for the symmetry frame: inner eye corners (39, 42) and the
/// philtrum, taken as the midpoint of subnasale (33) and upper lip (51).
pub fn symmetry_source_points(k: &KeypointSet68) -> [Point2; 3] {
    [k.get(39), k.get(42), k.get(33).midpoint(k.get(51))]
}

/// Affine-normalizes the face so the inner canthi and philtrum land on the
/// anchors, then returns the 128x128 grayscale crop.
pub fn rectify_for_symmetry(image: &RgbImage, k: &KeypointSet68, anchors: &SymmetryAnchors) -> Result<SymmetryFace> {
    let src = symmetry_source_points(k);
    let transform = Affine2::affine_from_triples(src, [anchors.c1, anchors.c2, anchors.c3])?;
    let gray = warp_plane(&to_gray(image), &transform, SYMMETRY_SIZE, SYMMETRY_SIZE);
    Ok(SymmetryFace { gray, transform })
}

/// Mean absolute difference between each left-half pixel and its mirror.
pub fn density_difference(img: &Plane) -> f64 {
    let (w, h) = (img.width(), img.height());
    let half = w / 2;
    let mut sum = 0.0;
    for y in 0..h {
        for x in 0..half {
            sum += (img.get(x, y) - img.get(w - 1 - x, y)).abs();
        }
    }
    sum / (half * h) as f64
}

/// 3x3 Sobel responses at `(x, y)` with a replicated border.
///
/// The symmetric taps are summed pairwise first so that mirroring the image
/// negates `gx` and preserves `gy` bit-for-bit.
pub fn sobel_at(img: &Plane, x: usize, y: usize) -> (f64, f64) {
    let p = |dx: isize, dy: isize| img.get_clamped(x as isize + dx, y as isize + dy);
    let dcol = |dy: isize| p(1, dy) - p(-1, dy);
    let drow = |dx: isize| p(dx, 1) - p(dx, -1);
    let gx = (dcol(-1) + dcol(1)) + 2.0 * dcol(0);
    let gy = (drow(-1) + drow(1)) + 2.0 * drow(0);
    (gx, gy)
}

/// Mean cosine of the angle between the edge orientation at each interior
/// left-half pixel and the orientation of the mirrored image there.
pub fn edge_orientation_similarity(img: &Plane, cfg: &SymmetryConfig) -> Result<f64> {
    let (w, h) = (img.width(), img.height());
    let half = w / 2;
    let mut sum = 0.0;
    let mut count = 0usize;
    for y in 1..h.saturating_sub(1) {
        for x in 1..half {
            let (ax, ay) = sobel_at(img, x, y);
            let (mx, my) = sobel_at(img, w - 1 - x, y);
            // gradient of the mirrored image at (x, y)
            let (bx, by) = (-mx, my);
            let na = ax.hypot(ay);
            let nb = bx.hypot(by);
            if na < cfg.edge_threshold || nb < cfg.edge_threshold {
                continue;
            }
            let cos = ((ax * bx + ay * by) / (na * nb)).clamp(-1.0, 1.0);
            sum += match cfg.orientation {
                OrientationMode::Vector => cos,
                OrientationMode::Line => 2.0 * cos * cos - 1.0,
            };
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::NoEdges);
    }
    Ok(sum / count as f64)
}

pub fn symmetry_scores(img: &Plane, cfg: &SymmetryConfig) -> SymmetryScores {
    SymmetryScores {
        density_difference: density_difference(img),
        edge_orientation_similarity: edge_orientation_similarity(img, cfg).ok(),
    }
}
