//! Synthetic faces for tests, examples and the bundled corpus.
//!
//! Faces are flat-shaded polygons drawn from a 68-point keypoint set, so every
//! measure has a closed-form or brute-force reference.

use image::{Rgb, RgbImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::annotation::{AgeGroup, AuxAnnotations, GenderLabel, Vote, AGE_SOFTMAX_LEN};
use crate::geometry::{centroid, BBox, FaceRecord, KeypointSet68, Point2, Side};
use crate::raster::{rasterize_polygon, Mask};
use crate::transform::Affine2;

#[rustfmt::skip]
const CANONICAL: [(f64, f64); 68] = [
    // jaw
    (20.0, 50.0), (21.0, 62.0), (23.0, 74.0), (26.0, 86.0), (31.0, 97.0), (38.0, 106.0),
    (46.0, 113.0), (55.0, 118.0), (64.0, 120.0), (73.0, 118.0), (82.0, 113.0), (90.0, 106.0),
    (97.0, 97.0), (102.0, 86.0), (105.0, 74.0), (107.0, 62.0), (108.0, 50.0),
    // brows
    (30.0, 38.0), (36.0, 35.0), (43.0, 34.0), (50.0, 35.0), (56.0, 37.0),
    (72.0, 37.0), (78.0, 35.0), (85.0, 34.0), (92.0, 35.0), (98.0, 38.0),
    // nose bridge and base
    (64.0, 44.0), (64.0, 54.0), (64.0, 63.0), (64.0, 72.0),
    (55.0, 78.0), (59.0, 80.0), (64.0, 81.0), (69.0, 80.0), (73.0, 78.0),
    // eyes
    (36.0, 48.0), (40.0, 45.0), (48.0, 45.0), (52.0, 48.0), (48.0, 51.0), (40.0, 51.0),
    (76.0, 48.0), (80.0, 45.0), (88.0, 45.0), (92.0, 48.0), (88.0, 51.0), (80.0, 51.0),
    // outer lips
    (50.0, 96.0), (54.0, 92.0), (59.0, 90.0), (64.0, 92.0), (69.0, 90.0), (74.0, 92.0),
    (78.0, 96.0), (74.0, 101.0), (69.0, 104.0), (64.0, 106.0), (59.0, 104.0), (54.0, 101.0),
    // inner lips
    (54.0, 96.0), (59.0, 96.0), (64.0, 97.0), (69.0, 96.0), (74.0, 96.0),
    (69.0, 100.0), (64.0, 101.0), (59.0, 100.0),
];

/// A frontal face in a 128x128 frame, mirror-symmetric about `x = 64`.
pub fn canonical_keypoints() -> KeypointSet68 {
    KeypointSet68::new(CANONICAL.iter().map(|&(x, y)| Point2::new(x, y)).collect()).expect("68 finite points")
}

/// Top edge of the forehead used when drawing: a quarter of the brow-to-chin
/// height above the brows.
pub fn forehead_top(k: &KeypointSet68) -> f64 {
    let brow = (17..27).map(|i| k.get(i).y).fold(f64::INFINITY, f64::min);
    brow - 0.25 * (k.get(8).y - brow)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaceStyle {
    pub background: [u8; 3],
    pub skin: [u8; 3],
    pub lips: [u8; 3],
    pub eyes: [u8; 3],
    pub brows: [u8; 3],
    /// Relative brightness change per pixel from left to right across the face.
    pub shading: f64,
}

impl Default for FaceStyle {
    fn default() -> Self {
        Self {
            background: [24, 24, 24],
            skin: [205, 160, 130],
            lips: [170, 85, 85],
            eyes: [60, 45, 35],
            brows: [75, 55, 40],
            shading: 0.0,
        }
    }
}

/// Jaw line closed by vertical sides up to the forehead top.
pub fn face_polygon(k: &KeypointSet68) -> Vec<Point2> {
    let top = forehead_top(k);
    let mut poly: Vec<Point2> = (0..17).map(|i| k.get(i)).collect();
    poly.push(Point2::new(k.get(16).x, top));
    poly.push(Point2::new(k.get(0).x, top));
    poly
}

/// Brow as a band: the five points and the same points moved a quarter of
/// the way toward the eye.
pub fn brow_polygon(k: &KeypointSet68, side: Side) -> Vec<Point2> {
    let pts = k.brow(side).to_vec();
    let eye = centroid(k.eye(side));
    let brow = centroid(&pts);
    let (dx, dy) = ((eye.x - brow.x) * 0.25, (eye.y - brow.y) * 0.25);
    let mut poly = pts.clone();
    poly.extend(pts.iter().rev().map(|p| Point2::new(p.x + dx, p.y + dy)));
    poly
}

fn paint(img: &mut RgbImage, mask: &Mask, color: [u8; 3]) {
    for (x, y) in mask.iter_set() {
        img.put_pixel(x as u32, y as u32, Rgb(color));
    }
}

/// Renders a flat-shaded face: skin, brows, eyes and lips.
pub fn render_face(k: &KeypointSet68, style: &FaceStyle, width: u32, height: u32) -> RgbImage {
    let (w, h) = (width as usize, height as usize);
    let mut img = RgbImage::from_pixel(width, height, Rgb(style.background));
    paint(&mut img, &rasterize_polygon(&face_polygon(k), w, h), style.skin);
    for side in [Side::Left, Side::Right] {
        paint(&mut img, &rasterize_polygon(&brow_polygon(k, side), w, h), style.brows);
    }
    paint(&mut img, &rasterize_polygon(&k.points()[36..42], w, h), style.eyes);
    paint(&mut img, &rasterize_polygon(&k.points()[42..48], w, h), style.eyes);
    paint(&mut img, &rasterize_polygon(&k.points()[48..60], w, h), style.lips);
    if style.shading != 0.0 {
        let cx = (k.get(0).x + k.get(16).x) / 2.0;
        for (x, _, px) in img.enumerate_pixels_mut() {
            if px.0 == style.background {
                continue;
            }
            let f = 1.0 + style.shading * (x as f64 + 0.5 - cx);
            px.0 = px.0.map(|c| (c as f64 * f).round().clamp(0.0, 255.0) as u8);
        }
    }
    img
}

/// Tight box around the keypoints and the drawn forehead.
pub fn face_bbox(k: &KeypointSet68) -> BBox {
    let pts = k.points();
    let x0 = pts.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
    let x1 = pts.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
    let y0 = forehead_top(k);
    let y1 = pts.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
    BBox::new(x0, y0, x1 - x0, y1 - y0)
}

/// Discretized Gaussian over years 0..=100, normalized to sum 1.
pub fn age_softmax(mean: f64, sd: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..AGE_SOFTMAX_LEN).map(|y| (-0.5 * ((y as f64 - mean) / sd).powi(2)).exp()).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / s).collect()
}

/// Random face shape: horizontal and lower-face stretch plus up to one pixel
/// of independent jitter per keypoint.
fn shape_variant(k: &KeypointSet68, rng: &mut ChaCha8Rng) -> KeypointSet68 {
    let wide = rng.gen_range(-0.08..0.08);
    let long = rng.gen_range(-0.1..0.1);
    let pts = k
        .points()
        .iter()
        .map(|p| {
            let x = 64.0 + (p.x - 64.0) * (1.0 + wide) + rng.gen_range(-1.0..1.0);
            let y = if p.y > 48.0 { 48.0 + (p.y - 48.0) * (1.0 + long) } else { p.y };
            Point2::new(x, y + rng.gen_range(-1.0..1.0))
        })
        .collect();
    KeypointSet68::new(pts).expect("finite points")
}

/// A synthetic face placed in its own image.
#[derive(Debug, Clone)]
pub struct SyntheticFace {
    pub record: FaceRecord,
    pub image: RgbImage,
}

pub const CORPUS_IMAGE_SIZE: u32 = 192;

/// Deterministic corpus: `n` faces with random pose, scale, skin tone and
/// annotations. Face 3 is undersized and face 7 is a rotated pose class,
/// so both fail the quality gate when `n > 7`.
pub fn corpus(n: usize, seed: u64) -> Vec<SyntheticFace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let canon = canonical_keypoints();
    let c = Point2::new(64.0, 80.0);
    (0..n)
        .map(|i| {
            let scale = if i == 3 { 0.35 } else { rng.gen_range(0.95..1.25) };
            let angle = rng.gen_range(-0.15..0.15);
            let shift = Point2::new(rng.gen_range(-12.0..12.0), rng.gen_range(-10.0..10.0));
            let center = Point2::new(CORPUS_IMAGE_SIZE as f64 / 2.0, CORPUS_IMAGE_SIZE as f64 / 2.0);
            let t = Affine2::translation(center.x - c.x + shift.x, center.y - c.y + shift.y)
                .compose(&Affine2::rotation_about(c, angle).compose(&Affine2::scaling_about(c, scale)));
            let k = shape_variant(&canon, &mut rng).transformed(&t);

            let tone: f64 = rng.gen_range(0.0..1.0);
            let skin = [(120.0 + 120.0 * tone) as u8, (80.0 + 110.0 * tone) as u8, (55.0 + 100.0 * tone) as u8];
            let style = FaceStyle {
                skin,
                lips: [rng.gen_range(120..200), rng.gen_range(50..100), rng.gen_range(50..100)],
                eyes: [rng.gen_range(30..90), rng.gen_range(25..70), rng.gen_range(20..60)],
                brows: [rng.gen_range(40..110), rng.gen_range(30..80), rng.gen_range(20..60)],
                shading: rng.gen_range(-0.002..0.002),
                ..FaceStyle::default()
            };
            let image = render_face(&k, &style, CORPUS_IMAGE_SIZE, CORPUS_IMAGE_SIZE);

            let age: f64 = rng.gen_range(2.0..80.0);
            let male = rng.gen_bool(0.5);
            let votes = (0..3)
                .map(|a| {
                    let noisy = (age + rng.gen_range(-6.0..6.0)).max(0.0);
                    let flip = rng.gen_bool(0.15);
                    Vote {
                        annotator_id: format!("ann{a}"),
                        gender_label: if male != flip { GenderLabel::Male } else { GenderLabel::Female },
                        age_group: AgeGroup::from_years(noisy),
                        age_value: (noisy * 10.0).round() / 10.0,
                        annotator_weight: rng.gen_range(1..=10) as f64 / 10.0,
                    }
                })
                .collect();
            let pose_class = match i {
                7 => 1,
                _ => [0, 0, 0, 3, 4][rng.gen_range(0..5)],
            };
            let record = FaceRecord {
                face_id: format!("face{i:02}"),
                image_path: format!("face{i:02}.png"),
                bbox: face_bbox(&k),
                keypoints: k,
                pose_class,
                mask_path: None,
                aux: Some(AuxAnnotations {
                    age_softmax: Some(age_softmax(age, 4.0)),
                    gender_score: Some(if male { rng.gen_range(0.6..1.0) } else { rng.gen_range(0.0..0.4) }),
                    votes: Some(votes),
                }),
            };
            SyntheticFace { record, image }
        })
        .collect()
}
