//! Landmark data model and the 68-keypoint to anatomical-landmark mapping.
//!
//! Coordinates are continuous image coordinates in pixels: `x` grows rightward,
//! `y` downward, and the center of pixel `(i, j)` sits at `(i + 0.5, j + 0.5)`.
//!
//! "Left" and "right" always mean image-left and image-right.
//!
//! # Keypoint mapping (`ibug68-v1`)
//!
//! | Landmark | Name                 | Left            | Right           |
//! |----------|----------------------|-----------------|-----------------|
//! | `n`      | nasion               | 27              |                 |
//! | `c'`     | pronasale            | 30              |                 |
//! | `sn`     | subnasale            | 33              |                 |
//! | `sbal`   | subalare             | 32              | 34              |
//! | `al`     | alare                | 31              | 35              |
//! | `cph`    | crista philtri       | 50              | 52              |
//! | `ls`     | labiale superius     | 51              |                 |
//! | `li`     | labiale inferius     | 57              |                 |
//! | `ch`     | cheilion             | 48              | 54              |
//! | `gn`     | gnathion             | 8               |                 |
//! | `go`     | gonion               | 4               | 12              |
//! | `zy`     | zygion               | 1               | 15              |
//! | `en`     | endocanthion         | 39              | 42              |
//! | `ex`     | exocanthion          | 36              | 45              |
//! | `ps`     | palpebrale superius  | mean(37, 38)    | mean(43, 44)    |
//! | `pi`     | palpebrale inferius  | mean(40, 41)    | mean(46, 47)    |
//! | `or`     | orbitale (brow)      | 19              | 24              |
//! | `sto`    | stomion              | midpoint of `ls` and `li`         |
//! | `tn`     | top of face          | `(n.x, top_y)`                    |
//!
//! `zy`, `go` and `or` have no exact counterpart in the 68-point scheme; the
//! indices above are proxies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transform::Affine2;

pub const LANDMARK_MAP_VERSION: &str = "ibug68-v1";

pub const NUM_KEYPOINTS: usize = 68;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn midpoint(self, other: Point2) -> Point2 {
        Point2::new((self.x + other.x) / 2.0, (self.y + other.y) / 2.0)
    }

    /// Reflection about the vertical line `x = axis_x`.
    pub fn mirrored(self, axis_x: f64) -> Point2 {
        Point2::new(2.0 * axis_x - self.x, self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Point2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Point2 { x, y }
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

/// Arithmetic mean of a set of points.
pub fn centroid(points: &[Point2]) -> Point2 {
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
    Point2::new(sx / n, sy / n)
}

/// Detection box, serialized as `[x, y, width, height]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct BBox {
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
}

impl BBox {
    pub const fn new(x: f64, y: f64, width: f64, height: f64) -> Self {
        Self { x, y, width, height }
    }

    pub fn center(&self) -> Point2 {
        Point2::new(self.x + self.width / 2.0, self.y + self.height / 2.0)
    }
}

impl From<[f64; 4]> for BBox {
    fn from([x, y, width, height]: [f64; 4]) -> Self {
        BBox { x, y, width, height }
    }
}

impl From<BBox> for [f64; 4] {
    fn from(b: BBox) -> Self {
        [b.x, b.y, b.width, b.height]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Index permutation that maps the 68-point order onto itself under a
/// horizontal flip.
pub const FLIP_68: [usize; NUM_KEYPOINTS] = {
    let mut p = [0usize; NUM_KEYPOINTS];
    let mut i = 0;
    while i < NUM_KEYPOINTS {
        p[i] = i;
        i += 1;
    }
    let pairs: [(usize, usize); 29] = [
        (0, 16),
        (1, 15),
        (2, 14),
        (3, 13),
        (4, 12),
        (5, 11),
        (6, 10),
        (7, 9),
        (17, 26),
        (18, 25),
        (19, 24),
        (20, 23),
        (21, 22),
        (31, 35),
        (32, 34),
        (36, 45),
        (37, 44),
        (38, 43),
        (39, 42),
        (40, 47),
        (41, 46),
        (48, 54),
        (49, 53),
        (50, 52),
        (55, 59),
        (56, 58),
        (60, 64),
        (61, 63),
        (65, 67),
    ];
    let mut k = 0;
    while k < pairs.len() {
        let (a, b) = pairs[k];
        p[a] = b;
        p[b] = a;
        k += 1;
    }
    p
};

/// Exactly 68 keypoints in the standard facial annotation order
/// (0-16 jaw, 17-26 brows, 27-35 nose, 36-47 eyes, 48-67 mouth).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point2>", into = "Vec<Point2>")]
pub struct KeypointSet68 {
    points: [Point2; NUM_KEYPOINTS],
}

impl KeypointSet68 {
    pub fn new(points: Vec<Point2>) -> Result<Self> {
        let points: [Point2; NUM_KEYPOINTS] =
            points.try_into().map_err(|v: Vec<Point2>| Error::KeypointCount(v.len()))?;
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Point2; NUM_KEYPOINTS] {
        &self.points
    }

    pub fn get(&self, index: usize) -> Point2 {
        self.points[index]
    }

    /// The six eye-contour keypoints of one eye.
    pub fn eye(&self, side: Side) -> &[Point2] {
        match side {
            Side::Left => &self.points[36..42],
            Side::Right => &self.points[42..48],
        }
    }

    pub fn brow(&self, side: Side) -> &[Point2] {
        match side {
            Side::Left => &self.points[17..22],
            Side::Right => &self.points[22..27],
        }
    }

    /// Outer lip contour (48-59).
    pub fn outer_lips(&self) -> &[Point2] {
        &self.points[48..60]
    }

    /// Reflects every point about `x = axis_x` and re-indexes so the result
    /// is again in standard order.
    pub fn mirrored(&self, axis_x: f64) -> Self {
        let mut points = [Point2::default(); NUM_KEYPOINTS];
        for (i, p) in points.iter_mut().enumerate() {
            *p = self.points[FLIP_68[i]].mirrored(axis_x);
        }
        Self { points }
    }

    pub fn transformed(&self, t: &Affine2) -> Self {
        let mut points = self.points;
        for p in points.iter_mut() {
            *p = t.apply(*p);
        }
        Self { points }
    }
}

impl TryFrom<Vec<Point2>> for KeypointSet68 {
    type Error = Error;

    fn try_from(points: Vec<Point2>) -> Result<Self> {
        Self::new(points)
    }
}

impl From<KeypointSet68> for Vec<Point2> {
    fn from(k: KeypointSet68) -> Self {
        k.points.to_vec()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pair {
    pub left: Point2,
    pub right: Point2,
}

impl Pair {
    fn new(left: Point2, right: Point2) -> Self {
        Self { left, right }
    }

    pub fn span(&self) -> f64 {
        self.left.distance(self.right)
    }
}

/// The 19 anatomical landmarks used by the craniofacial measures, plus the
/// derived `tn` and `sto`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnatomicalLandmarks {
    pub n: Point2,
    pub tn: Point2,
    pub c_prime: Point2,
    pub sn: Point2,
    pub sbal: Pair,
    pub al: Pair,
    pub cph: Pair,
    pub ls: Point2,
    pub sto: Point2,
    pub li: Point2,
    pub ch: Pair,
    pub gn: Point2,
    pub go: Pair,
    pub zy: Pair,
    pub en: Pair,
    pub ex: Pair,
    pub ps: Pair,
    pub pi: Pair,
    pub or: Pair,
}

/// Maps keypoints to anatomical landmarks using the `ibug68-v1` table.
///
/// `top_y` is the top edge of the (rectified) face region, used for `tn`.
pub fn map_keypoints(k: &KeypointSet68, top_y: f64) -> Result<AnatomicalLandmarks> {
    let p = |i: usize| k.get(i);
    let mean2 = |a: usize, b: usize| p(a).midpoint(p(b));

    let n = p(27);
    let ls = p(51);
    let li = p(57);
    let lm = AnatomicalLandmarks {
        n,
        tn: derive_tn(n, top_y),
        c_prime: p(30),
        sn: p(33),
        sbal: Pair::new(p(32), p(34)),
        al: Pair::new(p(31), p(35)),
        cph: Pair::new(p(50), p(52)),
        ls,
        sto: derive_sto(ls, li)?,
        li,
        ch: Pair::new(p(48), p(54)),
        gn: p(8),
        go: Pair::new(p(4), p(12)),
        zy: Pair::new(p(1), p(15)),
        en: Pair::new(p(39), p(42)),
        ex: Pair::new(p(36), p(45)),
        ps: Pair::new(mean2(37, 38), mean2(43, 44)),
        pi: Pair::new(mean2(40, 41), mean2(46, 47)),
        or: Pair::new(p(19), p(24)),
    };
    if lm.en.left.x >= lm.en.right.x {
        return Err(Error::DegenerateGeometry(format!(
            "inner eye corners out of order (left x {} >= right x {})",
            lm.en.left.x, lm.en.right.x
        )));
    }
    Ok(lm)
}

/// Topmost point vertically above the nasion, at the top edge of the face region.
pub fn derive_tn(n: Point2, top_y: f64) -> Point2 {
    Point2::new(n.x, top_y)
}

/// Stomion: midpoint of the upper and lower lip points.
pub fn derive_sto(ls: Point2, li: Point2) -> Result<Point2> {
    if ls.y > li.y {
        return Err(Error::DegenerateGeometry(format!("upper lip below lower lip ({} > {})", ls.y, li.y)));
    }
    Ok(ls.midpoint(li))
}

/// One face as delivered by the detection stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceRecord {
    pub face_id: String,
    pub image_path: String,
    pub bbox: BBox,
    pub keypoints: KeypointSet68,
    pub pose_class: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux: Option<crate::annotation::AuxAnnotations>,
}

impl FaceRecord {
    pub fn validate(&self) -> Result<()> {
        let b = &self.bbox;
        if !(b.width > 0.0 && b.height > 0.0) || ![b.x, b.y, b.width, b.height].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidRecord(format!("{}: bbox must have positive finite size", self.face_id)));
        }
        if self.pose_class > 4 {
            return Err(Error::InvalidRecord(format!(
                "{}: pose_class {} outside 0..=4",
                self.face_id, self.pose_class
            )));
        }
        if let Some(aux) = &self.aux {
            aux.validate().map_err(|e| Error::InvalidRecord(format!("{}: {e}", self.face_id)))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::canonical_keypoints;

    #[test]
    fn flip_permutation_is_an_involution() {
        for i in 0..NUM_KEYPOINTS {
            assert_eq!(FLIP_68[FLIP_68[i]], i);
        }
    }

    #[test]
    fn canonical_face_eye_corners() {
        let lm = map_keypoints(&canonical_keypoints(), 0.0).unwrap();
        assert_eq!(lm.en.left, Point2::new(52.0, 48.0));
        assert_eq!(lm.ex.left, Point2::new(36.0, 48.0));
        assert_eq!(lm.en.right, Point2::new(76.0, 48.0));
        assert_eq!(lm.ex.right, Point2::new(92.0, 48.0));
    }

    #[test]
    fn symmetric_face_mirrors_about_64() {
        let lm = map_keypoints(&canonical_keypoints(), 0.0).unwrap();
        assert_eq!(lm.en.left.mirrored(64.0), lm.en.right);
        assert_eq!(lm.ex.left.mirrored(64.0), lm.ex.right);
        assert_eq!(lm.tn.x, 64.0);
    }

    #[test]
    fn sto_is_vertical_average() {
        let k = canonical_keypoints();
        let lm = map_keypoints(&k, 0.0).unwrap();
        assert_eq!(lm.sto.y, (lm.ls.y + lm.li.y) / 2.0);
    }

    #[test]
    fn derive_tn_examples() {
        assert_eq!(derive_tn(Point2::new(64.0, 48.0), 0.0), Point2::new(64.0, 0.0));
        assert_eq!(derive_tn(Point2::new(60.0, 50.0), 4.0), Point2::new(60.0, 4.0));
        let n = Point2::new(60.0, 50.0);
        assert_eq!(derive_tn(n.mirrored(64.0), 4.0).x, 68.0);
    }

    #[test]
    fn derive_sto_examples() {
        let sto = derive_sto(Point2::new(64.0, 90.0), Point2::new(64.0, 100.0)).unwrap();
        assert_eq!(sto, Point2::new(64.0, 95.0));
        let sto = derive_sto(Point2::new(62.0, 90.0), Point2::new(66.0, 98.0)).unwrap();
        assert_eq!(sto, Point2::new(64.0, 94.0));
        let p = Point2::new(64.0, 95.0);
        assert_eq!(derive_sto(p, p).unwrap(), p);
        assert!(matches!(
            derive_sto(Point2::new(64.0, 101.0), Point2::new(64.0, 100.0)),
            Err(Error::DegenerateGeometry(_))
        ));
    }

    #[test]
    fn swapped_eyes_are_rejected() {
        // Mirroring without re-indexing puts the left inner corner to the right.
        let k = canonical_keypoints();
        let raw: Vec<Point2> = k.points().iter().map(|p| p.mirrored(64.0)).collect();
        let k = KeypointSet68::new(raw).unwrap();
        assert!(matches!(map_keypoints(&k, 0.0), Err(Error::DegenerateGeometry(_))));
    }

    #[test]
    fn keypoint_count_is_enforced() {
        let err = KeypointSet68::new(vec![Point2::default(); 67]).unwrap_err();
        assert!(matches!(err, Error::KeypointCount(67)));
        let mut pts = vec![Point2::default(); 68];
        pts[3].x = f64::NAN;
        assert!(matches!(KeypointSet68::new(pts), Err(Error::NonFinite)));
    }

    #[test]
    fn keypoints_serialize_as_pairs() {
        let k = canonical_keypoints();
        let json = serde_json::to_string(&k).unwrap();
        assert!(json.starts_with("[[20.0,50.0],"));
        let back: KeypointSet68 = serde_json::from_str(&json).unwrap();
        assert_eq!(back, k);
        assert!(serde_json::from_str::<KeypointSet68>("[[1.0,2.0]]").is_err());
    }
}
