//! Skin color as the Individual Typology Angle (ITA).
//!
//! Per-face procedure: skin mask (ingested, or landmark polygons as a
//! fallback), four regions (chin, two cheeks, forehead) intersected with the
//! mask, a masked 5x5 mean filter over each region's ITA values, the modal
//! 1-degree bin of each region as its score, and the mean over regions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::color::{LabImage, LabPixel};
use crate::diversity::{bin_values, BinPolicy, Histogram};
use crate::error::{Error, Result};
use crate::geometry::{KeypointSet68, Point2};
use crate::raster::{rasterize_polygon, Mask};

/// `arctan((L - 50) / b)` in degrees. For `b = 0` the limit is taken:
/// +90 above L = 50, -90 below, undefined at L = 50.
pub fn ita(l: f64, b: f64) -> Result<f64> {
    if b == 0.0 {
        return match l.partial_cmp(&50.0) {
            Some(std::cmp::Ordering::Greater) => Ok(90.0),
            Some(std::cmp::Ordering::Less) => Ok(-90.0),
            _ => Err(Error::UndefinedIta),
        };
    }
    Ok(((l - 50.0) / b).atan() * 180.0 / std::f64::consts::PI)
}

pub fn ita_pixel(p: LabPixel) -> Result<f64> {
    ita(p.l, p.b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkinRegion {
    Chin,
    CheekLeft,
    CheekRight,
    Forehead,
}

impl SkinRegion {
    pub const ALL: [SkinRegion; 4] =
        [SkinRegion::Chin, SkinRegion::CheekLeft, SkinRegion::CheekRight, SkinRegion::Forehead];

    pub fn name(self) -> &'static str {
        match self {
            SkinRegion::Chin => "chin",
            SkinRegion::CheekLeft => "cheek_left",
            SkinRegion::CheekRight => "cheek_right",
            SkinRegion::Forehead => "forehead",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ItaConfig {
    /// Side of the square mean filter.
    pub smoothing_window: usize,
    /// Width of the bins used to find each region's peak, in degrees.
    pub peak_bin_width: f64,
    pub min_region_pixels: usize,
}

impl Default for ItaConfig {
    fn default() -> Self {
        Self { smoothing_window: 5, peak_bin_width: 1.0, min_region_pixels: 25 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItaResult {
    pub chin: Option<f64>,
    pub cheek_left: Option<f64>,
    pub cheek_right: Option<f64>,
    pub forehead: Option<f64>,
    pub face_ita: f64,
    /// Raw ITA of every masked region pixel, 1-degree bins over [-90, 90].
    pub histogram: Histogram,
}

impl ItaResult {
    pub fn region(&self, r: SkinRegion) -> Option<f64> {
        match r {
            SkinRegion::Chin => self.chin,
            SkinRegion::CheekLeft => self.cheek_left,
            SkinRegion::CheekRight => self.cheek_right,
            SkinRegion::Forehead => self.forehead,
        }
    }
}

/// Landmark polygon for a skin region. `forehead_top` caps the forehead.
pub fn region_polygon(k: &KeypointSet68, region: SkinRegion, forehead_top: f64) -> Vec<Point2> {
    let pick = |idx: &[usize]| idx.iter().map(|&i| k.get(i)).collect::<Vec<_>>();
    match region {
        SkinRegion::Chin => pick(&[6, 7, 8, 9, 10, 55, 56, 57, 58, 59]),
        SkinRegion::CheekLeft => pick(&[1, 2, 3, 4, 48, 31, 40, 41]),
        SkinRegion::CheekRight => pick(&[15, 14, 13, 12, 54, 35, 47, 46]),
        SkinRegion::Forehead => {
            let mut poly = pick(&[17, 18, 19, 20, 21, 22, 23, 24, 25, 26]);
            let top = forehead_top.min(poly.iter().map(|p| p.y).fold(f64::INFINITY, f64::min));
            poly.push(Point2::new(k.get(26).x, top));
            poly.push(Point2::new(k.get(17).x, top));
            poly
        }
    }
}

/// Union of the four region polygons, used when no skin mask is supplied.
pub fn fallback_mask(k: &KeypointSet68, forehead_top: f64, width: usize, height: usize) -> Mask {
    SkinRegion::ALL
        .iter()
        .map(|r| rasterize_polygon(&region_polygon(k, *r, forehead_top), width, height))
        .reduce(|a, b| a.or(&b))
        .expect("four regions")
}

/// Mode of `values` binned at `width` degrees with bins centered on integer
/// multiples of `width`; returns the center of the fullest bin (lowest on ties).
pub fn histogram_peak(values: &[f64], width: f64) -> Option<f64> {
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for v in values {
        *counts.entry((v / width).round() as i64).or_default() += 1;
    }
    let mut best: Option<(i64, usize)> = None;
    for (&bin, &count) in &counts {
        if best.is_none_or(|(_, c)| count > c) {
            best = Some((bin, count));
        }
    }
    best.map(|(bin, _)| bin as f64 * width)
}

/// Mean filter over a square window, restricted to pixels inside `region`.
fn smooth_in_region(ita: &[Option<f64>], region: &Mask, window: usize) -> Vec<f64> {
    let (w, h) = (region.width() as isize, region.height() as isize);
    let r = (window / 2) as isize;
    region
        .iter_set()
        .map(|(x, y)| {
            let (x, y) = (x as isize, y as isize);
            let mut sum = 0.0;
            let mut n = 0usize;
            for yy in (y - r).max(0)..=(y + r).min(h - 1) {
                for xx in (x - r).max(0)..=(x + r).min(w - 1) {
                    if region.get(xx as usize, yy as usize) {
                        if let Some(v) = ita[(yy * w + xx) as usize] {
                            sum += v;
                            n += 1;
                        }
                    }
                }
            }
            sum / n as f64
        })
        .collect()
}

pub fn face_ita(
    lab: &LabImage,
    k: &KeypointSet68,
    mask: Option<&Mask>,
    forehead_top: f64,
    cfg: &ItaConfig,
) -> Result<ItaResult> {
    let (w, h) = (lab.width(), lab.height());
    let ita_map: Vec<Option<f64>> =
        (0..h).flat_map(|y| (0..w).map(move |x| (x, y))).map(|(x, y)| ita_pixel(lab.pixel(x, y)).ok()).collect();
    let mut defined = Mask::new(w, h, false);
    for (i, v) in ita_map.iter().enumerate() {
        if v.is_some() {
            defined.set(i % w, i / w, true);
        }
    }
    let skin = match mask {
        Some(m) => {
            if (m.width(), m.height()) != (w, h) {
                return Err(Error::InvalidRecord(format!(
                    "skin mask is {}x{}, image is {w}x{h}",
                    m.width(),
                    m.height()
                )));
            }
            m.and(&defined)
        }
        None => fallback_mask(k, forehead_top, w, h).and(&defined),
    };

    let mut peaks = [None; 4];
    let mut union = Mask::new(w, h, false);
    for (i, region) in SkinRegion::ALL.iter().enumerate() {
        let poly = rasterize_polygon(&region_polygon(k, *region, forehead_top), w, h);
        let rmask = poly.and(&skin);
        if rmask.count() < cfg.min_region_pixels {
            continue;
        }
        let smoothed = smooth_in_region(&ita_map, &rmask, cfg.smoothing_window);
        peaks[i] = histogram_peak(&smoothed, cfg.peak_bin_width);
        union = union.or(&rmask);
    }

    let valid: Vec<f64> = peaks.iter().flatten().copied().collect();
    if valid.is_empty() {
        return Err(Error::EmptyRegion { region: "all skin regions".into(), pixels: 0 });
    }
    let face_ita = valid.iter().sum::<f64>() / valid.len() as f64;

    let raw: Vec<f64> = union.iter_set().filter_map(|(x, y)| ita_map[y * w + x]).collect();
    let edges: Vec<f64> = (-90..=90).map(|d| d as f64).collect();
    let histogram = bin_values(&raw, &BinPolicy::FixedEdges(edges))?;

    Ok(ItaResult {
        chin: peaks[0],
        cheek_left: peaks[1],
        cheek_right: peaks[2],
        forehead: peaks[3],
        face_ita,
        histogram,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::Plane;
    use crate::synth::canonical_keypoints;

    #[test]
    fn formula_examples() {
        assert_eq!(ita(50.0, 21.0).unwrap(), 0.0);
        assert!((ita(71.0, 21.0).unwrap() - 45.0).abs() < 1e-9);
        assert!((ita(29.0, 21.0).unwrap() + 45.0).abs() < 1e-9);
    }

    #[test]
    fn zero_b_limits() {
        assert_eq!(ita(60.0, 0.0).unwrap(), 90.0);
        assert_eq!(ita(40.0, 0.0).unwrap(), -90.0);
        assert!(matches!(ita(50.0, 0.0), Err(Error::UndefinedIta)));
    }

    #[test]
    fn peak_of_mixture() {
        let mut v = vec![10.0; 80];
        v.extend(std::iter::repeat(60.0).take(20));
        assert_eq!(histogram_peak(&v, 1.0), Some(10.0));
        assert_eq!(histogram_peak(&[], 1.0), None);
        // tie goes to the lower bin
        assert_eq!(histogram_peak(&[3.0, 7.0], 1.0), Some(3.0));
    }

    fn constant_ita_lab(deg: f64, b: f64) -> LabImage {
        let l = 50.0 + b * deg.to_radians().tan();
        LabImage { l: Plane::new(128, 128, l), a: Plane::new(128, 128, 11.0), b: Plane::new(128, 128, b) }
    }

    #[test]
    fn constant_field_gives_constant_peaks() {
        let lab = constant_ita_lab(30.0, 18.0);
        let r = face_ita(&lab, &canonical_keypoints(), None, 10.0, &ItaConfig::default()).unwrap();
        for region in SkinRegion::ALL {
            assert_eq!(r.region(region), Some(30.0), "{region:?}");
        }
        assert_eq!(r.face_ita, 30.0);
        let occupied: Vec<usize> = (0..r.histogram.counts.len()).filter(|&i| r.histogram.counts[i] > 0).collect();
        assert_eq!(occupied.len(), 1);
        assert!((r.histogram.edges[occupied[0]] - 30.0).abs() <= 1.0);
    }

    #[test]
    fn two_regions_at_20_two_at_40() {
        let k = canonical_keypoints();
        let top = 10.0;
        let (w, h) = (128, 128);
        let chin = rasterize_polygon(&region_polygon(&k, SkinRegion::Chin, top), w, h);
        let cheek_l = rasterize_polygon(&region_polygon(&k, SkinRegion::CheekLeft, top), w, h);
        let b = 20.0;
        let l_at = |deg: f64| 50.0 + b * f64::tan(deg.to_radians());
        let l = Plane::from_fn(w, h, |x, y| if chin.get(x, y) || cheek_l.get(x, y) { l_at(20.0) } else { l_at(40.0) });
        let lab = LabImage { l, a: Plane::new(w, h, 0.0), b: Plane::new(w, h, b) };
        let r = face_ita(&lab, &k, None, top, &ItaConfig::default()).unwrap();
        assert_eq!(r.chin, Some(20.0));
        assert_eq!(r.cheek_left, Some(20.0));
        assert_eq!(r.cheek_right, Some(40.0));
        assert_eq!(r.forehead, Some(40.0));
        assert_eq!(r.face_ita, 30.0);
    }

    #[test]
    fn empty_mask_invalidates_face() {
        let lab = constant_ita_lab(30.0, 18.0);
        let mask = Mask::new(128, 128, false);
        assert!(matches!(
            face_ita(&lab, &canonical_keypoints(), Some(&mask), 10.0, &ItaConfig::default()),
            Err(Error::EmptyRegion { .. })
        ));
    }

    #[test]
    fn small_regions_are_skipped() {
        let lab = constant_ita_lab(-20.0, 15.0);
        let k = canonical_keypoints();
        // mask only the chin polygon
        let mask = rasterize_polygon(&region_polygon(&k, SkinRegion::Chin, 10.0), 128, 128);
        let r = face_ita(&lab, &k, Some(&mask), 10.0, &ItaConfig::default()).unwrap();
        assert_eq!(r.chin, Some(-20.0));
        assert_eq!(r.cheek_left, None);
        assert_eq!(r.forehead, None);
        assert_eq!(r.face_ita, -20.0);
    }
}
