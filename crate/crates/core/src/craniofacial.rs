//! Craniofacial distances, areas and ratios from anatomical landmarks.
//!
//! Every measure is a Euclidean distance between landmarks in the rectified
//! frame. Bilateral measures are reported as the mean of the left and right
//! values.

use serde::{Deserialize, Serialize};

use crate::geometry::{AnatomicalLandmarks, Point2};

/// Denominators shorter than this (in pixels) invalidate a ratio.
pub const RATIO_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CranioDistances {
    pub n_sto: f64,
    pub ps_pi: f64,
    pub or_pi: f64,
    pub sn_cprime: f64,
    pub sn_sto: f64,
    pub sto_li: f64,
    pub cph_cph: f64,
    pub sbal_ls: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CranioAreas {
    pub tn_n: f64,
    pub tn_gn: f64,
    pub n_gn: f64,
    pub sn_gn: f64,
    pub zy_zy: f64,
    pub go_go: f64,
    pub en_en: f64,
    pub en_ex: f64,
    pub ex_ex: f64,
    pub n_sn: f64,
    pub al_al: f64,
    pub ch_ch: f64,
}

/// Ratios are `None` when their denominator is degenerate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CranioRatios {
    pub facial_index: Option<f64>,
    pub mandibular_index: Option<f64>,
    pub intercanthal_index: Option<f64>,
    pub orbital_width_index: Option<f64>,
    pub eye_fissure_index: Option<f64>,
    pub nasal_index: Option<f64>,
    pub vermilion_height_index: Option<f64>,
    pub mouth_face_width_index: Option<f64>,
}

fn d(a: Point2, b: Point2) -> f64 {
    a.distance(b)
}

fn mean2(a: f64, b: f64) -> f64 {
    (a + b) / 2.0
}

pub fn distances(lm: &AnatomicalLandmarks) -> CranioDistances {
    CranioDistances {
        n_sto: d(lm.n, lm.sto),
        ps_pi: mean2(d(lm.ps.left, lm.pi.left), d(lm.ps.right, lm.pi.right)),
        or_pi: mean2(d(lm.or.left, lm.pi.left), d(lm.or.right, lm.pi.right)),
        sn_cprime: d(lm.sn, lm.c_prime),
        sn_sto: d(lm.sn, lm.sto),
        sto_li: d(lm.sto, lm.li),
        cph_cph: lm.cph.span(),
        sbal_ls: mean2(d(lm.sbal.left, lm.ls), d(lm.sbal.right, lm.ls)),
    }
}

pub fn areas(lm: &AnatomicalLandmarks) -> CranioAreas {
    CranioAreas {
        tn_n: d(lm.tn, lm.n),
        tn_gn: d(lm.tn, lm.gn),
        n_gn: d(lm.n, lm.gn),
        sn_gn: d(lm.sn, lm.gn),
        zy_zy: lm.zy.span(),
        go_go: lm.go.span(),
        en_en: lm.en.span(),
        en_ex: mean2(d(lm.en.left, lm.ex.left), d(lm.en.right, lm.ex.right)),
        ex_ex: lm.ex.span(),
        n_sn: d(lm.n, lm.sn),
        al_al: lm.al.span(),
        ch_ch: lm.ch.span(),
    }
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den >= RATIO_EPS).then(|| num / den)
}

/// Mean of the left and right ratios; invalid if either side is.
fn bilateral(l: Option<f64>, r: Option<f64>) -> Option<f64> {
    Some(mean2(l?, r?))
}

pub fn ratios(lm: &AnatomicalLandmarks) -> CranioRatios {
    let zy_zy = lm.zy.span();
    let en_en = lm.en.span();
    let ex_en_l = d(lm.ex.left, lm.en.left);
    let ex_en_r = d(lm.ex.right, lm.en.right);
    CranioRatios {
        facial_index: ratio(d(lm.n, lm.gn), zy_zy),
        mandibular_index: ratio(d(lm.sto, lm.gn), lm.go.span()),
        intercanthal_index: ratio(en_en, lm.ex.span()),
        orbital_width_index: bilateral(ratio(ex_en_l, en_en), ratio(ex_en_r, en_en)),
        eye_fissure_index: bilateral(
            ratio(d(lm.ps.left, lm.pi.left), ex_en_l),
            ratio(d(lm.ps.right, lm.pi.right), ex_en_r),
        ),
        nasal_index: ratio(lm.al.span(), d(lm.n, lm.sn)),
        vermilion_height_index: ratio(d(lm.ls, lm.sto), d(lm.sto, lm.li)),
        mouth_face_width_index: ratio(lm.ch.span(), zy_zy),
    }
}

impl CranioDistances {
    pub fn values(&self) -> [f64; 8] {
        [self.n_sto, self.ps_pi, self.or_pi, self.sn_cprime, self.sn_sto, self.sto_li, self.cph_cph, self.sbal_ls]
    }
}

impl CranioAreas {
    pub fn values(&self) -> [f64; 12] {
        [
            self.tn_n, self.tn_gn, self.n_gn, self.sn_gn, self.zy_zy, self.go_go, self.en_en, self.en_ex, self.ex_ex,
            self.n_sn, self.al_al, self.ch_ch,
        ]
    }
}

impl CranioRatios {
    pub fn values(&self) -> [Option<f64>; 8] {
        [
            self.facial_index,
            self.mandibular_index,
            self.intercanthal_index,
            self.orbital_width_index,
            self.eye_fissure_index,
            self.nasal_index,
            self.vermilion_height_index,
            self.mouth_face_width_index,
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{map_keypoints, Pair};
    use crate::synth::canonical_keypoints;

    fn lm() -> AnatomicalLandmarks {
        map_keypoints(&canonical_keypoints(), 0.0).unwrap()
    }

    #[test]
    fn vertical_and_horizontal_segments() {
        let mut l = lm();
        l.n = Point2::new(64.0, 40.0);
        l.sto = Point2::new(64.0, 95.0);
        l.cph = Pair { left: Point2::new(60.0, 88.0), right: Point2::new(68.0, 88.0) };
        let dd = distances(&l);
        assert_eq!(dd.n_sto, 55.0);
        assert_eq!(dd.cph_cph, 8.0);
    }

    #[test]
    fn bilateral_eyelid_height_is_averaged() {
        let mut l = lm();
        l.ps = Pair { left: Point2::new(50.0, 46.0), right: Point2::new(78.0, 46.0) };
        l.pi = Pair { left: Point2::new(50.0, 50.0), right: Point2::new(78.0, 51.0) };
        assert_eq!(distances(&l).ps_pi, 4.5);
    }

    #[test]
    fn area_examples() {
        let mut l = lm();
        l.tn = Point2::new(64.0, 0.0);
        l.gn = Point2::new(64.0, 120.0);
        let a = areas(&l);
        assert_eq!(a.en_en, 24.0);
        assert_eq!(a.ex_ex, 56.0);
        assert!(a.ex_ex >= a.en_en);
        assert_eq!(a.tn_gn, 120.0);
    }

    #[test]
    fn ratio_examples() {
        let mut l = lm();
        // n-gn = 80, zy-zy = 100
        l.n = Point2::new(64.0, 40.0);
        l.gn = Point2::new(64.0, 120.0);
        l.zy = Pair { left: Point2::new(14.0, 70.0), right: Point2::new(114.0, 70.0) };
        let r = ratios(&l);
        assert!((r.facial_index.unwrap() - 0.8).abs() < 1e-15);

        // en-en = ex-ex / 2
        l.en = Pair { left: Point2::new(50.0, 48.0), right: Point2::new(78.0, 48.0) };
        l.ex = Pair { left: Point2::new(36.0, 48.0), right: Point2::new(92.0, 48.0) };
        assert_eq!(ratios(&l).intercanthal_index, Some(0.5));
    }

    #[test]
    fn degenerate_denominator_invalidates_only_that_ratio() {
        let mut l = lm();
        let p = Point2::new(64.0, 70.0);
        l.zy = Pair { left: p, right: p };
        let r = ratios(&l);
        assert_eq!(r.facial_index, None);
        assert_eq!(r.mouth_face_width_index, None);
        assert!(r.nasal_index.is_some());
        assert!(r.intercanthal_index.is_some());
    }
}
