//! sRGB (D65) to CIE-Lab conversion.

use image::RgbImage;
use serde::{Deserialize, Serialize};

use crate::raster::Plane;

/// Linear sRGB to CIE XYZ, D65 white (IEC 61966-2-1).
pub const SRGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.412_456_4, 0.357_576_1, 0.180_437_5],
    [0.212_672_9, 0.715_152_2, 0.072_175_0],
    [0.019_333_9, 0.119_192_0, 0.950_304_1],
];

/// D65 reference white as the XYZ image of linear RGB (1, 1, 1), so that
/// sRGB white maps to a = b = 0 exactly.
pub const WHITE_D65: [f64; 3] = [
    0.412_456_4 + 0.357_576_1 + 0.180_437_5,
    0.212_672_9 + 0.715_152_2 + 0.072_175_0,
    0.019_333_9 + 0.119_192_0 + 0.950_304_1,
];

const LAB_DELTA: f64 = 6.0 / 29.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabPixel {
    pub l: f64,
    pub a: f64,
    pub b: f64,
}

/// sRGB transfer function inverse, input in `[0, 1]`.
pub fn srgb_to_linear(v: f64) -> f64 {
    if v <= 0.040_45 {
        v / 12.92
    } else {
        ((v + 0.055) / 1.055).powf(2.4)
    }
}

fn lab_f(t: f64) -> f64 {
    if t > LAB_DELTA * LAB_DELTA * LAB_DELTA {
        t.cbrt()
    } else {
        t / (3.0 * LAB_DELTA * LAB_DELTA) + 4.0 / 29.0
    }
}

pub fn rgb_to_lab(rgb: [u8; 3]) -> LabPixel {
    let lin = rgb.map(|c| srgb_to_linear(c as f64 / 255.0));
    let xyz = SRGB_TO_XYZ.map(|row| row[0] * lin[0] + row[1] * lin[1] + row[2] * lin[2]);
    let fx = lab_f(xyz[0] / WHITE_D65[0]);
    let fy = lab_f(xyz[1] / WHITE_D65[1]);
    let fz = lab_f(xyz[2] / WHITE_D65[2]);
    LabPixel { l: 116.0 * fy - 16.0, a: 500.0 * (fx - fy), b: 200.0 * (fy - fz) }
}

/// Per-pixel Lab planes of an image.
#[derive(Debug, Clone, PartialEq)]
pub struct LabImage {
    pub l: Plane,
    pub a: Plane,
    pub b: Plane,
}

impl LabImage {
    pub fn from_rgb(img: &RgbImage) -> Self {
        let (w, h) = (img.width() as usize, img.height() as usize);
        let mut l = Plane::new(w, h, 0.0);
        let mut a = Plane::new(w, h, 0.0);
        let mut b = Plane::new(w, h, 0.0);
        for (x, y, px) in img.enumerate_pixels() {
            let lab = rgb_to_lab(px.0);
            l.set(x as usize, y as usize, lab.l);
            a.set(x as usize, y as usize, lab.a);
            b.set(x as usize, y as usize, lab.b);
        }
        Self { l, a, b }
    }

    pub fn width(&self) -> usize {
        self.l.width()
    }

    pub fn height(&self) -> usize {
        self.l.height()
    }

    pub fn pixel(&self, x: usize, y: usize) -> LabPixel {
        LabPixel { l: self.l.get(x, y), a: self.a.get(x, y), b: self.b.get(x, y) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn white_point() {
        let w = rgb_to_lab([255, 255, 255]);
        assert!((w.l - 100.0).abs() < 1e-9);
        assert!(w.a.abs() < 0.01 && w.b.abs() < 0.01);
    }

    #[test]
    fn black_point() {
        let k = rgb_to_lab([0, 0, 0]);
        assert_eq!(k.l, 0.0);
        assert_eq!((k.a, k.b), (0.0, 0.0));
    }

    #[test]
    fn mid_gray_closed_form() {
        // Gray has X/Xn = Y/Yn = Z/Zn = linear value; L = 116 Y^(1/3) - 16.
        let v: f64 = 128.0 / 255.0;
        let y = ((v + 0.055) / 1.055).powf(2.4);
        let expected = 116.0 * y.powf(1.0 / 3.0) - 16.0;
        let g = rgb_to_lab([128, 128, 128]);
        assert!((g.l - expected).abs() < 1e-9);
        assert!((g.l - 53.585).abs() < 0.01);
        assert!(g.a.abs() < 0.01 && g.b.abs() < 0.01);
    }

    #[test]
    fn primaries_have_expected_signs() {
        let red = rgb_to_lab([255, 0, 0]);
        assert!((red.l - 53.24).abs() < 0.05 && (red.a - 80.09).abs() < 0.1 && (red.b - 67.20).abs() < 0.1);
        let blue = rgb_to_lab([0, 0, 255]);
        assert!(blue.b < -100.0);
    }
}
