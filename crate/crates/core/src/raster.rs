//! Scalar planes, binary masks, polygon rasterization and resampling.

use image::{Rgb, RgbImage};

use crate::geometry::Point2;
use crate::transform::Affine2;

/// A single-channel `f64` raster stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Plane {
    pub fn new(width: usize, height: usize, fill: f64) -> Self {
        Self { width, height, data: vec![fill; width * height] }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self { width, height, data }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<f64>) -> Option<Self> {
        (data.len() == width * height).then_some(Self { width, height, data })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.data[y * self.width + x] = v;
    }

    /// Value at clamped integer coordinates (replicated border).
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> f64 {
        let x = x.clamp(0, self.width as isize - 1) as usize;
        let y = y.clamp(0, self.height as isize - 1) as usize;
        self.get(x, y)
    }

    /// Horizontal mirror image.
    pub fn mirrored(&self) -> Plane {
        Plane::from_fn(self.width, self.height, |x, y| self.get(self.width - 1 - x, y))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Plane {
        Plane { width: self.width, height: self.height, data: self.data.iter().map(|&v| f(v)).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl Mask {
    pub fn new(width: usize, height: usize, fill: bool) -> Self {
        Self { width, height, data: vec![fill; width * height] }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.data[y * self.width + x] = v;
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn and(&self, other: &Mask) -> Mask {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn and_not(&self, other: &Mask) -> Mask {
        self.zip_with(other, |a, b| a && !b)
    }

    pub fn or(&self, other: &Mask) -> Mask {
        self.zip_with(other, |a, b| a || b)
    }

    fn zip_with(&self, other: &Mask, f: impl Fn(bool, bool) -> bool) -> Mask {
        assert_eq!((self.width, self.height), (other.width, other.height));
        Mask {
            width: self.width,
            height: self.height,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn iter_set(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.data.iter().enumerate().filter(|(_, &b)| b).map(move |(i, _)| (i % w, i / w))
    }
}

/// Shoelace area (absolute value).
pub fn polygon_area(poly: &[Point2]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        acc += a.x * b.y - b.x * a.y;
    }
    acc.abs() / 2.0
}

/// Scales a polygon about its vertex centroid.
pub fn scale_polygon(poly: &[Point2], factor: f64) -> Vec<Point2> {
    let c = crate::geometry::centroid(poly);
    poly.iter().map(|p| Point2::new(c.x + (p.x - c.x) * factor, c.y + (p.y - c.y) * factor)).collect()
}

/// Even-odd fill of a closed polygon, sampled at pixel centers.
pub fn rasterize_polygon(poly: &[Point2], width: usize, height: usize) -> Mask {
    let mut mask = Mask::new(width, height, false);
    let n = poly.len();
    if n < 3 {
        return mask;
    }
    let mut xs: Vec<f64> = Vec::with_capacity(n);
    for row in 0..height {
        let cy = row as f64 + 0.5;
        xs.clear();
        for i in 0..n {
            let a = poly[i];
            let b = poly[(i + 1) % n];
            // half-open in y so shared vertices are counted once
            if (a.y <= cy && cy < b.y) || (b.y <= cy && cy < a.y) {
                let t = (cy - a.y) / (b.y - a.y);
                xs.push(a.x + t * (b.x - a.x));
            }
        }
        xs.sort_by(|a, b| a.total_cmp(b));
        for span in xs.chunks_exact(2) {
            // pixel centers x+0.5 in [x0, x1], closed so mirrored polygons
            // cover mirrored pixels
            let start = (span[0] - 0.5).ceil().max(0.0);
            let end = ((span[1] - 0.5).floor() + 1.0).min(width as f64);
            let mut col = start;
            while col < end {
                mask.set(col as usize, row, true);
                col += 1.0;
            }
        }
    }
    mask
}

/// Bilinear sample of a plane at continuous coordinates; taps outside the
/// plane read as zero.
pub fn sample_bilinear(plane: &Plane, p: Point2) -> f64 {
    let fx = p.x - 0.5;
    let fy = p.y - 0.5;
    let x0 = fx.floor();
    let y0 = fy.floor();
    let tx = fx - x0;
    let ty = fy - y0;
    let (w, h) = (plane.width() as isize, plane.height() as isize);
    let tap = |x: isize, y: isize| -> f64 {
        if x < 0 || y < 0 || x >= w || y >= h {
            0.0
        } else {
            plane.get(x as usize, y as usize)
        }
    };
    let (x0, y0) = (x0 as isize, y0 as isize);
    let top = tap(x0, y0) * (1.0 - tx) + tap(x0 + 1, y0) * tx;
    let bottom = tap(x0, y0 + 1) * (1.0 - tx) + tap(x0 + 1, y0 + 1) * tx;
    top * (1.0 - ty) + bottom * ty
}

/// Resamples `src` into a `width` x `height` raster where output pixel center
/// `q` takes the value at `forward^-1(q)`.
pub fn warp_plane(src: &Plane, forward: &Affine2, width: usize, height: usize) -> Plane {
    let inv = forward.inverse().expect("warp requires an invertible transform");
    Plane::from_fn(width, height, |x, y| {
        let q = Point2::new(x as f64 + 0.5, y as f64 + 0.5);
        sample_bilinear(src, inv.apply(q))
    })
}

/// Splits an RGB image into three `f64` planes with values in `[0, 255]`.
pub fn rgb_planes(img: &RgbImage) -> [Plane; 3] {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let mut planes = [Plane::new(w, h, 0.0), Plane::new(w, h, 0.0), Plane::new(w, h, 0.0)];
    for (x, y, px) in img.enumerate_pixels() {
        for (c, plane) in planes.iter_mut().enumerate() {
            plane.set(x as usize, y as usize, px[c] as f64);
        }
    }
    planes
}

/// Bilinear warp of an RGB image, black outside the source.
pub fn warp_rgb(src: &RgbImage, forward: &Affine2, width: u32, height: u32) -> RgbImage {
    let planes = rgb_planes(src);
    let warped: Vec<Plane> = planes.iter().map(|p| warp_plane(p, forward, width as usize, height as usize)).collect();
    RgbImage::from_fn(width, height, |x, y| {
        let v = |c: usize| warped[c].get(x as usize, y as usize).round().clamp(0.0, 255.0) as u8;
        Rgb([v(0), v(1), v(2)])
    })
}

/// Nearest-neighbour warp of a mask; outside the source reads as unset.
pub fn warp_mask(src: &Mask, forward: &Affine2, width: usize, height: usize) -> Mask {
    let inv = forward.inverse().expect("warp requires an invertible transform");
    let mut out = Mask::new(width, height, false);
    for y in 0..height {
        for x in 0..width {
            let p = inv.apply(Point2::new(x as f64 + 0.5, y as f64 + 0.5));
            let (sx, sy) = (p.x.floor(), p.y.floor());
            if sx >= 0.0 && sy >= 0.0 && (sx as usize) < src.width() && (sy as usize) < src.height() {
                out.set(x, y, src.get(sx as usize, sy as usize));
            }
        }
    }
    out
}
