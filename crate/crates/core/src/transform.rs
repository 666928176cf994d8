//! 2x3 affine transforms and their estimation from point correspondences.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point2;

/// `x' = m[0][0] x + m[0][1] y + m[0][2]`, `y' = m[1][0] x + m[1][1] y + m[1][2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Affine2 {
    pub m: [[f64; 3]; 2],
}

impl Affine2 {
    pub const IDENTITY: Affine2 = Affine2 { m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]] };

    pub fn apply(&self, p: Point2) -> Point2 {
        let m = &self.m;
        Point2::new(m[0][0] * p.x + m[0][1] * p.y + m[0][2], m[1][0] * p.x + m[1][1] * p.y + m[1][2])
    }

    pub fn determinant(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn inverse(&self) -> Result<Affine2> {
        let det = self.determinant();
        if det.abs() < 1e-12 {
            return Err(Error::DegenerateGeometry("singular affine transform".into()));
        }
        let [[a, b, c], [d, e, f]] = self.m;
        let ia = e / det;
        let ib = -b / det;
        let id = -d / det;
        let ie = a / det;
        Ok(Affine2 { m: [[ia, ib, -(ia * c + ib * f)], [id, ie, -(id * c + ie * f)]] })
    }

    /// `self` applied after `first`.
    pub fn compose(&self, first: &Affine2) -> Affine2 {
        let a = &self.m;
        let b = &first.m;
        let mut m = [[0.0; 3]; 2];
        for r in 0..2 {
            m[r][0] = a[r][0] * b[0][0] + a[r][1] * b[1][0];
            m[r][1] = a[r][0] * b[0][1] + a[r][1] * b[1][1];
            m[r][2] = a[r][0] * b[0][2] + a[r][1] * b[1][2] + a[r][2];
        }
        Affine2 { m }
    }

    pub fn rotation_about(center: Point2, radians: f64) -> Affine2 {
        let (s, c) = radians.sin_cos();
        Affine2 { m: [[c, -s, center.x - c * center.x + s * center.y], [s, c, center.y - s * center.x - c * center.y]] }
    }

    pub fn scaling_about(center: Point2, scale: f64) -> Affine2 {
        Affine2 { m: [[scale, 0.0, center.x * (1.0 - scale)], [0.0, scale, center.y * (1.0 - scale)]] }
    }

    pub fn translation(dx: f64, dy: f64) -> Affine2 {
        Affine2 { m: [[1.0, 0.0, dx], [0.0, 1.0, dy]] }
    }

    /// Rotation + uniform scale + translation taking `src[i]` to `dst[i]`.
    ///
    /// Treats points as complex numbers: `z' = a z + b`.
    pub fn similarity_from_pairs(src: [Point2; 2], dst: [Point2; 2]) -> Result<Affine2> {
        let (sx, sy) = (src[1].x - src[0].x, src[1].y - src[0].y);
        let (dx, dy) = (dst[1].x - dst[0].x, dst[1].y - dst[0].y);
        let denom = sx * sx + sy * sy;
        if denom < 1e-12 {
            return Err(Error::DegenerateGeometry("coincident source points".into()));
        }
        // a = d / s in complex arithmetic
        let ar = (dx * sx + dy * sy) / denom;
        let ai = (dy * sx - dx * sy) / denom;
        let tx = dst[0].x - (ar * src[0].x - ai * src[0].y);
        let ty = dst[0].y - (ai * src[0].x + ar * src[0].y);
        Ok(Affine2 { m: [[ar, -ai, tx], [ai, ar, ty]] })
    }

    /// The unique affine map taking three non-collinear `src` points to `dst`.
    pub fn affine_from_triples(src: [Point2; 3], dst: [Point2; 3]) -> Result<Affine2> {
        let [p0, p1, p2] = src;
        let det = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
        let scale = (p1.x - p0.x).hypot(p1.y - p0.y).max((p2.x - p0.x).hypot(p2.y - p0.y));
        if det.abs() <= 1e-9 * scale * scale || scale == 0.0 {
            return Err(Error::DegenerateGeometry("source points are collinear".into()));
        }
        // Solve [x y 1] * coeffs = target for each output row by Cramer's rule.
        let solve = |t0: f64, t1: f64, t2: f64| -> [f64; 3] {
            let (u1, v1) = (p1.x - p0.x, p1.y - p0.y);
            let (u2, v2) = (p2.x - p0.x, p2.y - p0.y);
            let (r1, r2) = (t1 - t0, t2 - t0);
            let a = (r1 * v2 - r2 * v1) / det;
            let b = (u1 * r2 - u2 * r1) / det;
            [a, b, t0 - a * p0.x - b * p0.y]
        };
        Ok(Affine2 { m: [solve(dst[0].x, dst[1].x, dst[2].x), solve(dst[0].y, dst[1].y, dst[2].y)] })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn close(a: Point2, b: Point2) -> bool {
        a.distance(b) < 1e-9
    }

    #[test]
    fn similarity_hits_targets() {
        let src = [Point2::new(10.0, 20.0), Point2::new(50.0, 35.0)];
        let dst = [Point2::new(40.0, 48.0), Point2::new(88.0, 48.0)];
        let t = Affine2::similarity_from_pairs(src, dst).unwrap();
        assert!(close(t.apply(src[0]), dst[0]));
        assert!(close(t.apply(src[1]), dst[1]));
        // no shear: columns orthogonal and equal length
        assert_abs_diff_eq!(t.m[0][0], t.m[1][1], epsilon = 1e-12);
        assert_abs_diff_eq!(t.m[0][1], -t.m[1][0], epsilon = 1e-12);
    }

    #[test]
    fn similarity_identity_when_already_aligned() {
        let pts = [Point2::new(40.0, 48.0), Point2::new(88.0, 48.0)];
        let t = Affine2::similarity_from_pairs(pts, pts).unwrap();
        assert_eq!(t, Affine2::IDENTITY);
    }

    #[test]
    fn rotated_pairs_give_inverse_rotation() {
        let anchors = [Point2::new(40.0, 48.0), Point2::new(88.0, 48.0)];
        let mid = anchors[0].midpoint(anchors[1]);
        let rot = Affine2::rotation_about(mid, 10f64.to_radians());
        let src = [rot.apply(anchors[0]), rot.apply(anchors[1])];
        let t = Affine2::similarity_from_pairs(src, anchors).unwrap();
        let expected = Affine2::rotation_about(mid, -10f64.to_radians());
        for r in 0..2 {
            for c in 0..3 {
                assert_abs_diff_eq!(t.m[r][c], expected.m[r][c], epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn affine_from_triples_recovers_scaling() {
        let dst = [Point2::new(40.0, 48.0), Point2::new(88.0, 48.0), Point2::new(64.0, 84.0)];
        let src = dst.map(|p| Point2::new(p.x * 2.0, p.y * 2.0));
        let t = Affine2::affine_from_triples(src, dst).unwrap();
        assert_abs_diff_eq!(t.m[0][0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(t.m[1][1], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(t.m[0][1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t.m[0][2], 0.0, epsilon = 1e-12);
        for (s, d) in src.iter().zip(dst.iter()) {
            assert!(close(t.apply(*s), *d));
        }
    }

    #[test]
    fn collinear_triples_are_degenerate() {
        let src = [Point2::new(0.0, 0.0), Point2::new(1.0, 1.0), Point2::new(2.0, 2.0)];
        let dst = [Point2::new(40.0, 48.0), Point2::new(88.0, 48.0), Point2::new(64.0, 84.0)];
        assert!(Affine2::affine_from_triples(src, dst).is_err());
    }

    #[test]
    fn inverse_round_trips() {
        let t = Affine2::rotation_about(Point2::new(5.0, 7.0), 0.3)
            .compose(&Affine2::scaling_about(Point2::new(1.0, 2.0), 1.7));
        let inv = t.inverse().unwrap();
        let p = Point2::new(12.5, -3.25);
        assert!(close(inv.apply(t.apply(p)), p));
    }
}
