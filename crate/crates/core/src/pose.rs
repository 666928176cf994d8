//! Pose class remapping and resolution measures.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::FaceRecord;
use crate::preprocess::inter_ocular_distance;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseResolution {
    pub pose_class: u8,
    /// -1 tilted left, 0 frontal, +1 tilted right.
    pub pose_signed: i8,
    /// Distance between eye centers in the original image.
    pub iod: f64,
    /// Geometric mean of the box sides.
    pub box_size: f64,
}

/// Signed pose for the frontal classes 0 (frontal), 3 (tilted left) and
/// 4 (tilted right). Classes 1 and 2 are rotated faces.
pub fn signed_pose(pose_class: u8) -> Result<i8> {
    match pose_class {
        0 => Ok(0),
        3 => Ok(-1),
        4 => Ok(1),
        other => Err(Error::InvalidPose(other)),
    }
}

pub fn pose_resolution(r: &FaceRecord) -> Result<PoseResolution> {
    Ok(PoseResolution {
        pose_class: r.pose_class,
        pose_signed: signed_pose(r.pose_class)?,
        iod: inter_ocular_distance(&r.keypoints),
        box_size: (r.bbox.width * r.bbox.height).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BBox, KeypointSet68, Point2};
    use crate::synth::canonical_keypoints;

    fn record(w: f64, h: f64, pose: u8) -> FaceRecord {
        // eye hexagons centered at (100,100) and (140,100)
        let offs = [(-4.0, 0.0), (-2.0, -3.0), (2.0, -3.0), (4.0, 0.0), (2.0, 3.0), (-2.0, 3.0)];
        let mut pts = canonical_keypoints().points().to_vec();
        for (i, (dx, dy)) in offs.iter().enumerate() {
            pts[36 + i] = Point2::new(100.0 + dx, 100.0 + dy);
            pts[42 + i] = Point2::new(140.0 + dx, 100.0 + dy);
        }
        FaceRecord {
            face_id: "p".into(),
            image_path: "p.png".into(),
            bbox: BBox::new(60.0, 60.0, w, h),
            keypoints: KeypointSet68::new(pts).unwrap(),
            pose_class: pose,
            mask_path: None,
            aux: None,
        }
    }

    #[test]
    fn frontal_example() {
        let p = pose_resolution(&record(80.0, 80.0, 0)).unwrap();
        assert_eq!(p.iod, 40.0);
        assert_eq!(p.box_size, 80.0);
        assert_eq!(p.pose_signed, 0);
    }

    #[test]
    fn tilt_mapping() {
        assert_eq!(pose_resolution(&record(80.0, 80.0, 3)).unwrap().pose_signed, -1);
        assert_eq!(pose_resolution(&record(80.0, 80.0, 4)).unwrap().pose_signed, 1);
        assert!(matches!(pose_resolution(&record(80.0, 80.0, 1)), Err(Error::InvalidPose(1))));
        assert!(matches!(pose_resolution(&record(80.0, 80.0, 2)), Err(Error::InvalidPose(2))));
    }

    #[test]
    fn box_size_is_geometric_mean() {
        assert_eq!(pose_resolution(&record(50.0, 200.0, 0)).unwrap().box_size, 100.0);
        assert_eq!(
            pose_resolution(&record(37.0, 91.0, 0)).unwrap().box_size,
            pose_resolution(&record(91.0, 37.0, 0)).unwrap().box_size
        );
    }
}
