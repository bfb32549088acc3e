use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Joint, PoseDetection2D, Skeleton3D};
use crate::error::{Error, Result};
use crate::geometry::{back_project, CameraIntrinsics, DepthFrame};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftParams {
    /// Half-width of the depth lookup window in pixels.
    pub patch: u32,
    /// Fewest lifted joints accepted as a skeleton.
    pub min_joints: usize,
}

impl Default for LiftParams {
    fn default() -> Self {
        Self {
            patch: 2,
            min_joints: 3,
        }
    }
}

/// Median of the valid depths in the square window around `(u, v)`.
pub(crate) fn patch_depth(frame: &DepthFrame, u: u32, v: u32, patch: u32) -> Option<f64> {
    let x0 = u.saturating_sub(patch);
    let y0 = v.saturating_sub(patch);
    let x1 = (u + patch).min(frame.width() - 1);
    let y1 = (v + patch).min(frame.height() - 1);
    let mut vals: Vec<f64> = (y0..=y1)
        .flat_map(|y| (x0..=x1).map(move |x| (x, y)))
        .filter_map(|(x, y)| frame.get(x, y))
        .collect();
    if vals.is_empty() {
        return None;
    }
    vals.sort_by(f64::total_cmp);
    let n = vals.len();
    Some(if n % 2 == 1 {
        vals[n / 2]
    } else {
        0.5 * (vals[n / 2 - 1] + vals[n / 2])
    })
}

/// Lifts every keypoint with a resolvable depth into the camera frame.
///
/// Keypoints outside the image or without any valid depth in their window are
/// dropped. Fails when fewer than `params.min_joints` survive.
pub fn lift_pose(
    pose: &PoseDetection2D,
    frame: &DepthFrame,
    k: &CameraIntrinsics,
    params: LiftParams,
) -> Result<Skeleton3D> {
    if !frame.matches(k) {
        return Err(Error::input(format!(
            "depth frame is {}x{} but intrinsics describe {}x{}",
            frame.width(),
            frame.height(),
            k.width,
            k.height
        )));
    }
    let mut joints = BTreeMap::new();
    for kp in pose.keypoints() {
        if !k.contains(kp.x, kp.y) {
            continue;
        }
        let (u, v) = k.nearest_pixel(kp.x, kp.y);
        let Some(d) = patch_depth(frame, u, v, params.patch) else {
            continue;
        };
        let point = back_project((kp.x, kp.y), d, k)?;
        joints.insert(
            kp.id,
            Joint {
                point,
                confidence: kp.confidence,
            },
        );
    }
    if joints.len() < params.min_joints.max(1) {
        return Err(Error::LiftFailure {
            joints: joints.len(),
            required: params.min_joints.max(1),
        });
    }
    Skeleton3D::new(joints)
}
