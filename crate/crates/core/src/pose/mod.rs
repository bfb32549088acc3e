//! Human-pose keypoints in 2D and their lifted 3D skeleton.

mod json;
mod lift;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::Point3;

pub use json::{parse_keypoints_json, to_keypoints_json, KeypointsDocument};
pub use lift::{lift_pose, LiftParams};

macro_rules! keypoints {
    ($($variant:ident => $name:literal),+ $(,)?) => {
        /// The 19 body parts reported by the pose estimator.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum KeypointId {
            $($variant),+
        }

        impl KeypointId {
            /// Serialization order.
            pub const ALL: [KeypointId; 19] = [$(KeypointId::$variant),+];

            pub fn name(self) -> &'static str {
                match self {
                    $(KeypointId::$variant => $name),+
                }
            }
        }

        impl FromStr for KeypointId {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok(KeypointId::$variant),)+
                    other => Err(Error::UnknownPart(other.to_owned())),
                }
            }
        }
    };
}

keypoints! {
    Nose => "nose",
    Neck => "neck",
    Chest => "chest",
    RightEye => "right_eye",
    LeftEye => "left_eye",
    RightEar => "right_ear",
    LeftEar => "left_ear",
    RightShoulder => "right_shoulder",
    LeftShoulder => "left_shoulder",
    RightElbow => "right_elbow",
    LeftElbow => "left_elbow",
    RightWrist => "right_wrist",
    LeftWrist => "left_wrist",
    RightHip => "right_hip",
    LeftHip => "left_hip",
    RightKnee => "right_knee",
    LeftKnee => "left_knee",
    RightAnkle => "right_ankle",
    LeftAnkle => "left_ankle",
}

impl KeypointId {
    /// Nose, eyes, ears, neck and shoulders.
    pub const UPPER_BODY: [KeypointId; 8] = [
        KeypointId::Nose,
        KeypointId::RightEye,
        KeypointId::LeftEye,
        KeypointId::RightEar,
        KeypointId::LeftEar,
        KeypointId::Neck,
        KeypointId::RightShoulder,
        KeypointId::LeftShoulder,
    ];

    pub fn is_upper_body(self) -> bool {
        Self::UPPER_BODY.contains(&self)
    }
}

impl fmt::Display for KeypointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for KeypointId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for KeypointId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One detected body part in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Keypoint2D {
    pub id: KeypointId,
    pub x: f64,
    pub y: f64,
    pub confidence: f64,
}

impl Keypoint2D {
    pub fn new(id: KeypointId, x: f64, y: f64, confidence: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite()) {
            return Err(Error::input(format!("keypoint {id} has non-finite coordinates")));
        }
        if !(0.0..=1.0).contains(&confidence) {
            return Err(Error::input(format!(
                "keypoint {id} confidence {confidence} outside [0, 1]"
            )));
        }
        Ok(Self {
            id,
            x,
            y,
            confidence,
        })
    }
}

/// The keypoints of one detected person; at most one per part.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PoseDetection2D {
    keypoints: Vec<Keypoint2D>,
}

impl PoseDetection2D {
    pub fn new(keypoints: Vec<Keypoint2D>) -> Result<Self> {
        let mut seen = [false; 19];
        for kp in &keypoints {
            let slot = &mut seen[kp.id as usize];
            if *slot {
                return Err(Error::input(format!("duplicate keypoint {}", kp.id)));
            }
            *slot = true;
        }
        Ok(Self { keypoints })
    }

    pub fn keypoints(&self) -> &[Keypoint2D] {
        &self.keypoints
    }

    pub fn get(&self, id: KeypointId) -> Option<&Keypoint2D> {
        self.keypoints.iter().find(|k| k.id == id)
    }

    pub fn len(&self) -> usize {
        self.keypoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keypoints.is_empty()
    }

    /// Keypoints whose confidence exceeds `floor`.
    pub fn detected(&self, floor: f64) -> PoseDetection2D {
        PoseDetection2D {
            keypoints: self
                .keypoints
                .iter()
                .filter(|k| k.confidence > floor)
                .copied()
                .collect(),
        }
    }
}

/// Mean confidence over the keypoints whose confidence exceeds `detection_floor`.
///
/// Returns 0 if no keypoint clears the floor.
pub fn average_confidence(pose: &PoseDetection2D, detection_floor: f64) -> f64 {
    let (sum, count) = pose
        .keypoints
        .iter()
        .filter(|k| k.confidence > detection_floor)
        .fold((0.0, 0usize), |(s, n), k| (s + k.confidence, n + 1));
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Joint {
    pub point: Point3,
    pub confidence: f64,
}

/// Keypoints lifted to the camera frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Skeleton3D {
    joints: BTreeMap<KeypointId, Joint>,
}

impl Skeleton3D {
    pub fn new(joints: BTreeMap<KeypointId, Joint>) -> Result<Self> {
        if joints.is_empty() {
            return Err(Error::input("a skeleton needs at least one joint"));
        }
        if let Some((id, _)) = joints.iter().find(|(_, j)| !j.point.is_finite()) {
            return Err(Error::input(format!("joint {id} is not finite")));
        }
        Ok(Self { joints })
    }

    /// Convenience constructor with unit confidence.
    pub fn from_points(points: impl IntoIterator<Item = (KeypointId, Point3)>) -> Result<Self> {
        Self::new(
            points
                .into_iter()
                .map(|(id, point)| {
                    (
                        id,
                        Joint {
                            point,
                            confidence: 1.0,
                        },
                    )
                })
                .collect(),
        )
    }

    pub fn joints(&self) -> &BTreeMap<KeypointId, Joint> {
        &self.joints
    }

    pub fn get(&self, id: KeypointId) -> Option<Point3> {
        self.joints.get(&id).map(|j| j.point)
    }

    pub fn len(&self) -> usize {
        self.joints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.joints.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = Point3> + '_ {
        self.joints.values().map(|j| j.point)
    }

    /// The same skeleton shifted by `offset`.
    pub fn translated(&self, offset: Point3) -> Skeleton3D {
        Skeleton3D {
            joints: self
                .joints
                .iter()
                .map(|(id, j)| {
                    (
                        *id,
                        Joint {
                            point: j.point + offset,
                            confidence: j.confidence,
                        },
                    )
                })
                .collect(),
        }
    }
}
