//! The decision chain: confidence floor, body-size plausibility, then the
//! distance of the centre of gravity and the upper body to the ground.

mod plane;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::ground::{GroundLabeling, UpFrame};
use crate::pose::{KeypointId, LiftParams, Skeleton3D};

pub use plane::FittedPlane;

/// How the distance between a body point and the ground is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMode {
    /// Distance to the nearest ground point.
    #[default]
    Euclidean,
    /// Perpendicular height above a plane fitted to the ground points.
    PlaneHeight,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReasoningConfig {
    /// Poses with average confidence strictly below this are invalid.
    pub lambda_floor: f64,
    /// A keypoint counts as detected when its confidence exceeds this.
    pub detection_floor: f64,
    /// Smallest plausible skeleton box area, m².
    pub bsa_floor: f64,
    /// Fallen when a body point is strictly closer to the ground than this, meters.
    pub height_threshold: f64,
    /// Consecutive Fallen frames before a notification.
    pub dwell_frames: u32,
    /// Poses must exceed this average confidence to be processed at all.
    pub confidence_gate: f64,
    /// Half-width of the depth lookup window, pixels.
    pub depth_patch: u32,
    /// Fewest lifted joints accepted as a skeleton.
    pub min_joints: usize,
    pub distance_mode: DistanceMode,
}

impl Default for ReasoningConfig {
    fn default() -> Self {
        Self {
            lambda_floor: 0.5,
            detection_floor: 0.01,
            bsa_floor: 1.0,
            height_threshold: 0.7,
            dwell_frames: 3,
            confidence_gate: 0.6,
            depth_patch: 2,
            min_joints: 3,
            distance_mode: DistanceMode::Euclidean,
        }
    }
}

impl ReasoningConfig {
    pub fn validate(&self) -> Result<()> {
        let unit = |v: f64| v > 0.0 && v < 1.0;
        if !unit(self.lambda_floor) || !unit(self.detection_floor) {
            return Err(Error::Config("lambda_floor and detection_floor must lie in (0, 1)".into()));
        }
        if !(self.confidence_gate >= 0.0 && self.confidence_gate < 1.0) {
            return Err(Error::Config("confidence_gate must lie in [0, 1)".into()));
        }
        if !(self.bsa_floor > 0.0 && self.bsa_floor.is_finite()) {
            return Err(Error::Config("bsa_floor must be positive".into()));
        }
        if !(self.height_threshold > 0.0 && self.height_threshold.is_finite()) {
            return Err(Error::Config("height_threshold must be positive".into()));
        }
        if self.dwell_frames == 0 || self.min_joints == 0 {
            return Err(Error::Config("dwell_frames and min_joints must be positive".into()));
        }
        Ok(())
    }

    pub fn lift_params(&self) -> LiftParams {
        LiftParams {
            patch: self.depth_patch,
            min_joints: self.min_joints,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    NoPerson,
    InvalidDetection,
    NotFallen,
    Fallen,
}

/// Every intermediate measure behind one decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReasoningReport {
    pub lambda: f64,
    #[serde(rename = "box_area_m2")]
    pub box_area: Option<f64>,
    pub cog: Option<Point3>,
    pub ubc: Option<Point3>,
    #[serde(rename = "cog_ground_m")]
    pub cog_ground_distance: Option<f64>,
    #[serde(rename = "ubc_ground_m")]
    pub ubc_ground_distance: Option<f64>,
    pub decision: Decision,
    /// Set when no ground was available to measure against.
    pub inconclusive: bool,
}

impl ReasoningReport {
    pub fn no_person() -> Self {
        Self::bare(0.0, Decision::NoPerson)
    }

    pub fn invalid(lambda: f64) -> Self {
        Self::bare(lambda, Decision::InvalidDetection)
    }

    fn bare(lambda: f64, decision: Decision) -> Self {
        Self {
            lambda,
            box_area: None,
            cog: None,
            ubc: None,
            cog_ground_distance: None,
            ubc_ground_distance: None,
            decision,
            inconclusive: false,
        }
    }

    /// The closest of the recorded ground distances.
    pub fn min_ground_distance(&self) -> Option<f64> {
        match (self.cog_ground_distance, self.ubc_ground_distance) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    /// Re-derives the decision from the stored measures under another threshold.
    pub fn decide_with_threshold(&self, threshold: f64) -> Decision {
        match self.decision {
            Decision::Fallen | Decision::NotFallen if !self.inconclusive => match self.min_ground_distance() {
                Some(d) if d < threshold => Decision::Fallen,
                _ => Decision::NotFallen,
            },
            other => other,
        }
    }
}

/// Area of the joints' axis-aligned box across its two largest extents.
pub fn bounding_box_area(skeleton: &Skeleton3D) -> Result<f64> {
    if skeleton.len() < 3 {
        return Err(Error::InsufficientEvidence {
            joints: skeleton.len(),
            required: 3,
        });
    }
    let mut pts = skeleton.points();
    let first = pts.next().expect("non-empty");
    let (lo, hi) = pts.fold((first, first), |(lo, hi), p| (lo.min(p), hi.max(p)));
    let d = hi - lo;
    let mut e = [d.x, d.y, d.z];
    e.sort_by(|a, b| b.total_cmp(a));
    Ok(e[0] * e[1])
}

/// DuBois body surface area in m² from weight in kg and height in cm.
pub fn dubois_bsa(weight_kg: f64, height_cm: f64) -> Result<f64> {
    if !(weight_kg > 0.0 && height_cm > 0.0 && weight_kg.is_finite() && height_cm.is_finite()) {
        return Err(Error::input("weight and height must be positive"));
    }
    Ok(0.007184 * weight_kg.powf(0.425) * height_cm.powf(0.725))
}

fn mean(points: impl Iterator<Item = Point3>) -> Option<Point3> {
    let (sum, n) = points.fold((Point3::ORIGIN, 0usize), |(s, n), p| (s + p, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Unweighted mean of all joints.
pub fn center_of_gravity(skeleton: &Skeleton3D) -> Point3 {
    mean(skeleton.points()).expect("skeletons are never empty")
}

/// Mean of the nose, eyes, ears, neck and shoulders that are present.
pub fn upper_body_critical(skeleton: &Skeleton3D) -> Option<Point3> {
    mean(KeypointId::UPPER_BODY.iter().filter_map(|&id| skeleton.get(id)))
}

/// Distance from `point` to the nearest ground point.
pub fn ground_distance(point: Point3, labeling: &GroundLabeling) -> Result<f64> {
    labeling
        .ground
        .iter()
        .map(|g| (*g - point).dot(*g - point))
        .min_by(f64::total_cmp)
        .map(f64::sqrt)
        .ok_or(Error::NoGround)
}

/// Measures distances to the ground of a single frame.
#[derive(Debug, Clone)]
pub struct GroundReference<'a> {
    labeling: &'a GroundLabeling,
    plane: Option<FittedPlane>,
}

impl<'a> GroundReference<'a> {
    pub fn new(labeling: &'a GroundLabeling, mode: DistanceMode, up: Point3) -> Result<Self> {
        let plane = match mode {
            DistanceMode::PlaneHeight if !labeling.ground.is_empty() => {
                Some(FittedPlane::fit(&labeling.ground, UpFrame::new(up)?)?)
            }
            _ => None,
        };
        Ok(Self { labeling, plane })
    }

    pub fn has_ground(&self) -> bool {
        !self.labeling.ground.is_empty()
    }

    pub fn distance(&self, p: Point3) -> Result<f64> {
        match &self.plane {
            Some(plane) => Ok(plane.height(p)),
            None => ground_distance(p, self.labeling),
        }
    }
}

/// Runs the decision chain with the default up direction.
pub fn classify(
    skeleton: Option<&Skeleton3D>,
    lambda: f64,
    labeling: &GroundLabeling,
    cfg: &ReasoningConfig,
) -> Result<ReasoningReport> {
    let ground = GroundReference::new(labeling, cfg.distance_mode, UpFrame::default().up())?;
    Ok(classify_against(skeleton, lambda, &ground, cfg))
}

pub fn classify_against(
    skeleton: Option<&Skeleton3D>,
    lambda: f64,
    ground: &GroundReference<'_>,
    cfg: &ReasoningConfig,
) -> ReasoningReport {
    let Some(skeleton) = skeleton else {
        return ReasoningReport::no_person();
    };
    let box_area = bounding_box_area(skeleton).ok();
    let cog = center_of_gravity(skeleton);
    let ubc = upper_body_critical(skeleton);
    let mut report = ReasoningReport {
        lambda,
        box_area,
        cog: Some(cog),
        ubc,
        cog_ground_distance: None,
        ubc_ground_distance: None,
        decision: Decision::NotFallen,
        inconclusive: false,
    };
    if ground.has_ground() {
        report.cog_ground_distance = ground.distance(cog).ok();
        report.ubc_ground_distance = ubc.and_then(|u| ground.distance(u).ok());
    }
    if lambda < cfg.lambda_floor || box_area.is_none_or(|a| a < cfg.bsa_floor) {
        report.decision = Decision::InvalidDetection;
        return report;
    }
    if !ground.has_ground() {
        log::info!("no ground points in frame, decision is inconclusive");
        report.inconclusive = true;
        return report;
    }
    report.decision = report.decide_with_threshold(cfg.height_threshold);
    report
}
