use crate::error::{Error, Result};
use crate::geometry::{cloud_from_depth, voxel_downsample, CameraIntrinsics, DepthFrame};
use crate::ground::{progressive_filter, GroundFilterParams, GroundLabeling};
use crate::pose::{average_confidence, lift_pose, PoseDetection2D};
use crate::reasoning::{classify_against, GroundReference, ReasoningConfig, ReasoningReport};

/// One frame's input: depth, intrinsics and the detected poses.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameBundle {
    pub frame_id: u64,
    pub timestamp: f64,
    pub depth: DepthFrame,
    pub intrinsics: CameraIntrinsics,
    pub poses: Vec<PoseDetection2D>,
}

impl FrameBundle {
    pub fn validate(&self) -> Result<()> {
        self.intrinsics.validate()?;
        if !self.depth.matches(&self.intrinsics) {
            return Err(Error::input(format!(
                "frame {}: depth is {}x{}, intrinsics are {}x{}",
                self.frame_id,
                self.depth.width(),
                self.depth.height(),
                self.intrinsics.width,
                self.intrinsics.height
            )));
        }
        if !self.timestamp.is_finite() {
            return Err(Error::input(format!("frame {}: timestamp is not finite", self.frame_id)));
        }
        Ok(())
    }
}

/// Ground labeling and per-person reports of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameAnalysis {
    pub labeling: GroundLabeling,
    pub reports: Vec<ReasoningReport>,
}

/// Extracts the ground of the frame's downsampled cloud.
pub fn frame_ground(bundle: &FrameBundle, gp: &GroundFilterParams) -> Result<GroundLabeling> {
    let cloud = cloud_from_depth(&bundle.depth, &bundle.intrinsics)?;
    let cloud = voxel_downsample(&cloud, gp.cell_size)?;
    if cloud.is_empty() {
        return Ok(GroundLabeling::default());
    }
    progressive_filter(&cloud, gp)
}

/// Reasons about every pose of a frame against an already computed ground.
pub fn reports_for(
    bundle: &FrameBundle,
    labeling: &GroundLabeling,
    cfg: &ReasoningConfig,
    gp: &GroundFilterParams,
) -> Result<Vec<ReasoningReport>> {
    if bundle.poses.is_empty() {
        return Ok(vec![ReasoningReport::no_person()]);
    }
    let ground = GroundReference::new(labeling, cfg.distance_mode, gp.up)?;
    Ok(bundle
        .poses
        .iter()
        .enumerate()
        .map(|(i, pose)| {
            let lambda = average_confidence(pose, cfg.detection_floor);
            if lambda <= cfg.confidence_gate {
                log::debug!("frame {} person {i}: confidence {lambda:.3} below gate", bundle.frame_id);
                return ReasoningReport::invalid(lambda);
            }
            let detected = pose.detected(cfg.detection_floor);
            match lift_pose(&detected, &bundle.depth, &bundle.intrinsics, cfg.lift_params()) {
                Ok(skeleton) => classify_against(Some(&skeleton), lambda, &ground, cfg),
                Err(e) => {
                    log::debug!("frame {} person {i}: {e}", bundle.frame_id);
                    ReasoningReport::invalid(lambda)
                }
            }
        })
        .collect())
}

pub fn analyze_frame(bundle: &FrameBundle, cfg: &ReasoningConfig, gp: &GroundFilterParams) -> Result<FrameAnalysis> {
    bundle.validate()?;
    let labeling = frame_ground(bundle, gp)?;
    let reports = reports_for(bundle, &labeling, cfg, gp)?;
    Ok(FrameAnalysis { labeling, reports })
}

/// One report per pose, or a single `NoPerson` report for a frame without poses.
pub fn process_frame(
    bundle: &FrameBundle,
    cfg: &ReasoningConfig,
    gp: &GroundFilterParams,
) -> Result<Vec<ReasoningReport>> {
    Ok(analyze_frame(bundle, cfg, gp)?.reports)
}
