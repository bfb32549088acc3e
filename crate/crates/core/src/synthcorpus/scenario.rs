use std::path::Path;

use serde::{Deserialize, Serialize};

use super::archetype::ArchetypeLibrary;
use crate::error::{Error, Result};
use crate::geometry::CameraIntrinsics;

/// The floor plane seen by a level camera.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FloorSpec {
    /// Incline in degrees; positive rises away from the camera.
    pub slope_deg: f64,
    /// Height of the camera above the floor at `pivot_z`, meters.
    pub camera_height: f64,
    /// Depth at which `camera_height` is measured, meters.
    pub pivot_z: f64,
}

impl Default for FloorSpec {
    fn default() -> Self {
        Self {
            slope_deg: 0.0,
            camera_height: 1.2,
            pivot_z: 3.0,
        }
    }
}

/// A box resting on the floor, axis-aligned with the camera's x and z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FurnitureBox {
    /// Centre of the footprint, `[x, z]` in meters.
    pub position: [f64; 2],
    /// `[width along x, height, depth along z]` in meters.
    pub size: [f64; 3],
    /// Gap between the floor and the bottom face.
    #[serde(default)]
    pub elevation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PersonSpec {
    pub archetype: String,
    /// Footprint anchor `[x, z]` in meters.
    pub position: [f64; 2],
    /// Rotation about the body's up axis; 0 faces the camera.
    #[serde(default)]
    pub yaw_deg: f64,
    /// Standing height in meters.
    #[serde(default = "default_scale")]
    pub scale: f64,
    /// Ground-truth label; must agree with the archetype when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fallen: Option<bool>,
}

fn default_scale() -> f64 {
    1.75
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSpec {
    /// Standard deviation of additive depth noise, meters.
    pub depth_sigma: f64,
    /// Keypoint confidences are drawn uniformly from this range.
    pub confidence: [f64; 2],
    /// Probability that a keypoint is not reported.
    pub dropout: f64,
    /// Probability that a pixel has no depth.
    pub hole_probability: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            depth_sigma: 0.0,
            confidence: [0.9, 0.9],
            dropout: 0.0,
            hole_probability: 0.0,
        }
    }
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        let [lo, hi] = self.confidence;
        let p = |v: f64| (0.0..=1.0).contains(&v);
        if !(self.depth_sigma >= 0.0 && self.depth_sigma.is_finite()) {
            return Err(Error::Scenario("depth_sigma must be non-negative".into()));
        }
        if !(p(lo) && p(hi) && lo <= hi) {
            return Err(Error::Scenario("confidence range must lie in [0, 1] with lo <= hi".into()));
        }
        if !(p(self.dropout) && p(self.hole_probability)) {
            return Err(Error::Scenario("probabilities must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

/// Everything needed to render one synthetic frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub seed: u64,
    #[serde(default)]
    pub floor: FloorSpec,
    #[serde(default)]
    pub furniture: Vec<FurnitureBox>,
    #[serde(default)]
    pub person: Vec<PersonSpec>,
    #[serde(default)]
    pub noise: NoiseSpec,
    /// Farthest rendered surface, meters.
    #[serde(default = "default_max_range")]
    pub max_range: f64,
    /// Number of consecutive frames rendered from this scenario.
    #[serde(default = "default_frames")]
    pub frames: u32,
}

fn default_max_range() -> f64 {
    8.0
}

fn default_frames() -> u32 {
    1
}

impl ScenarioSpec {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            floor: FloorSpec::default(),
            furniture: Vec::new(),
            person: Vec::new(),
            noise: NoiseSpec::default(),
            max_range: default_max_range(),
            frames: 1,
        }
    }

    /// Checks ranges and archetype/label agreement.
    pub fn validate(&self, lib: &ArchetypeLibrary) -> Result<()> {
        let f = &self.floor;
        if !(f.slope_deg.abs() < 45.0 && f.camera_height > 0.0 && f.pivot_z.is_finite()) {
            return Err(Error::Scenario("floor slope must be within ±45° and camera_height positive".into()));
        }
        if !(self.max_range > 0.0 && self.max_range.is_finite()) {
            return Err(Error::Scenario("max_range must be positive".into()));
        }
        for b in &self.furniture {
            if b.size.iter().any(|&s| !(s > 0.0 && s.is_finite())) || !b.position.iter().all(|v| v.is_finite()) {
                return Err(Error::Scenario("furniture needs finite position and positive size".into()));
            }
        }
        for p in &self.person {
            let a = lib.get(&p.archetype)?;
            if let Some(label) = p.fallen {
                if label != a.fallen {
                    return Err(Error::Scenario(format!(
                        "archetype {} is {} but the scenario labels it {}",
                        a.name,
                        if a.fallen { "fallen" } else { "not fallen" },
                        if label { "fallen" } else { "not fallen" },
                    )));
                }
            }
            if !(p.scale > 0.5 && p.scale < 2.5 && p.yaw_deg.is_finite() && p.position.iter().all(|v| v.is_finite())) {
                return Err(Error::Scenario("person scale must lie in (0.5, 2.5) m".into()));
            }
        }
        self.noise.validate()
    }
}

/// Parameters of a sampled labeled corpus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSpec {
    pub n_falls: usize,
    pub n_nonfalls: usize,
    pub seed: u64,
    #[serde(default = "CorpusSpec::default_noise")]
    pub noise: NoiseSpec,
    /// Probability of adding an unrelated piece of furniture to a scene.
    #[serde(default = "CorpusSpec::default_clutter")]
    pub clutter: f64,
}

impl CorpusSpec {
    pub fn new(n_falls: usize, n_nonfalls: usize, seed: u64) -> Self {
        Self {
            n_falls,
            n_nonfalls,
            seed,
            noise: Self::default_noise(),
            clutter: Self::default_clutter(),
        }
    }

    /// Moderate noise: 1 cm depth sigma and 15% keypoint dropout.
    pub fn default_noise() -> NoiseSpec {
        NoiseSpec {
            depth_sigma: 0.01,
            confidence: [0.55, 0.95],
            dropout: 0.15,
            hole_probability: 0.01,
        }
    }

    fn default_clutter() -> f64 {
        0.5
    }
}

/// Camera block of a scenario file; defaults to a 320x240 sensor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthCamera {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
}

impl Default for SynthCamera {
    fn default() -> Self {
        Self {
            fx: 200.0,
            fy: 200.0,
            cx: 160.0,
            cy: 120.0,
            width: 320,
            height: 240,
        }
    }
}

impl SynthCamera {
    pub fn intrinsics(&self) -> Result<CameraIntrinsics> {
        CameraIntrinsics::new(self.fx, self.fy, self.cx, self.cy, self.width, self.height)
    }
}

/// Contents of a `synth` input file: explicit scenarios or a sampled corpus.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub camera: SynthCamera,
    /// Extra directory of archetype files.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub archetype_dir: Option<String>,
    #[serde(default)]
    pub scenario: Vec<ScenarioSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corpus: Option<CorpusSpec>,
}

impl ScenarioFile {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let f: ScenarioFile = toml::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
        if f.scenario.is_empty() == f.corpus.is_none() {
            return Err(Error::Scenario("give either [[scenario]] entries or a [corpus] table".into()));
        }
        Ok(f)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }
}
