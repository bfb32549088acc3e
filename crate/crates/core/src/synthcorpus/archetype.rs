use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::pose::KeypointId;

/// Height of the reference body the joint tables are written for.
pub const REFERENCE_HEIGHT: f64 = 1.75;

/// Which direction a body's up axis follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BodyFrame {
    Gravity,
    Floor,
}

/// A box carried with the archetype, in body coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropBox {
    pub center: [f64; 3],
    pub size: [f64; 3],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArchetypeFile {
    name: String,
    fallen: bool,
    frame: BodyFrame,
    scale_up: bool,
    #[serde(default)]
    base_up: f64,
    joints: BTreeMap<String, [f64; 3]>,
    #[serde(default)]
    props: Vec<PropBox>,
    #[serde(default = "full_turn")]
    yaw_range: [f64; 2],
}

fn full_turn() -> [f64; 2] {
    [0.0, 360.0]
}

/// A canonical body pose with its ground-truth label.
///
/// Joint coordinates are `[right, up, forward]` in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct Archetype {
    pub name: String,
    pub fallen: bool,
    pub frame: BodyFrame,
    /// Whether the up coordinate scales with body size.
    pub scale_up: bool,
    pub base_up: f64,
    pub joints: BTreeMap<KeypointId, [f64; 3]>,
    pub props: Vec<PropBox>,
    /// Yaw interval, degrees, that corpus sampling draws from.
    pub yaw_range: [f64; 2],
}

impl Archetype {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: ArchetypeFile = toml::from_str(text).map_err(|e| Error::Scenario(format!("archetype: {e}")))?;
        let mut joints = BTreeMap::new();
        for (part, xyz) in raw.joints {
            if !xyz.iter().all(|v| v.is_finite()) {
                return Err(Error::Scenario(format!("archetype {}: joint {part} is not finite", raw.name)));
            }
            joints.insert(part.parse::<KeypointId>()?, xyz);
        }
        if let Some(missing) = KeypointId::ALL.iter().find(|id| !joints.contains_key(id)) {
            return Err(Error::Scenario(format!("archetype {} lacks joint {missing}", raw.name)));
        }
        if raw.props.iter().any(|p| p.size.iter().any(|&s| s.is_nan() || s <= 0.0)) {
            return Err(Error::Scenario(format!("archetype {}: prop sizes must be positive", raw.name)));
        }
        let [lo, hi] = raw.yaw_range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Scenario(format!("archetype {}: yaw_range needs lo < hi", raw.name)));
        }
        Ok(Self {
            name: raw.name,
            fallen: raw.fallen,
            frame: raw.frame,
            scale_up: raw.scale_up,
            base_up: raw.base_up,
            joints,
            props: raw.props,
            yaw_range: raw.yaw_range,
        })
    }
}

const BUILTIN: [&str; 6] = [
    include_str!("../../archetypes/standing.toml"),
    include_str!("../../archetypes/kneeling.toml"),
    include_str!("../../archetypes/lying_floor.toml"),
    include_str!("../../archetypes/lying_ramp.toml"),
    include_str!("../../archetypes/upper_body_off_couch.toml"),
    include_str!("../../archetypes/sleeping_on_bed.toml"),
];

/// Archetypes by name.
#[derive(Debug, Clone)]
pub struct ArchetypeLibrary {
    by_name: BTreeMap<String, Archetype>,
}

impl ArchetypeLibrary {
    pub fn builtin() -> Self {
        let by_name = BUILTIN
            .iter()
            .map(|text| {
                let a = Archetype::from_toml_str(text).expect("built-in archetypes are valid");
                (a.name.clone(), a)
            })
            .collect();
        Self { by_name }
    }

    /// Adds or replaces archetypes from every `*.toml` file in `dir`.
    pub fn load_dir(&mut self, dir: &Path) -> Result<()> {
        let mut paths: Vec<_> = std::fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "toml"))
            .collect();
        paths.sort();
        for path in paths {
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let a = Archetype::from_toml_str(&text)?;
            self.by_name.insert(a.name.clone(), a);
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&Archetype> {
        self.by_name
            .get(name)
            .ok_or_else(|| Error::Scenario(format!("unknown archetype `{name}`")))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.by_name.keys().map(|s| s.as_str())
    }
}

impl Default for ArchetypeLibrary {
    fn default() -> Self {
        Self::builtin()
    }
}
