use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::archetype::{Archetype, ArchetypeLibrary};
use super::render::{fits_frustum, generate_frames, GeneratedFrame};
use super::scenario::{CorpusSpec, FurnitureBox, PersonSpec, ScenarioFile, ScenarioSpec};
use crate::error::{Error, Result};
use crate::geometry::CameraIntrinsics;
use crate::pipeline::store::{init_session_dir, write_frame};
use crate::pipeline::Labels;
use crate::pose::KeypointsDocument;

pub const FALL_ARCHETYPES: [&str; 3] = ["lying_floor", "lying_ramp", "upper_body_off_couch"];
pub const NON_FALL_ARCHETYPES: [&str; 3] = ["standing", "kneeling", "sleeping_on_bed"];

const MAX_RESAMPLES: usize = 100;

fn sample_scene(archetype: &Archetype, rng: &mut ChaCha8Rng, spec: &CorpusSpec) -> ScenarioSpec {
    let mut s = ScenarioSpec::new(rng.random());
    let z = rng.random_range(2.8..=4.2);
    let half_width = 0.6 * z / 3.0;
    let x = rng.random_range(-half_width..=half_width);
    s.person.push(PersonSpec {
        archetype: archetype.name.clone(),
        position: [x, z],
        yaw_deg: rng.random_range(archetype.yaw_range[0]..archetype.yaw_range[1]),
        scale: rng.random_range(1.55..=1.85),
        fallen: None,
    });
    if archetype.name == "lying_ramp" {
        s.floor.slope_deg = rng.random_range(6.0..=12.0);
        s.floor.pivot_z = z;
    }
    if rng.random::<f64>() < spec.clutter {
        let side = if rng.random::<bool>() { 1.0 } else { -1.0 };
        s.furniture.push(FurnitureBox {
            position: [side * rng.random_range(1.6..=2.2), z + rng.random_range(-0.5..=1.0)],
            size: [
                rng.random_range(0.5..=1.0),
                rng.random_range(0.4..=0.9),
                rng.random_range(0.5..=1.0),
            ],
            elevation: 0.0,
        });
    }
    s.noise = spec.noise;
    s
}

/// Draws one single-person scenario per corpus item, in shuffled order.
pub fn sample_corpus(spec: &CorpusSpec, k: &CameraIntrinsics, lib: &ArchetypeLibrary) -> Result<Vec<ScenarioSpec>> {
    if !(0.0..=1.0).contains(&spec.clutter) {
        return Err(Error::Scenario("clutter must lie in [0, 1]".into()));
    }
    spec.noise.validate()?;
    let mut names: Vec<&str> = (0..spec.n_falls)
        .map(|i| FALL_ARCHETYPES[i % 3])
        .chain((0..spec.n_nonfalls).map(|i| NON_FALL_ARCHETYPES[i % 3]))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    names.shuffle(&mut rng);
    let mut out = Vec::with_capacity(names.len());
    for name in names {
        let mut scene_rng = ChaCha8Rng::seed_from_u64(rng.random());
        let mut accepted = None;
        for _ in 0..MAX_RESAMPLES {
            let s = sample_scene(lib.get(name)?, &mut scene_rng, spec);
            if fits_frustum(&s, k, lib)? {
                accepted = Some(s);
                break;
            }
        }
        let s = accepted.ok_or_else(|| {
            Error::Scenario(format!("could not place `{name}` inside the frustum in {MAX_RESAMPLES} draws"))
        })?;
        out.push(s);
    }
    Ok(out)
}

/// Renders scenarios in parallel; frame ids run consecutively from 0.
pub fn render_scenarios(
    scenarios: &[ScenarioSpec],
    k: &CameraIntrinsics,
    lib: &ArchetypeLibrary,
) -> Result<Vec<GeneratedFrame>> {
    let mut first = Vec::with_capacity(scenarios.len());
    let mut next = 0u64;
    for s in scenarios {
        first.push(next);
        next += u64::from(s.frames);
    }
    let per: Vec<Vec<GeneratedFrame>> = scenarios
        .par_iter()
        .zip(first)
        .map(|(s, id)| generate_frames(s, k, lib, id))
        .collect::<Result<_>>()?;
    Ok(per.into_iter().flatten().collect())
}

/// Samples and renders a labeled corpus in memory.
pub fn generate_corpus(spec: &CorpusSpec, k: &CameraIntrinsics, lib: &ArchetypeLibrary) -> Result<Vec<GeneratedFrame>> {
    render_scenarios(&sample_corpus(spec, k, lib)?, k, lib)
}

/// Ground-truth labels of rendered frames.
pub fn labels_of(frames: &[GeneratedFrame]) -> Labels {
    let mut labels = Labels::new();
    for f in frames {
        for (i, &fallen) in f.fallen.iter().enumerate() {
            labels.insert(f.bundle.frame_id, i, fallen);
        }
    }
    labels
}

/// Writes frames as a session directory with `labels.csv`.
pub fn write_session(out: &Path, k: &CameraIntrinsics, frames: &[GeneratedFrame]) -> Result<Labels> {
    init_session_dir(out, k, None)?;
    for f in frames {
        let doc = KeypointsDocument {
            timestamp: None,
            people: f.bundle.poses.clone(),
        };
        write_frame(out, f.bundle.frame_id, &f.bundle.depth, &doc)?;
    }
    let labels = labels_of(frames);
    labels.write_csv(&out.join(crate::pipeline::store::LABELS_FILE))?;
    Ok(labels)
}

/// Renders a scenario file into `out`. `base` resolves a relative
/// `archetype_dir`.
pub fn synthesize(file: &ScenarioFile, base: &Path, out: &Path) -> Result<Labels> {
    let mut lib = ArchetypeLibrary::builtin();
    if let Some(dir) = &file.archetype_dir {
        lib.load_dir(&base.join(dir))?;
    }
    let k = file.camera.intrinsics()?;
    let scenarios = match &file.corpus {
        Some(c) => sample_corpus(c, &k, &lib)?,
        None => file.scenario.clone(),
    };
    let frames = render_scenarios(&scenarios, &k, &lib)?;
    log::info!("rendered {} frames into {}", frames.len(), out.display());
    write_session(out, &k, &frames)
}
