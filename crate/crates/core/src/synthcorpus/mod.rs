//! Synthetic depth scenes with posed people and ground-truth labels.

mod archetype;
mod corpus;
mod render;
mod scenario;

pub use archetype::{Archetype, ArchetypeLibrary, BodyFrame, PropBox, REFERENCE_HEIGHT};
pub use corpus::{
    generate_corpus, labels_of, render_scenarios, sample_corpus, synthesize, write_session, FALL_ARCHETYPES,
    NON_FALL_ARCHETYPES,
};
pub use render::{
    fits_frustum, generate, generate_frames, generate_with_seed, joint_radius, place_person, visibility_radius, Floor,
    GeneratedFrame, PlacedPerson, HEAD_RADIUS,
};
pub use scenario::{CorpusSpec, FloorSpec, FurnitureBox, NoiseSpec, PersonSpec, ScenarioFile, ScenarioSpec, SynthCamera};
