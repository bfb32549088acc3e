//! Fallen-person detection from a depth frame and 2D pose keypoints.
//!
//! Keypoints are lifted into the camera frame, the floor is extracted from the
//! depth cloud with a progressive morphological filter, and the distance of the
//! body's centre of gravity and upper body to the floor decides the outcome.

pub mod error;
pub mod geometry;
pub mod ground;
pub mod pipeline;
pub mod pose;
pub mod reasoning;
pub mod synthcorpus;

pub use error::{Error, Result};
