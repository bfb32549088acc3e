use serde::{Deserialize, Serialize};

use super::{Keypoint2D, KeypointId, PoseDetection2D};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct RawKeypoint {
    part: String,
    x: f64,
    y: f64,
    confidence: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawPerson {
    keypoints: Vec<RawKeypoint>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    timestamp: Option<f64>,
    people: Vec<RawPerson>,
}

/// A parsed keypoints file: the detected people and an optional timestamp.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct KeypointsDocument {
    pub timestamp: Option<f64>,
    pub people: Vec<PoseDetection2D>,
}

pub fn parse_keypoints_json(text: &str) -> Result<KeypointsDocument> {
    let raw: RawDocument = serde_json::from_str(text)?;
    if let Some(t) = raw.timestamp {
        if !t.is_finite() {
            return Err(Error::input("timestamp must be finite"));
        }
    }
    let people = raw
        .people
        .into_iter()
        .map(|person| {
            let kps = person
                .keypoints
                .into_iter()
                .map(|k| {
                    let id: KeypointId = k.part.parse()?;
                    Keypoint2D::new(id, k.x, k.y, k.confidence)
                })
                .collect::<Result<Vec<_>>>()?;
            PoseDetection2D::new(kps)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(KeypointsDocument {
        timestamp: raw.timestamp,
        people,
    })
}

pub fn to_keypoints_json(doc: &KeypointsDocument) -> Result<String> {
    let raw = RawDocument {
        timestamp: doc.timestamp,
        people: doc
            .people
            .iter()
            .map(|p| RawPerson {
                keypoints: p
                    .keypoints()
                    .iter()
                    .map(|k| RawKeypoint {
                        part: k.id.name().to_owned(),
                        x: k.x,
                        y: k.y,
                        confidence: k.confidence,
                    })
                    .collect(),
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&raw)?)
}
