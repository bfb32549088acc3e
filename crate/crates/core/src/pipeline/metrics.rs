use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reasoning::{Decision, ReasoningReport};

/// Ground-truth fallen flags keyed by `(frame_id, person_index)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Labels {
    map: BTreeMap<(u64, usize), bool>,
}

#[derive(Debug, Serialize, Deserialize)]
struct LabelRow {
    frame_id: u64,
    person_index: usize,
    label: String,
}

fn parse_label(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "fallen" | "1" | "true" => Some(true),
        "not_fallen" | "0" | "false" => Some(false),
        _ => None,
    }
}

impl Labels {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, frame_id: u64, person_index: usize, fallen: bool) {
        self.map.insert((frame_id, person_index), fallen);
    }

    pub fn get(&self, frame_id: u64, person_index: usize) -> Option<bool> {
        self.map.get(&(frame_id, person_index)).copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((u64, usize), bool)> + '_ {
        self.map.iter().map(|(k, v)| (*k, *v))
    }

    pub fn has_frame(&self, frame_id: u64) -> bool {
        self.map.range((frame_id, 0)..=(frame_id, usize::MAX)).next().is_some()
    }

    pub fn from_csv_reader(reader: impl std::io::Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let mut labels = Labels::new();
        for row in rdr.deserialize() {
            let row: LabelRow = row?;
            let fallen = parse_label(&row.label)
                .ok_or_else(|| Error::input(format!("unrecognized label `{}`", row.label)))?;
            if labels.map.insert((row.frame_id, row.person_index), fallen).is_some() {
                return Err(Error::input(format!(
                    "duplicate label for frame {} person {}",
                    row.frame_id, row.person_index
                )));
            }
        }
        Ok(labels)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_reader(file)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for ((frame_id, person_index), fallen) in self.iter() {
            w.serialize(LabelRow {
                frame_id,
                person_index,
                label: if fallen { "fallen" } else { "not_fallen" }.into(),
            })?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Confusion counts with Fallen as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub labeled: usize,
    pub accuracy: Option<f64>,
    pub true_positive_rate: Option<f64>,
}

impl Metrics {
    pub fn from_counts(tp: usize, fp: usize, tn: usize, fn_: usize) -> Self {
        let labeled = tp + fp + tn + fn_;
        let ratio = |a: usize, b: usize| (b > 0).then(|| a as f64 / b as f64);
        Self {
            tp,
            fp,
            tn,
            fn_,
            labeled,
            accuracy: ratio(tp + tn, labeled),
            true_positive_rate: ratio(tp, tp + fn_),
        }
    }
}

/// Scores a decision lookup against the labels. A label without a matching
/// report counts as a negative prediction.
pub fn score(labels: &Labels, mut decision: impl FnMut(u64, usize) -> Option<Decision>) -> Metrics {
    let (mut tp, mut fp, mut tn, mut fn_) = (0, 0, 0, 0);
    for ((frame, person), fallen) in labels.iter() {
        let predicted = decision(frame, person) == Some(Decision::Fallen);
        match (fallen, predicted) {
            (true, true) => tp += 1,
            (false, true) => fp += 1,
            (false, false) => tn += 1,
            (true, false) => fn_ += 1,
        }
    }
    Metrics::from_counts(tp, fp, tn, fn_)
}

/// Scores reports keyed by frame id.
pub fn evaluate(reports: &BTreeMap<u64, Vec<ReasoningReport>>, labels: &Labels) -> Metrics {
    score(labels, |frame, person| {
        reports.get(&frame).and_then(|r| r.get(person)).map(|r| r.decision)
    })
}
