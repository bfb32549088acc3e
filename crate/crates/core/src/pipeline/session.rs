use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::frame::{analyze_frame, FrameAnalysis, FrameBundle};
use super::metrics::{evaluate, Labels, Metrics};
use super::notify::{deliver, NotificationEvent, Sink};
use crate::error::{Error, Result};
use crate::ground::GroundFilterParams;
use crate::reasoning::{Decision, ReasoningConfig, ReasoningReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameResult {
    pub frame_id: u64,
    pub timestamp: f64,
    pub reports: Vec<ReasoningReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionResult {
    pub frames: Vec<FrameResult>,
    pub notifications: Vec<NotificationEvent>,
    pub metrics: Option<Metrics>,
}

impl SessionResult {
    pub fn reports_by_frame(&self) -> BTreeMap<u64, Vec<ReasoningReport>> {
        self.frames.iter().map(|f| (f.frame_id, f.reports.clone())).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Counts consecutive Fallen frames per person index.
#[derive(Debug, Clone)]
pub struct DwellTracker {
    dwell: u32,
    streaks: Vec<u32>,
}

impl DwellTracker {
    pub fn new(dwell: u32) -> Self {
        Self {
            dwell: dwell.max(1),
            streaks: Vec::new(),
        }
    }

    /// Person indices whose streak reaches the dwell length in this frame.
    pub fn observe(&mut self, reports: &[ReasoningReport]) -> Vec<usize> {
        self.streaks.resize(self.streaks.len().max(reports.len()), 0);
        let mut due = Vec::new();
        for (i, streak) in self.streaks.iter_mut().enumerate() {
            match reports.get(i) {
                Some(r) if r.decision == Decision::Fallen => {
                    *streak += 1;
                    if *streak == self.dwell {
                        due.push(i);
                    }
                }
                _ => *streak = 0,
            }
        }
        due
    }
}

pub fn run_session<I>(
    bundles: I,
    cfg: &ReasoningConfig,
    gp: &GroundFilterParams,
    sink: &mut dyn Sink,
    labels: Option<&Labels>,
) -> Result<SessionResult>
where
    I: IntoIterator<Item = Result<FrameBundle>>,
{
    run_session_with(bundles, cfg, gp, sink, labels, |_, _| Ok(()))
}

/// Like [`run_session`], calling `on_frame` for each frame in commit order.
///
/// Frames are analysed in parallel batches and committed in frame order; the
/// dwell tracker and the sink only see the committing thread.
pub fn run_session_with<I, F>(
    bundles: I,
    cfg: &ReasoningConfig,
    gp: &GroundFilterParams,
    sink: &mut dyn Sink,
    labels: Option<&Labels>,
    mut on_frame: F,
) -> Result<SessionResult>
where
    I: IntoIterator<Item = Result<FrameBundle>>,
    F: FnMut(&FrameBundle, &FrameAnalysis) -> Result<()>,
{
    cfg.validate()?;
    gp.validate()?;
    let batch = rayon::current_num_threads().max(1) * 2;
    let mut iter = bundles.into_iter();
    let mut tracker = DwellTracker::new(cfg.dwell_frames);
    let mut frames = Vec::new();
    let mut notifications = Vec::new();
    let mut last_id: Option<u64> = None;
    loop {
        let chunk = iter.by_ref().take(batch).collect::<Result<Vec<_>>>()?;
        if chunk.is_empty() {
            break;
        }
        for b in &chunk {
            if last_id.is_some_and(|id| b.frame_id <= id) {
                return Err(Error::input(format!(
                    "frame ids must increase strictly, got {} after {}",
                    b.frame_id,
                    last_id.unwrap()
                )));
            }
            last_id = Some(b.frame_id);
        }
        let analyses = chunk
            .par_iter()
            .map(|b| analyze_frame(b, cfg, gp))
            .collect::<Result<Vec<_>>>()?;
        for (bundle, analysis) in chunk.iter().zip(analyses) {
            on_frame(bundle, &analysis)?;
            for person_index in tracker.observe(&analysis.reports) {
                let event = NotificationEvent {
                    frame_id: bundle.frame_id,
                    timestamp: bundle.timestamp,
                    person_index,
                    report: analysis.reports[person_index].clone(),
                };
                deliver(sink, &event);
                notifications.push(event);
            }
            frames.push(FrameResult {
                frame_id: bundle.frame_id,
                timestamp: bundle.timestamp,
                reports: analysis.reports,
            });
        }
    }
    let mut result = SessionResult {
        frames,
        notifications,
        metrics: None,
    };
    if let Some(labels) = labels {
        result.metrics = Some(evaluate(&result.reports_by_frame(), labels));
    }
    Ok(result)
}
