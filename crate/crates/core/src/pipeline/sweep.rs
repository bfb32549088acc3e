use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::metrics::{score, Labels};
use crate::error::{Error, Result};
use crate::reasoning::ReasoningReport;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub threshold: f64,
    pub accuracy: f64,
}

/// `min, min + step, ...` up to and including `max`.
pub fn threshold_range(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && min.is_finite() && max.is_finite() && min <= max) {
        return Err(Error::input("sweep needs finite min <= max and a positive step"));
    }
    let n = ((max - min) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| min + i as f64 * step).collect())
}

/// Accuracy of the cached reports under each threshold.
pub fn threshold_sweep(
    reports: &BTreeMap<u64, Vec<ReasoningReport>>,
    labels: &Labels,
    thresholds: &[f64],
) -> Result<Vec<SweepPoint>> {
    if labels.is_empty() {
        return Err(Error::Unlabeled("no labels supplied".into()));
    }
    if let Some(id) = reports.keys().find(|&&id| !labels.has_frame(id)) {
        return Err(Error::Unlabeled(format!("frame {id} has no label")));
    }
    Ok(thresholds
        .iter()
        .map(|&t| {
            let m = score(labels, |frame, person| {
                reports
                    .get(&frame)
                    .and_then(|r| r.get(person))
                    .map(|r| r.decide_with_threshold(t))
            });
            SweepPoint {
                threshold: t,
                accuracy: m.accuracy.unwrap_or(0.0),
            }
        })
        .collect())
}

pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut out = String::from("threshold_m,accuracy\n");
    for p in points {
        writeln!(out, "{:.6},{:.6}", p.threshold, p.accuracy).unwrap();
    }
    out
}

/// Centre of the first run of maximal accuracy.
pub fn argmax_threshold(points: &[SweepPoint]) -> Option<f64> {
    let best = points.iter().map(|p| p.accuracy).fold(f64::NEG_INFINITY, f64::max);
    let start = points.iter().position(|p| p.accuracy == best)?;
    let len = points[start..].iter().take_while(|p| p.accuracy == best).count();
    Some(0.5 * (points[start].threshold + points[start + len - 1].threshold))
}

/// True when accuracy never rises again after it has started to fall.
pub fn is_single_peaked(points: &[SweepPoint]) -> bool {
    let mut falling = false;
    for w in points.windows(2) {
        if w[1].accuracy < w[0].accuracy {
            falling = true;
        } else if w[1].accuracy > w[0].accuracy && falling {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reasoning::Decision;

    fn pts(acc: &[f64]) -> Vec<SweepPoint> {
        acc.iter()
            .enumerate()
            .map(|(i, &a)| SweepPoint {
                threshold: 0.1 * (i + 1) as f64,
                accuracy: a,
            })
            .collect()
    }

    #[test]
    fn range_includes_max() {
        let r = threshold_range(0.1, 1.5, 0.05).unwrap();
        assert_eq!(r.len(), 29);
        assert!((r[28] - 1.5).abs() < 1e-12);
        assert!(threshold_range(1.0, 0.5, 0.1).is_err());
        assert!(threshold_range(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn plateau_midpoint() {
        let p = pts(&[0.5, 0.7, 0.9, 0.9, 0.9, 0.6]);
        assert!((argmax_threshold(&p).unwrap() - 0.4).abs() < 1e-12);
        assert!(is_single_peaked(&p));
        assert!(!is_single_peaked(&pts(&[0.5, 0.9, 0.6, 0.8])));
        assert!(is_single_peaked(&pts(&[0.5, 0.5, 0.5])));
    }

    #[test]
    fn csv_format() {
        assert_eq!(sweep_csv(&pts(&[0.5, 0.75])), "threshold_m,accuracy\n0.100000,0.500000\n0.200000,0.750000\n");
    }

    fn report(decision: Decision, d: f64) -> Vec<ReasoningReport> {
        let mut r = ReasoningReport::invalid(0.9);
        r.decision = decision;
        r.cog_ground_distance = Some(d);
        vec![r]
    }

    #[test]
    fn extremes() {
        let reports = BTreeMap::from([
            (0, report(Decision::Fallen, 0.2)),
            (1, report(Decision::NotFallen, 1.1)),
            (2, report(Decision::Fallen, 0.3)),
        ]);
        let mut labels = Labels::new();
        labels.insert(0, 0, true);
        labels.insert(1, 0, false);
        labels.insert(2, 0, true);
        let s = threshold_sweep(&reports, &labels, &[0.0, 0.7, 5.0]).unwrap();
        assert!((s[0].accuracy - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(s[1].accuracy, 1.0);
        assert!((s[2].accuracy - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn unlabeled_frames_are_rejected() {
        let reports = BTreeMap::from([(0, report(Decision::Fallen, 0.2))]);
        assert!(matches!(threshold_sweep(&reports, &Labels::new(), &[0.7]), Err(Error::Unlabeled(_))));
        let mut labels = Labels::new();
        labels.insert(1, 0, true);
        assert!(threshold_sweep(&reports, &labels, &[0.7]).is_err());
    }
}
