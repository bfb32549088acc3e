//! Per-frame orchestration, sessions, notifications and evaluation.

mod config;
mod frame;
mod metrics;
mod notify;
mod session;
pub mod store;
mod sweep;

pub use config::Config;
pub use frame::{analyze_frame, frame_ground, process_frame, reports_for, FrameAnalysis, FrameBundle};
pub use metrics::{evaluate, score, Labels, Metrics};
pub use notify::{sink_for_target, HttpSink, MemorySink, NdjsonSink, NotificationEvent, NullSink, Sink};
pub use session::{run_session, run_session_with, DwellTracker, FrameResult, SessionResult};
pub use store::SessionDir;
pub use sweep::{argmax_threshold, is_single_peaked, sweep_csv, threshold_range, threshold_sweep, SweepPoint};
