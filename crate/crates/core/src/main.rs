use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use falldet::ground::write_ply;
use falldet::pipeline::{
    argmax_threshold, evaluate, is_single_peaked, run_session, run_session_with, sink_for_target, sweep_csv,
    threshold_range, threshold_sweep, Config, Labels, NullSink, SessionDir, Sink,
};
use falldet::synthcorpus::{synthesize, ScenarioFile};
use falldet::{Error, Result};

#[derive(Parser)]
#[command(name = "falldet", version, about = "Fallen-person detection from depth frames and 2D keypoints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify every frame of a session directory.
    Classify {
        session: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the session result here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write each frame's ground labeling to <session>/ground_dump/.
        #[arg(long)]
        dump_ground: bool,
        /// Notification target: an http(s) URL or an NDJSON file path.
        #[arg(long)]
        notify: Option<String>,
    },
    /// Accuracy against the height threshold.
    Sweep {
        session: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        min: f64,
        #[arg(long, default_value_t = 1.5)]
        max: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Labels file; defaults to <session>/labels.csv.
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Confusion counts, accuracy and true-positive rate.
    Eval {
        session: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Render a scenario file into a session directory.
    Synth {
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_config(path: Option<&Path>) -> Result<Config> {
    match path {
        Some(p) => Config::load(p),
        None => Ok(Config::default()),
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_owned(),
        source: e,
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Classify {
            session,
            config,
            report,
            dump_ground,
            notify,
        } => {
            let cfg = load_config(config.as_deref())?;
            let dir = SessionDir::open(&session)?;
            let labels = dir.labels()?;
            let mut sink: Box<dyn Sink + Send> = match &notify {
                Some(target) => sink_for_target(target)?,
                None => Box::new(NullSink),
            };
            let dump_dir = session.join("ground_dump");
            if dump_ground {
                std::fs::create_dir_all(&dump_dir).map_err(|e| Error::Io {
                    path: dump_dir.clone(),
                    source: e,
                })?;
            }
            let result = run_session_with(
                dir.bundles(),
                &cfg.reasoning,
                &cfg.ground,
                sink.as_mut(),
                labels.as_ref(),
                |bundle, analysis| {
                    if dump_ground {
                        write_ply(
                            &dump_dir.join(format!("frame_{:06}.ply", bundle.frame_id)),
                            &analysis.labeling,
                        )?;
                    }
                    Ok(())
                },
            )?;
            let mut json = result.to_json()?;
            json.push('\n');
            match report {
                Some(path) => write_text(&path, &json)?,
                None => print!("{json}"),
            }
            log::info!(
                "{} frames, {} notifications",
                result.frames.len(),
                result.notifications.len()
            );
        }
        Command::Sweep {
            session,
            min,
            max,
            step,
            out,
            config,
            labels,
        } => {
            let cfg = load_config(config.as_deref())?;
            let dir = SessionDir::open(&session)?;
            let labels = match labels {
                Some(p) => Labels::read_csv(&p)?,
                None => dir
                    .labels()?
                    .ok_or_else(|| Error::Unlabeled(format!("{} has no labels.csv", session.display())))?,
            };
            let thresholds = threshold_range(min, max, step)?;
            let result = run_session(dir.bundles(), &cfg.reasoning, &cfg.ground, &mut NullSink, None)?;
            let points = threshold_sweep(&result.reports_by_frame(), &labels, &thresholds)?;
            write_text(&out, &sweep_csv(&points))?;
            if let Some(best) = argmax_threshold(&points) {
                log::info!("best threshold {best:.3} m, single-peaked: {}", is_single_peaked(&points));
            }
        }
        Command::Eval {
            session,
            labels,
            out,
            config,
        } => {
            let cfg = load_config(config.as_deref())?;
            let dir = SessionDir::open(&session)?;
            let labels = Labels::read_csv(&labels)?;
            let result = run_session(dir.bundles(), &cfg.reasoning, &cfg.ground, &mut NullSink, None)?;
            let metrics = evaluate(&result.reports_by_frame(), &labels);
            let mut json = serde_json::to_string_pretty(&metrics)?;
            json.push('\n');
            write_text(&out, &json)?;
        }
        Command::Synth { scenario, out } => {
            let file = ScenarioFile::load(&scenario)?;
            let base = scenario.parent().unwrap_or(Path::new("."));
            let labels = synthesize(&file, base, &out)?;
            log::info!("wrote {} labeled detections", labels.len());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("falldet: {e}");
            ExitCode::FAILURE
        }
    }
}
