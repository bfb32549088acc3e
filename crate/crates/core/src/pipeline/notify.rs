use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reasoning::ReasoningReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NotificationEvent {
    pub frame_id: u64,
    pub timestamp: f64,
    pub person_index: usize,
    pub report: ReasoningReport,
}

/// Destination for fall notifications.
pub trait Sink {
    fn send(&mut self, event: &NotificationEvent) -> Result<()>;
}

/// Discards everything.
#[derive(Debug, Default)]
pub struct NullSink;

impl Sink for NullSink {
    fn send(&mut self, _: &NotificationEvent) -> Result<()> {
        Ok(())
    }
}

/// Keeps events in memory.
#[derive(Debug, Default)]
pub struct MemorySink {
    pub events: Vec<NotificationEvent>,
}

impl Sink for MemorySink {
    fn send(&mut self, event: &NotificationEvent) -> Result<()> {
        self.events.push(event.clone());
        Ok(())
    }
}

/// Appends one JSON object per line.
#[derive(Debug)]
pub struct NdjsonSink {
    path: PathBuf,
    file: File,
}

impl NdjsonSink {
    pub fn create(path: &Path) -> Result<Self> {
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| Error::io(path, e))?;
        Ok(Self {
            path: path.to_owned(),
            file,
        })
    }
}

impl Sink for NdjsonSink {
    fn send(&mut self, event: &NotificationEvent) -> Result<()> {
        let mut line = serde_json::to_string(event)?;
        line.push('\n');
        self.file
            .write_all(line.as_bytes())
            .and_then(|_| self.file.flush())
            .map_err(|e| Error::io(&self.path, e))
    }
}

/// POSTs each event as JSON.
#[derive(Debug)]
pub struct HttpSink {
    url: String,
    agent: ureq::Agent,
}

impl HttpSink {
    pub const TIMEOUT: Duration = Duration::from_secs(2);

    pub fn new(url: impl Into<String>) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Self::TIMEOUT))
            .build()
            .into();
        Self { url: url.into(), agent }
    }
}

impl Sink for HttpSink {
    fn send(&mut self, event: &NotificationEvent) -> Result<()> {
        let body = serde_json::to_string(event)?;
        self.agent
            .post(&self.url)
            .header("Content-Type", "application/json")
            .send(body.as_str())
            .map(|_| ())
            .map_err(|e| Error::Sink(format!("POST {}: {e}", self.url)))
    }
}

/// Picks an HTTP sink for `http://` and `https://` targets, a file otherwise.
pub fn sink_for_target(target: &str) -> Result<Box<dyn Sink + Send>> {
    if target.starts_with("http://") || target.starts_with("https://") {
        Ok(Box::new(HttpSink::new(target)))
    } else {
        Ok(Box::new(NdjsonSink::create(Path::new(target))?))
    }
}

/// Sends once, retries once, then gives up with a log line.
pub(crate) fn deliver(sink: &mut dyn Sink, event: &NotificationEvent) -> bool {
    for attempt in 1..=2 {
        match sink.send(event) {
            Ok(()) => return true,
            Err(e) if attempt == 1 => log::warn!("notification for frame {} failed, retrying: {e}", event.frame_id),
            Err(e) => log::error!("notification for frame {} dropped: {e}", event.frame_id),
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::{BufRead, BufReader, Read};
    use std::net::TcpListener;

    fn event(frame_id: u64) -> NotificationEvent {
        NotificationEvent {
            frame_id,
            timestamp: frame_id as f64 * 0.1,
            person_index: 0,
            report: ReasoningReport::invalid(0.4),
        }
    }

    #[test]
    fn ndjson_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("events.ndjson");
        let mut sink = NdjsonSink::create(&path).unwrap();
        sink.send(&event(3)).unwrap();
        sink.send(&event(4)).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<NotificationEvent> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(lines, vec![event(3), event(4)]);
    }

    struct Flaky {
        failures: usize,
        calls: usize,
    }

    impl Sink for Flaky {
        fn send(&mut self, _: &NotificationEvent) -> Result<()> {
            self.calls += 1;
            if self.calls <= self.failures {
                Err(Error::Sink("down".into()))
            } else {
                Ok(())
            }
        }
    }

    #[test]
    fn one_retry() {
        let mut s = Flaky { failures: 1, calls: 0 };
        assert!(deliver(&mut s, &event(1)));
        assert_eq!(s.calls, 2);
        let mut s = Flaky { failures: 5, calls: 0 };
        assert!(!deliver(&mut s, &event(1)));
        assert_eq!(s.calls, 2);
    }

    #[test]
    fn http_post_body() {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}/alarm", listener.local_addr().unwrap());
        let server = std::thread::spawn(move || {
            let (stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut len = 0;
            let mut request_line = String::new();
            reader.read_line(&mut request_line).unwrap();
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                if line == "\r\n" {
                    break;
                }
                if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                    len = v.trim().parse().unwrap();
                }
            }
            let mut body = vec![0; len];
            reader.read_exact(&mut body).unwrap();
            let mut stream = stream;
            stream.write_all(b"HTTP/1.1 204 No Content\r\nContent-Length: 0\r\n\r\n").unwrap();
            (request_line, String::from_utf8(body).unwrap())
        });
        let mut sink = HttpSink::new(url);
        sink.send(&event(7)).unwrap();
        let (line, body) = server.join().unwrap();
        assert!(line.starts_with("POST /alarm"));
        let got: NotificationEvent = serde_json::from_str(&body).unwrap();
        assert_eq!(got, event(7));
    }

    #[test]
    fn unreachable_http_is_an_error() {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}/", listener.local_addr().unwrap());
        drop(listener);
        assert!(matches!(HttpSink::new(url).send(&event(1)), Err(Error::Sink(_))));
    }
}
