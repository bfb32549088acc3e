//! Session directories: `frame_%06d.depth`, `frame_%06d.keypoints.json`,
//! `intrinsics.toml` and an optional `labels.csv`.

use std::path::{Path, PathBuf};

use super::frame::FrameBundle;
use super::metrics::Labels;
use crate::error::{Error, Result};
use crate::geometry::{
    read_depth_file, read_intrinsics_file, write_depth_dpth, write_intrinsics_file, CameraFile, CameraIntrinsics,
    DepthFrame, SensorRange,
};
use crate::pose::{parse_keypoints_json, to_keypoints_json, KeypointsDocument};

pub const INTRINSICS_FILE: &str = "intrinsics.toml";
pub const LABELS_FILE: &str = "labels.csv";

pub fn depth_file_name(frame_id: u64) -> String {
    format!("frame_{frame_id:06}.depth")
}

pub fn keypoints_file_name(frame_id: u64) -> String {
    format!("frame_{frame_id:06}.keypoints.json")
}

fn frame_id_of(name: &str) -> Option<u64> {
    let digits = name.strip_prefix("frame_")?.strip_suffix(".depth")?;
    (digits.len() >= 6 && digits.bytes().all(|b| b.is_ascii_digit()))
        .then(|| digits.parse().ok())
        .flatten()
}

#[derive(Debug, Clone)]
pub struct SessionDir {
    root: PathBuf,
    intrinsics: CameraIntrinsics,
    range: SensorRange,
    frame_ids: Vec<u64>,
}

impl SessionDir {
    pub fn open(root: &Path) -> Result<Self> {
        let (intrinsics, range) = read_intrinsics_file(&root.join(INTRINSICS_FILE))?;
        let mut frame_ids = Vec::new();
        for entry in std::fs::read_dir(root).map_err(|e| Error::io(root, e))? {
            let entry = entry.map_err(|e| Error::io(root, e))?;
            if let Some(id) = entry.file_name().to_str().and_then(frame_id_of) {
                frame_ids.push(id);
            }
        }
        frame_ids.sort_unstable();
        for &id in &frame_ids {
            let kp = root.join(keypoints_file_name(id));
            if !kp.is_file() {
                return Err(Error::input(format!("frame {id} has depth but no {}", kp.display())));
            }
        }
        Ok(Self {
            root: root.to_owned(),
            intrinsics,
            range,
            frame_ids,
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn intrinsics(&self) -> &CameraIntrinsics {
        &self.intrinsics
    }

    pub fn frame_ids(&self) -> &[u64] {
        &self.frame_ids
    }

    /// Reads `labels.csv` if present.
    pub fn labels(&self) -> Result<Option<Labels>> {
        let path = self.root.join(LABELS_FILE);
        if path.is_file() {
            Labels::read_csv(&path).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn load_frame(&self, frame_id: u64) -> Result<FrameBundle> {
        let depth = read_depth_file(&self.root.join(depth_file_name(frame_id)), self.range)?;
        let kp_path = self.root.join(keypoints_file_name(frame_id));
        let text = std::fs::read_to_string(&kp_path).map_err(|e| Error::io(&kp_path, e))?;
        let doc = parse_keypoints_json(&text)?;
        let bundle = FrameBundle {
            frame_id,
            timestamp: doc.timestamp.unwrap_or(frame_id as f64),
            depth,
            intrinsics: self.intrinsics,
            poses: doc.people,
        };
        bundle.validate()?;
        Ok(bundle)
    }

    /// Lazily loads every frame in id order.
    pub fn bundles(&self) -> impl Iterator<Item = Result<FrameBundle>> + '_ {
        self.frame_ids.iter().map(|&id| self.load_frame(id))
    }
}

/// Writes `intrinsics.toml` into a (possibly new) session directory.
pub fn init_session_dir(root: &Path, k: &CameraIntrinsics, range: Option<SensorRange>) -> Result<()> {
    std::fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
    write_intrinsics_file(&root.join(INTRINSICS_FILE), &CameraFile::from_parts(k, range))
}

pub fn write_frame(root: &Path, frame_id: u64, depth: &DepthFrame, keypoints: &KeypointsDocument) -> Result<()> {
    write_depth_dpth(&root.join(depth_file_name(frame_id)), depth)?;
    let path = root.join(keypoints_file_name(frame_id));
    let mut text = to_keypoints_json(keypoints)?;
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pose::{Keypoint2D, KeypointId, PoseDetection2D};

    #[test]
    fn names() {
        assert_eq!(depth_file_name(7), "frame_000007.depth");
        assert_eq!(keypoints_file_name(1234567), "frame_1234567.keypoints.json");
        assert_eq!(frame_id_of("frame_000042.depth"), Some(42));
        assert_eq!(frame_id_of("frame_42.depth"), None);
        assert_eq!(frame_id_of("frame_000042.keypoints.json"), None);
    }

    #[test]
    fn write_then_open() {
        let dir = tempfile::tempdir().unwrap();
        let k = CameraIntrinsics::new(50.0, 50.0, 4.0, 3.0, 8, 6).unwrap();
        init_session_dir(dir.path(), &k, None).unwrap();
        let depth = DepthFrame::from_meters(8, 6, &[2.0; 48], SensorRange::default()).unwrap();
        let pose = PoseDetection2D::new(vec![Keypoint2D::new(KeypointId::Neck, 4.0, 3.0, 0.8).unwrap()]).unwrap();
        let doc = KeypointsDocument {
            timestamp: None,
            people: vec![pose.clone()],
        };
        write_frame(dir.path(), 3, &depth, &doc).unwrap();
        write_frame(dir.path(), 1, &depth, &KeypointsDocument::default()).unwrap();
        let s = SessionDir::open(dir.path()).unwrap();
        assert_eq!(s.frame_ids(), &[1, 3]);
        assert!(s.labels().unwrap().is_none());
        let b = s.load_frame(3).unwrap();
        assert_eq!(b.timestamp, 3.0);
        assert_eq!(b.poses, vec![pose]);
        assert_eq!(b.depth, depth);
    }

    #[test]
    fn missing_keypoints_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let k = CameraIntrinsics::new(50.0, 50.0, 4.0, 3.0, 8, 6).unwrap();
        init_session_dir(dir.path(), &k, None).unwrap();
        let depth = DepthFrame::empty(8, 6);
        write_depth_dpth(&dir.path().join(depth_file_name(0)), &depth).unwrap();
        assert!(SessionDir::open(dir.path()).is_err());
    }
}
