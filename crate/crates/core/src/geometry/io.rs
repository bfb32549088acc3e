//! Depth-frame and intrinsics file formats.
//!
//! Depth files are either 16-bit grayscale PNG (millimeters, 0 = hole) or a
//! raw float dump: the magic `DPTH`, little-endian `u32` width and height,
//! then `width * height` little-endian `f32` meters with NaN marking holes.
//! The format is detected from the leading bytes, not the file extension.

use std::fs;
use std::io::Cursor;
use std::path::Path;

use image::{ImageBuffer, ImageFormat, Luma};
use serde::{Deserialize, Serialize};

use super::{CameraIntrinsics, DepthFrame, SensorRange};
use crate::error::{Error, Result};

pub const DEPTH_MAGIC: &[u8; 4] = b"DPTH";
const PNG_SIGNATURE: &[u8; 8] = b"\x89PNG\r\n\x1a\n";

pub fn read_depth_file(path: &Path, range: SensorRange) -> Result<DepthFrame> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_depth_bytes(&bytes, range)
}

pub fn parse_depth_bytes(bytes: &[u8], range: SensorRange) -> Result<DepthFrame> {
    if bytes.starts_with(PNG_SIGNATURE) {
        parse_png(bytes, range)
    } else if bytes.starts_with(DEPTH_MAGIC) {
        parse_dpth(bytes, range)
    } else {
        Err(Error::input("depth data is neither a PNG nor a DPTH file"))
    }
}

fn parse_dpth(bytes: &[u8], range: SensorRange) -> Result<DepthFrame> {
    if bytes.len() < 12 {
        return Err(Error::input("truncated DPTH header"));
    }
    let width = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    let height = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    let cells = width as usize * height as usize;
    let body = &bytes[12..];
    if body.len() != cells * 4 {
        return Err(Error::input(format!(
            "DPTH payload is {} bytes, expected {} for {width}x{height}",
            body.len(),
            cells * 4
        )));
    }
    let raw: Vec<f32> = body
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    DepthFrame::from_meters(width, height, &raw, range)
}

fn parse_png(bytes: &[u8], range: SensorRange) -> Result<DepthFrame> {
    let img = image::load_from_memory_with_format(bytes, ImageFormat::Png)?;
    let image::DynamicImage::ImageLuma16(buf) = img else {
        return Err(Error::input("depth PNG must be 16-bit single-channel"));
    };
    let (w, h) = buf.dimensions();
    let raw: Vec<f32> = buf
        .into_raw()
        .into_iter()
        .map(|mm| if mm == 0 { f32::NAN } else { f32::from(mm) / 1000.0 })
        .collect();
    DepthFrame::from_meters(w, h, &raw, range)
}

pub fn write_depth_dpth(path: &Path, frame: &DepthFrame) -> Result<()> {
    let mut out = Vec::with_capacity(12 + frame.raw().len() * 4);
    out.extend_from_slice(DEPTH_MAGIC);
    out.extend_from_slice(&frame.width().to_le_bytes());
    out.extend_from_slice(&frame.height().to_le_bytes());
    for d in frame.raw() {
        out.extend_from_slice(&d.unwrap_or(f32::NAN).to_le_bytes());
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Millimeter PNG. Depths beyond 65.535 m saturate.
pub fn write_depth_png(path: &Path, frame: &DepthFrame) -> Result<()> {
    let mm: Vec<u16> = frame
        .raw()
        .iter()
        .map(|d| match d {
            Some(m) => (m * 1000.0).round().clamp(1.0, f32::from(u16::MAX)) as u16,
            None => 0,
        })
        .collect();
    let buf: ImageBuffer<Luma<u16>, Vec<u16>> =
        ImageBuffer::from_raw(frame.width(), frame.height(), mm)
            .ok_or_else(|| Error::input("depth buffer size mismatch"))?;
    let mut bytes = Cursor::new(Vec::new());
    buf.write_to(&mut bytes, ImageFormat::Png)?;
    fs::write(path, bytes.into_inner()).map_err(|e| Error::io(path, e))
}

/// Contents of `intrinsics.toml`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraFile {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_depth: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_depth: Option<f64>,
}

impl CameraFile {
    pub fn intrinsics(&self) -> Result<CameraIntrinsics> {
        CameraIntrinsics::new(self.fx, self.fy, self.cx, self.cy, self.width, self.height)
    }

    pub fn range(&self) -> Result<SensorRange> {
        let d = SensorRange::default();
        SensorRange::new(self.min_depth.unwrap_or(d.min), self.max_depth.unwrap_or(d.max))
    }

    pub fn from_parts(k: &CameraIntrinsics, range: Option<SensorRange>) -> Self {
        Self {
            fx: k.fx,
            fy: k.fy,
            cx: k.cx,
            cy: k.cy,
            width: k.width,
            height: k.height,
            min_depth: range.map(|r| r.min),
            max_depth: range.map(|r| r.max),
        }
    }
}

pub fn read_intrinsics_file(path: &Path) -> Result<(CameraIntrinsics, SensorRange)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: CameraFile = toml::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    Ok((file.intrinsics()?, file.range()?))
}

pub fn write_intrinsics_file(path: &Path, file: &CameraFile) -> Result<()> {
    let text = toml::to_string(file).map_err(|e| Error::Config(e.to_string()))?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
