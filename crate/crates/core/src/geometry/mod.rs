//! Pinhole camera model, depth frames and point clouds.
//!
//! All 3D quantities live in the left-camera frame: `x` to the right, `y`
//! down and `z` forward along the optical axis, in meters. Pixel `(u, v)`
//! refers to column `u`, row `v`; integer coordinates are pixel centers.

mod io;
mod voxel;

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use io::{
    read_depth_file, read_intrinsics_file, parse_depth_bytes, write_depth_dpth, write_depth_png,
    write_intrinsics_file, CameraFile, DEPTH_MAGIC,
};
pub use voxel::voxel_downsample;

/// A point (or vector) in the camera frame, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, other: Point3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, o: Point3) -> Point3 {
        Point3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(self, other: Point3) -> f64 {
        (self - other).norm()
    }

    /// Unit vector in the same direction, or `None` for (near) zero vectors.
    pub fn normalized(self) -> Option<Point3> {
        let n = self.norm();
        (n.is_finite() && n > 1e-12).then(|| self / n)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn min(self, o: Point3) -> Point3 {
        Point3::new(self.x.min(o.x), self.y.min(o.y), self.z.min(o.z))
    }

    pub fn max(self, o: Point3) -> Point3 {
        Point3::new(self.x.max(o.x), self.y.max(o.y), self.z.max(o.z))
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl From<[f64; 3]> for Point3 {
    fn from(a: [f64; 3]) -> Self {
        Point3::new(a[0], a[1], a[2])
    }
}

impl From<Point3> for [f64; 3] {
    fn from(p: Point3) -> Self {
        p.to_array()
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Point3 {
    fn add_assign(&mut self, o: Point3) {
        *self = *self + o;
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Point3 {
    type Output = Point3;
    fn neg(self) -> Point3 {
        Point3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, s: f64) -> Point3 {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Point3 {
    type Output = Point3;
    fn div(self, s: f64) -> Point3 {
        Point3::new(self.x / s, self.y / s, self.z / s)
    }
}

/// Pinhole intrinsics of the (rectified, undistorted) left camera.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
}

impl CameraIntrinsics {
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64, width: u32, height: u32) -> Result<Self> {
        let k = Self {
            fx,
            fy,
            cx,
            cy,
            width,
            height,
        };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fx.is_finite() && self.fx > 0.0 && self.fy.is_finite() && self.fy > 0.0) {
            return Err(Error::input(format!(
                "focal lengths must be positive, got fx={} fy={}",
                self.fx, self.fy
            )));
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::input("image dimensions must be non-zero"));
        }
        if !(self.cx >= 0.0 && self.cx < self.width as f64) {
            return Err(Error::input(format!(
                "principal point cx={} outside [0, {})",
                self.cx, self.width
            )));
        }
        if !(self.cy >= 0.0 && self.cy < self.height as f64) {
            return Err(Error::input(format!(
                "principal point cy={} outside [0, {})",
                self.cy, self.height
            )));
        }
        Ok(())
    }

    /// Whether a (sub-)pixel coordinate lies on the image.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= 0.0 && y >= 0.0 && x < self.width as f64 && y < self.height as f64
    }

    /// Forward pinhole projection. `None` for points at or behind the camera.
    pub fn project(&self, p: Point3) -> Option<(f64, f64)> {
        if p.z.is_nan() || p.z <= 0.0 {
            return None;
        }
        Some((
            self.fx * p.x / p.z + self.cx,
            self.fy * p.y / p.z + self.cy,
        ))
    }

    /// Integer pixel closest to a sub-pixel coordinate, clamped to the image.
    pub fn nearest_pixel(&self, x: f64, y: f64) -> (u32, u32) {
        let u = x.round().clamp(0.0, (self.width - 1) as f64) as u32;
        let v = y.round().clamp(0.0, (self.height - 1) as f64) as u32;
        (u, v)
    }
}

/// Valid depth interval of the sensor, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorRange {
    pub min: f64,
    pub max: f64,
}

impl Default for SensorRange {
    fn default() -> Self {
        Self {
            min: 0.3,
            max: 20.0,
        }
    }
}

impl SensorRange {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min > 0.0 && min < max) {
            return Err(Error::input(format!(
                "sensor range must satisfy 0 < min < max, got [{min}, {max}]"
            )));
        }
        Ok(Self { min, max })
    }

    pub fn contains(&self, d: f64) -> bool {
        d.is_finite() && d >= self.min && d <= self.max
    }
}

/// Row-major depth image in meters. Holes are `None`, never a sentinel value.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthFrame {
    width: u32,
    height: u32,
    depths: Vec<Option<f32>>,
}

impl DepthFrame {
    /// Builds a frame from already-classified depths. Every `Some` must lie in `range`.
    pub fn new(
        width: u32,
        height: u32,
        depths: Vec<Option<f32>>,
        range: SensorRange,
    ) -> Result<Self> {
        check_len(width, height, depths.len())?;
        if let Some(bad) = depths
            .iter()
            .flatten()
            .find(|d| !range.contains(f64::from(**d)))
        {
            return Err(Error::input(format!(
                "depth {bad} outside sensor range [{}, {}]",
                range.min, range.max
            )));
        }
        Ok(Self {
            width,
            height,
            depths,
        })
    }

    /// Builds a frame from raw sensor readings. Non-finite and out-of-range
    /// values become holes.
    pub fn from_meters(width: u32, height: u32, raw: &[f32], range: SensorRange) -> Result<Self> {
        check_len(width, height, raw.len())?;
        let depths = raw
            .iter()
            .map(|&d| range.contains(f64::from(d)).then_some(d))
            .collect();
        Ok(Self {
            width,
            height,
            depths,
        })
    }

    /// A frame with no valid pixels.
    pub fn empty(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            depths: vec![None; width as usize * height as usize],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn get(&self, u: u32, v: u32) -> Option<f64> {
        if u >= self.width || v >= self.height {
            return None;
        }
        self.depths[v as usize * self.width as usize + u as usize].map(f64::from)
    }

    pub fn raw(&self) -> &[Option<f32>] {
        &self.depths
    }

    pub fn valid_count(&self) -> usize {
        self.depths.iter().filter(|d| d.is_some()).count()
    }

    pub fn matches(&self, k: &CameraIntrinsics) -> bool {
        self.width == k.width && self.height == k.height
    }
}

fn check_len(width: u32, height: u32, len: usize) -> Result<()> {
    let expected = width as usize * height as usize;
    if len != expected {
        return Err(Error::input(format!(
            "depth grid has {len} cells, expected {width}x{height} = {expected}"
        )));
    }
    Ok(())
}

/// An ordered set of finite points.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointCloud {
    points: Vec<Point3>,
}

impl PointCloud {
    pub fn new(points: Vec<Point3>) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| !p.is_finite()) {
            return Err(Error::input(format!("non-finite point {p:?} in cloud")));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point3> {
        self.points.iter()
    }

    /// Axis-aligned bounds as `(min, max)`, `None` for an empty cloud.
    pub fn bounds(&self) -> Option<(Point3, Point3)> {
        let first = *self.points.first()?;
        Some(
            self.points
                .iter()
                .fold((first, first), |(lo, hi), &p| (lo.min(p), hi.max(p))),
        )
    }

    pub fn into_points(self) -> Vec<Point3> {
        self.points
    }
}

/// Lifts a pixel with known depth into the camera frame.
pub fn back_project(pixel: (f64, f64), depth: f64, k: &CameraIntrinsics) -> Result<Point3> {
    let (x, y) = pixel;
    if !k.contains(x, y) {
        return Err(Error::input(format!(
            "pixel ({x}, {y}) outside {}x{} image",
            k.width, k.height
        )));
    }
    if !(depth.is_finite() && depth > 0.0) {
        return Err(Error::NoDepth { x, y });
    }
    Ok(Point3::new(
        (x - k.cx) * depth / k.fx,
        (y - k.cy) * depth / k.fy,
        depth,
    ))
}

/// One point per valid depth pixel, in row-major pixel order.
pub fn cloud_from_depth(frame: &DepthFrame, k: &CameraIntrinsics) -> Result<PointCloud> {
    if !frame.matches(k) {
        return Err(Error::input(format!(
            "depth frame is {}x{} but intrinsics describe {}x{}",
            frame.width, frame.height, k.width, k.height
        )));
    }
    let w = frame.width as usize;
    let points = frame
        .depths
        .iter()
        .enumerate()
        .filter_map(|(i, d)| {
            let d = f64::from((*d)?);
            let (u, v) = ((i % w) as f64, (i / w) as f64);
            Some(Point3::new((u - k.cx) * d / k.fx, (v - k.cy) * d / k.fy, d))
        })
        .collect();
    Ok(PointCloud { points })
}
