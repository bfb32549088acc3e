//! Ground extraction with a progressive morphological filter.
//!
//! The cloud is rasterized into a grid of minimum elevations which is opened
//! with a growing structuring element. Anything that sticks out of the opened
//! surface by more than a window-dependent threshold is labeled non-ground.

mod grid;
pub mod morphology;
mod ply;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point3, PointCloud};

pub use grid::{rasterize, rasterize_in, Cell, ElevationGrid, UpFrame};
pub use morphology::opening;
pub use ply::write_ply;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GroundFilterParams {
    /// Grid resolution in meters; also the voxel leaf used by the pipeline.
    pub cell_size: f64,
    /// First half-width of the structuring element, in cells.
    pub initial_window: usize,
    /// Largest half-width, in cells.
    pub max_window: usize,
    /// Multiplier between consecutive windows.
    pub window_growth: f64,
    /// Elevation threshold at the first window, meters.
    pub initial_threshold: f64,
    /// Tolerated rise per unit run.
    pub slope: f64,
    /// Cap on the elevation threshold, meters.
    pub max_threshold: f64,
    /// Up direction in the camera frame.
    pub up: Point3,
}

impl Default for GroundFilterParams {
    fn default() -> Self {
        Self {
            cell_size: 0.15,
            initial_window: 1,
            max_window: 16,
            window_growth: 2.0,
            initial_threshold: 0.05,
            slope: 0.3,
            max_threshold: 0.5,
            up: Point3::new(0.0, -1.0, 0.0),
        }
    }
}

impl GroundFilterParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_owned()));
        if !(self.cell_size > 0.0 && self.cell_size.is_finite()) {
            return bad("cell_size must be positive");
        }
        if self.initial_window == 0 || self.initial_window >= self.max_window {
            return bad("windows must satisfy 0 < initial_window < max_window");
        }
        if !(self.window_growth >= 1.0 && self.window_growth.is_finite()) {
            return bad("window_growth must be at least 1");
        }
        if !(self.initial_threshold >= 0.0 && self.initial_threshold <= self.max_threshold) {
            return bad("thresholds must satisfy 0 <= initial_threshold <= max_threshold");
        }
        if !(self.slope >= 0.0 && self.slope.is_finite() && self.max_threshold.is_finite()) {
            return bad("slope must be non-negative");
        }
        UpFrame::new(self.up)?;
        Ok(())
    }

    /// Window half-widths, strictly increasing and ending at `max_window`.
    pub fn windows(&self) -> Vec<usize> {
        let mut out = vec![self.initial_window];
        let mut w = self.initial_window;
        while w < self.max_window {
            let grown = (w as f64 * self.window_growth).ceil() as usize;
            w = grown.max(w + 1).min(self.max_window);
            out.push(w);
        }
        out
    }

    /// Elevation threshold for each window, starting from a zero-size window.
    pub fn thresholds(&self) -> Vec<f64> {
        let mut prev = 0;
        self.windows()
            .into_iter()
            .map(|w| {
                let dh = self.slope * (w - prev) as f64 * self.cell_size + self.initial_threshold;
                prev = w;
                dh.min(self.max_threshold)
            })
            .collect()
    }
}

/// Ground and non-ground points of one cloud.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GroundLabeling {
    pub ground: Vec<Point3>,
    pub non_ground: Vec<Point3>,
}

impl GroundLabeling {
    pub fn from_flags(cloud: &PointCloud, ground: &[bool]) -> Self {
        assert_eq!(cloud.len(), ground.len(), "one flag per point");
        let mut out = GroundLabeling::default();
        for (&p, &g) in cloud.iter().zip(ground) {
            if g {
                out.ground.push(p);
            } else {
                out.non_ground.push(p);
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.ground.len() + self.non_ground.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Per-point ground flags in cloud order.
///
/// At the first window each point is compared against the opened surface of
/// its own cell; at later windows the previous surface of a whole cell is
/// compared and every point of a rejected cell is non-ground.
pub fn ground_flags(cloud: &PointCloud, params: &GroundFilterParams) -> Result<Vec<bool>> {
    params.validate()?;
    let frame = UpFrame::new(params.up)?;
    let grid = rasterize_in(cloud, params.cell_size, &frame)?;
    let (cols, rows) = (grid.cols(), grid.rows());
    let mut ground = vec![true; cloud.len()];
    let mut surface = grid.elevations();
    for (t, (w, dh)) in params.windows().into_iter().zip(params.thresholds()).enumerate() {
        let opened = morphology::open_values(&surface, cols, rows, w);
        for (i, cell) in grid.cells().iter().enumerate() {
            if t == 0 {
                for &p in &cell.points {
                    if frame.elevation(cloud.points()[p]) - opened[i] > dh {
                        ground[p] = false;
                    }
                }
            } else if surface[i] - opened[i] > dh {
                for &p in &cell.points {
                    ground[p] = false;
                }
            }
        }
        surface = opened;
    }
    Ok(ground)
}

pub fn progressive_filter(cloud: &PointCloud, params: &GroundFilterParams) -> Result<GroundLabeling> {
    let flags = ground_flags(cloud, params)?;
    Ok(GroundLabeling::from_flags(cloud, &flags))
}
