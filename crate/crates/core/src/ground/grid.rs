use crate::error::{Error, Result};
use crate::geometry::{Point3, PointCloud};

/// Elevation and horizontal coordinates relative to an up direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpFrame {
    up: Point3,
    e1: Point3,
    e2: Point3,
}

impl UpFrame {
    /// Builds the frame for `up`; the first horizontal axis follows camera x
    /// unless `up` is nearly parallel to it.
    pub fn new(up: Point3) -> Result<Self> {
        let up = up
            .normalized()
            .filter(|u| u.is_finite())
            .ok_or_else(|| Error::Config("up vector must be finite and non-zero".into()))?;
        let seed = if up.x.abs() < 0.9 {
            Point3::new(1.0, 0.0, 0.0)
        } else {
            Point3::new(0.0, 0.0, 1.0)
        };
        let e1 = (seed - up * seed.dot(up)).normalized().expect("seed not parallel to up");
        let e2 = up.cross(e1);
        Ok(Self { up, e1, e2 })
    }

    pub fn up(&self) -> Point3 {
        self.up
    }

    pub fn elevation(&self, p: Point3) -> f64 {
        p.dot(self.up)
    }

    pub fn horizontal(&self, p: Point3) -> (f64, f64) {
        (p.dot(self.e1), p.dot(self.e2))
    }
}

impl Default for UpFrame {
    fn default() -> Self {
        Self::new(Point3::new(0.0, -1.0, 0.0)).unwrap()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    /// Minimum elevation of the cell's points, or the fill value for empty cells.
    pub elevation: f64,
    /// True when the cell held no points and its elevation was borrowed.
    pub filled: bool,
    /// Indices into the rasterized cloud.
    pub points: Vec<usize>,
}

/// A horizontal grid holding the lowest elevation seen in each cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ElevationGrid {
    cell_size: f64,
    origin: (f64, f64),
    cols: usize,
    rows: usize,
    cells: Vec<Cell>,
}

impl ElevationGrid {
    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn origin(&self) -> (f64, f64) {
        self.origin
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, col: usize, row: usize) -> &Cell {
        &self.cells[row * self.cols + col]
    }

    /// Row-major elevations.
    pub fn elevations(&self) -> Vec<f64> {
        self.cells.iter().map(|c| c.elevation).collect()
    }

    /// The same grid with the elevation channel replaced.
    pub fn with_elevations(&self, elevations: Vec<f64>) -> ElevationGrid {
        assert_eq!(elevations.len(), self.cells.len(), "grid shape mismatch");
        let mut out = self.clone();
        for (c, e) in out.cells.iter_mut().zip(elevations) {
            c.elevation = e;
        }
        out
    }
}

/// Rasterizes with the default up direction (negative camera y).
pub fn rasterize(cloud: &PointCloud, cell_size: f64) -> Result<ElevationGrid> {
    rasterize_in(cloud, cell_size, &UpFrame::default())
}

pub fn rasterize_in(cloud: &PointCloud, cell_size: f64, frame: &UpFrame) -> Result<ElevationGrid> {
    if cloud.is_empty() {
        return Err(Error::input("cannot rasterize an empty cloud"));
    }
    if !(cell_size > 0.0 && cell_size.is_finite()) {
        return Err(Error::input(format!("cell size must be positive, got {cell_size}")));
    }
    let coords: Vec<(f64, f64)> = cloud.iter().map(|&p| frame.horizontal(p)).collect();
    let (mut a0, mut b0, mut a1, mut b1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(a, b) in &coords {
        a0 = a0.min(a);
        b0 = b0.min(b);
        a1 = a1.max(a);
        b1 = b1.max(b);
    }
    let cols = ((a1 - a0) / cell_size).floor() as usize + 1;
    let rows = ((b1 - b0) / cell_size).floor() as usize + 1;
    let mut cells = vec![
        Cell {
            elevation: f64::INFINITY,
            filled: true,
            points: Vec::new(),
        };
        cols * rows
    ];
    for (i, (&p, &(a, b))) in cloud.iter().zip(&coords).enumerate() {
        let c = (((a - a0) / cell_size).floor() as usize).min(cols - 1);
        let r = (((b - b0) / cell_size).floor() as usize).min(rows - 1);
        let cell = &mut cells[r * cols + c];
        cell.elevation = cell.elevation.min(frame.elevation(p));
        cell.filled = false;
        cell.points.push(i);
    }
    fill_empty(&mut cells, cols, rows);
    Ok(ElevationGrid {
        cell_size,
        origin: (a0, b0),
        cols,
        rows,
        cells,
    })
}

/// Breadth-first fill from occupied cells: each empty cell takes the lowest
/// elevation among its 8-neighbours that were assigned in an earlier layer.
fn fill_empty(cells: &mut [Cell], cols: usize, rows: usize) {
    let mut assigned: Vec<bool> = cells.iter().map(|c| !c.filled).collect();
    let mut frontier: Vec<usize> = (0..cells.len()).filter(|&i| assigned[i]).collect();
    let mut queued = assigned.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &i in &frontier {
            let (c, r) = (i % cols, i / cols);
            for (nc, nr) in neighbours(c, r, cols, rows) {
                let j = nr * cols + nc;
                if !queued[j] {
                    queued[j] = true;
                    next.push(j);
                }
            }
        }
        // Values computed against the previous layers only.
        let values: Vec<f64> = next
            .iter()
            .map(|&j| {
                let (c, r) = (j % cols, j / cols);
                neighbours(c, r, cols, rows)
                    .filter(|&(nc, nr)| assigned[nr * cols + nc])
                    .map(|(nc, nr)| cells[nr * cols + nc].elevation)
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        for (&j, v) in next.iter().zip(values) {
            cells[j].elevation = v;
            assigned[j] = true;
        }
        frontier = next;
    }
}

fn neighbours(c: usize, r: usize, cols: usize, rows: usize) -> impl Iterator<Item = (usize, usize)> {
    (-1i64..=1)
        .flat_map(|dr| (-1i64..=1).map(move |dc| (dc, dr)))
        .filter(|&d| d != (0, 0))
        .filter_map(move |(dc, dr)| {
            let nc = c as i64 + dc;
            let nr = r as i64 + dr;
            (nc >= 0 && nr >= 0 && (nc as usize) < cols && (nr as usize) < rows).then_some((nc as usize, nr as usize))
        })
}
