use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::ground::UpFrame;

/// Least-squares plane `e = a·h1 + b·h2 + c` in an up-aligned frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FittedPlane {
    frame: UpFrame,
    a: f64,
    b: f64,
    c: f64,
}

impl FittedPlane {
    /// Fits the ground points; degenerate layouts fall back to a level plane
    /// at the mean elevation.
    pub fn fit(points: &[Point3], frame: UpFrame) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::NoGround);
        }
        let n = points.len() as f64;
        let rows: Vec<(f64, f64, f64)> = points
            .iter()
            .map(|&p| {
                let (h1, h2) = frame.horizontal(p);
                (h1, h2, frame.elevation(p))
            })
            .collect();
        // Centre the data so the normal equations stay well conditioned.
        let (m1, m2, me) = rows.iter().fold((0.0, 0.0, 0.0), |acc, r| (acc.0 + r.0 / n, acc.1 + r.1 / n, acc.2 + r.2 / n));
        let (mut s11, mut s12, mut s22, mut s1e, mut s2e) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &(h1, h2, e) in &rows {
            let (d1, d2, de) = (h1 - m1, h2 - m2, e - me);
            s11 += d1 * d1;
            s12 += d1 * d2;
            s22 += d2 * d2;
            s1e += d1 * de;
            s2e += d2 * de;
        }
        let det = s11 * s22 - s12 * s12;
        let scale = (s11 * s22).max(f64::MIN_POSITIVE);
        let (a, b) = if det.abs() > 1e-9 * scale && det.abs() > 1e-12 {
            ((s1e * s22 - s2e * s12) / det, (s2e * s11 - s1e * s12) / det)
        } else {
            (0.0, 0.0)
        };
        Ok(Self {
            frame,
            a,
            b,
            c: me - a * m1 - b * m2,
        })
    }

    /// Perpendicular distance from `p` to the plane.
    pub fn height(&self, p: Point3) -> f64 {
        let (h1, h2) = self.frame.horizontal(p);
        let e = self.frame.elevation(p);
        (e - (self.a * h1 + self.b * h2 + self.c)).abs() / (1.0 + self.a * self.a + self.b * self.b).sqrt()
    }
}
