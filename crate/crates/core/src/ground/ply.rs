use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::GroundLabeling;
use crate::error::{Error, Result};

/// Writes an ASCII PLY cloud; ground points are green, the rest red.
pub fn write_ply(path: &Path, labeling: &GroundLabeling) -> Result<()> {
    let io = |e| Error::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    write!(
        w,
        "ply\nformat ascii 1.0\nelement vertex {}\n\
         property float x\nproperty float y\nproperty float z\n\
         property uchar red\nproperty uchar green\nproperty uchar blue\n\
         property uchar ground\nend_header\n",
        labeling.len()
    )
    .map_err(io)?;
    for p in &labeling.ground {
        writeln!(w, "{:.4} {:.4} {:.4} 0 255 0 1", p.x, p.y, p.z).map_err(io)?;
    }
    for p in &labeling.non_ground {
        writeln!(w, "{:.4} {:.4} {:.4} 255 0 0 0", p.x, p.y, p.z).map_err(io)?;
    }
    w.flush().map_err(io)
}
