use std::collections::BTreeMap;

use super::{Point3, PointCloud};
use crate::error::{Error, Result};

#[derive(Clone, Copy)]
struct Cell {
    count: u32,
    mean: Point3,
    lo: Point3,
    hi: Point3,
}

/// Replaces the points inside each occupied `leaf`-sized cube by their centroid.
///
/// Cubes are anchored at the origin, so cell `(i, j, k)` covers
/// `[i·leaf, (i+1)·leaf)` along x and likewise for y and z. Output is sorted
/// by cell index, which keeps the result independent of input order up to
/// floating-point rounding of the centroids.
pub fn voxel_downsample(cloud: &PointCloud, leaf: f64) -> Result<PointCloud> {
    if !(leaf.is_finite() && leaf > 0.0) {
        return Err(Error::input(format!("voxel leaf must be positive, got {leaf}")));
    }
    let mut cells: BTreeMap<(i64, i64, i64), Cell> = BTreeMap::new();
    for &p in cloud.iter() {
        let key = (
            (p.x / leaf).floor() as i64,
            (p.y / leaf).floor() as i64,
            (p.z / leaf).floor() as i64,
        );
        cells
            .entry(key)
            .and_modify(|c| {
                c.count += 1;
                // Running mean: exact for repeated points.
                c.mean += (p - c.mean) / f64::from(c.count);
                c.lo = c.lo.min(p);
                c.hi = c.hi.max(p);
            })
            .or_insert(Cell {
                count: 1,
                mean: p,
                lo: p,
                hi: p,
            });
    }
    let points = cells
        .into_values()
        .map(|c| c.mean.max(c.lo).min(c.hi))
        .collect();
    Ok(PointCloud { points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identical_points_collapse_to_themselves() {
        let p = Point3::new(0.1, -0.7, 2.3);
        let cloud = PointCloud::new(vec![p; 8]).unwrap();
        let out = voxel_downsample(&cloud, 0.15).unwrap();
        assert_eq!(out.points(), &[p]);
    }

    #[test]
    fn distant_points_stay_separate() {
        let cloud =
            PointCloud::new(vec![Point3::new(0.0, 0.0, 0.0), Point3::new(1.0, 0.0, 0.0)]).unwrap();
        let out = voxel_downsample(&cloud, 0.15).unwrap();
        assert_eq!(out.len(), 2);
        assert!(out.points().contains(&Point3::new(0.0, 0.0, 0.0)));
        assert!(out.points().contains(&Point3::new(1.0, 0.0, 0.0)));
    }

    #[test]
    fn centroid_of_a_cell() {
        let cloud = PointCloud::new(vec![
            Point3::new(0.01, 0.01, 0.01),
            Point3::new(0.03, 0.05, 0.09),
        ])
        .unwrap();
        let out = voxel_downsample(&cloud, 0.15).unwrap();
        assert_eq!(out.len(), 1);
        let c = out.points()[0];
        assert!((c.x - 0.02).abs() < 1e-15 && (c.y - 0.03).abs() < 1e-15 && (c.z - 0.05).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_positive_leaf() {
        let cloud = PointCloud::new(vec![Point3::ORIGIN]).unwrap();
        for leaf in [0.0, -0.1, f64::NAN] {
            assert!(matches!(voxel_downsample(&cloud, leaf), Err(Error::Input(_))));
        }
    }

    #[test]
    fn dense_lattice_reduces_by_the_expected_order_of_magnitude() {
        // 100 x 100 x 10 lattice at 2 cm pitch.
        let mut pts = Vec::with_capacity(100_000);
        for i in 0..100 {
            for j in 0..100 {
                for k in 0..10 {
                    pts.push(Point3::new(
                        0.01 + 0.02 * i as f64,
                        0.01 + 0.02 * k as f64,
                        1.01 + 0.02 * j as f64,
                    ));
                }
            }
        }
        let cloud = PointCloud::new(pts).unwrap();
        let out = voxel_downsample(&cloud, 0.15).unwrap();
        let factor = cloud.len() as f64 / out.len() as f64;
        // 2 m x 0.2 m x 2 m spans 14 x 2 x 14 cubes.
        assert_eq!(out.len(), 14 * 2 * 14);
        // A volumetric lattice collapses harder than a surface scan would.
        assert!(factor >= 50.0, "reduction factor {factor}");
    }

    fn arb_cloud() -> impl Strategy<Value = PointCloud> {
        proptest::collection::vec((-3.0..3.0f64, -3.0..3.0f64, 0.3..6.0f64), 1..200)
            .prop_map(|v| PointCloud::new(v.into_iter().map(|(x, y, z)| Point3::new(x, y, z)).collect()).unwrap())
    }

    proptest! {
        #[test]
        fn output_lies_in_input_bounds(cloud in arb_cloud(), leaf in 0.05..1.0f64) {
            let (lo, hi) = cloud.bounds().unwrap();
            let out = voxel_downsample(&cloud, leaf).unwrap();
            prop_assert!(out.len() <= cloud.len());
            for p in out.iter() {
                prop_assert!(p.x >= lo.x && p.y >= lo.y && p.z >= lo.z);
                prop_assert!(p.x <= hi.x && p.y <= hi.y && p.z <= hi.z);
            }
        }

        #[test]
        fn downsampling_is_idempotent(cloud in arb_cloud(), leaf in 0.05..1.0f64) {
            let once = voxel_downsample(&cloud, leaf).unwrap();
            // Centroids stay inside their cube, so a second pass sees one point per cube.
            let twice = voxel_downsample(&once, leaf).unwrap();
            prop_assert_eq!(once, twice);
        }
    }
}
