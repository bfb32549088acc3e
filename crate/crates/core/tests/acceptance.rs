//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use falldet::geometry::{back_project, cloud_from_depth, voxel_downsample, CameraIntrinsics, Point3, PointCloud};
use falldet::ground::{opening, progressive_filter, rasterize, GroundFilterParams};
use falldet::pipeline::{
    argmax_threshold, evaluate, is_single_peaked, run_session, threshold_range, threshold_sweep, Labels, NullSink,
    SweepPoint,
};
use falldet::pose::{average_confidence, Keypoint2D, KeypointId, PoseDetection2D, Skeleton3D};
use falldet::reasoning::{center_of_gravity, dubois_bsa, Decision, ReasoningConfig, ReasoningReport};
use falldet::synthcorpus::{
    generate, generate_corpus, labels_of, ArchetypeLibrary, CorpusSpec, FurnitureBox, GeneratedFrame, PersonSpec,
    ScenarioSpec, SynthCamera,
};

type Outcome = Result<String, String>;

fn rat(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite")
}

fn rel_err(got: f64, exact: &BigRational) -> f64 {
    let diff = (rat(got) - exact).abs();
    if exact.is_zero() {
        return diff.to_f64().unwrap();
    }
    (diff / exact.abs()).to_f64().unwrap()
}

/// `x^(p/q)` scaled by `10^digits`, truncated, via integer roots.
fn rational_pow(x: &BigRational, p: u32, q: u32, digits: u32) -> BigRational {
    let num = x.numer().pow(p) * BigInt::from(10).pow(q * digits);
    let den = x.denom().pow(p);
    let root = (num / den).nth_root(q);
    BigRational::new(root, BigInt::from(10).pow(digits))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let k = CameraIntrinsics::new(
            rng.random_range(100.0..1000.0),
            rng.random_range(100.0..1000.0),
            rng.random_range(100.0..500.0),
            rng.random_range(80.0..400.0),
            640,
            480,
        )
        .unwrap();
        let (x, y, d) = (rng.random_range(0.0..640.0), rng.random_range(0.0..480.0), rng.random_range(0.3..20.0));
        let p = back_project((x, y), d, &k).map_err(|e| e.to_string())?;
        let dz = rat(d);
        let ex = (rat(x) - rat(k.cx)) * &dz / rat(k.fx);
        let ey = (rat(y) - rat(k.cy)) * &dz / rat(k.fy);
        worst = worst.max(rel_err(p.x, &ex)).max(rel_err(p.y, &ey)).max(rel_err(p.z, &dz));

        let n = rng.random_range(1..=19);
        let mut kps = Vec::new();
        for &id in &KeypointId::ALL[..n] {
            let c = if rng.random_bool(0.2) { rng.random_range(0.0..0.01) } else { rng.random_range(0.0..1.0) };
            kps.push(Keypoint2D::new(id, 1.0, 1.0, c).unwrap());
        }
        let pose = PoseDetection2D::new(kps.clone()).unwrap();
        let lambda = average_confidence(&pose, 0.01);
        let kept: Vec<BigRational> = kps.iter().filter(|k| k.confidence > 0.01).map(|k| rat(k.confidence)).collect();
        let exact = if kept.is_empty() {
            BigRational::zero()
        } else {
            kept.iter().fold(BigRational::zero(), |a, b| a + b) / BigRational::from_integer(kept.len().into())
        };
        worst = worst.max(rel_err(lambda, &exact));

        let (w, h) = (rng.random_range(30.0..150.0), rng.random_range(120.0..210.0));
        let bsa = dubois_bsa(w, h).map_err(|e| e.to_string())?;
        let exact = BigRational::new(7184.into(), 1_000_000.into())
            * rational_pow(&rat(w), 17, 40, 30)
            * rational_pow(&rat(h), 29, 40, 30);
        worst = worst.max(rel_err(bsa, &exact));

        let joints: Vec<(KeypointId, Point3)> = KeypointId::ALL[..n]
            .iter()
            .map(|&id| {
                let p = Point3::new(rng.random_range(-3.0..3.0), rng.random_range(-2.0..2.0), rng.random_range(0.5..8.0));
                (id, p)
            })
            .collect();
        let cog = center_of_gravity(&Skeleton3D::from_points(joints.clone()).unwrap());
        let count = BigRational::from_integer(n.into());
        for (got, coord) in [(cog.x, 0), (cog.y, 1), (cog.z, 2)] {
            let sum = joints.iter().fold(BigRational::zero(), |a, (_, p)| a + rat(p.to_array()[coord]));
            worst = worst.max(rel_err(got, &(sum / &count)));
        }
    }
    let elapsed = start.elapsed();
    let detail = format!("worst relative error {worst:.2e} in {:.2} s", elapsed.as_secs_f64());
    if worst < 1e-9 && elapsed < Duration::from_secs(5) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn brute_open(v: &[f64], cols: usize, rows: usize, w: usize) -> Vec<f64> {
    let pass = |src: &[f64], take_min: bool| {
        let mut out = vec![0.0; src.len()];
        for r in 0..rows {
            for c in 0..cols {
                let mut acc = if take_min { f64::INFINITY } else { f64::NEG_INFINITY };
                for rr in r.saturating_sub(w)..=(r + w).min(rows - 1) {
                    for cc in c.saturating_sub(w)..=(c + w).min(cols - 1) {
                        let x = src[rr * cols + cc];
                        acc = if take_min { acc.min(x) } else { acc.max(x) };
                    }
                }
                out[r * cols + c] = acc;
            }
        }
        out
    };
    pass(&pass(v, true), false)
}

/// Independent reading of the ground filter: rasterize, fill holes from the
/// nearest occupied ring, then open with growing windows.
fn reference_ground(points: &[Point3], p: &GroundFilterParams) -> Vec<bool> {
    let elev: Vec<f64> = points.iter().map(|q| -q.y).collect();
    let (x0, z0) = points.iter().fold((f64::INFINITY, f64::INFINITY), |(a, b), q| (a.min(q.x), b.min(q.z)));
    let (x1, z1) = points.iter().fold((f64::NEG_INFINITY, f64::NEG_INFINITY), |(a, b), q| (a.max(q.x), b.max(q.z)));
    let cols = ((x1 - x0) / p.cell_size).floor() as usize + 1;
    let rows = ((z1 - z0) / p.cell_size).floor() as usize + 1;
    let cell_of: Vec<usize> = points
        .iter()
        .map(|q| {
            let c = (((q.x - x0) / p.cell_size).floor() as usize).min(cols - 1);
            let r = (((q.z - z0) / p.cell_size).floor() as usize).min(rows - 1);
            r * cols + c
        })
        .collect();
    let mut surface = vec![f64::INFINITY; cols * rows];
    for (i, &c) in cell_of.iter().enumerate() {
        surface[c] = surface[c].min(elev[i]);
    }
    let occupied: Vec<usize> = (0..surface.len()).filter(|&i| surface[i].is_finite()).collect();
    let cheb = |a: usize, b: usize| {
        let (ac, ar, bc, br) = ((a % cols) as i64, (a / cols) as i64, (b % cols) as i64, (b / cols) as i64);
        (ac - bc).abs().max((ar - br).abs())
    };
    let dist: Vec<i64> = (0..surface.len())
        .map(|i| occupied.iter().map(|&o| cheb(i, o)).min().unwrap())
        .collect();
    let max_d = dist.iter().copied().max().unwrap();
    for d in 1..=max_d {
        let next: Vec<(usize, f64)> = (0..surface.len())
            .filter(|&i| dist[i] == d)
            .map(|i| {
                let v = (0..surface.len())
                    .filter(|&j| cheb(i, j) == 1 && dist[j] == d - 1)
                    .map(|j| surface[j])
                    .fold(f64::INFINITY, f64::min);
                (i, v)
            })
            .collect();
        for (i, v) in next {
            surface[i] = v;
        }
    }

    let mut windows = vec![p.initial_window];
    loop {
        let last = *windows.last().unwrap();
        if last >= p.max_window {
            break;
        }
        let grown = ((last as f64 * p.window_growth).ceil() as usize).max(last + 1);
        windows.push(grown.min(p.max_window));
    }
    let mut ground = vec![true; points.len()];
    let mut prev_w = 0;
    for (t, &w) in windows.iter().enumerate() {
        let dh = (p.slope * (w - prev_w) as f64 * p.cell_size + p.initial_threshold).min(p.max_threshold);
        let opened = brute_open(&surface, cols, rows, w);
        for (i, &c) in cell_of.iter().enumerate() {
            let rise = if t == 0 { elev[i] - opened[c] } else { surface[c] - opened[c] };
            if rise > dh {
                ground[i] = false;
            }
        }
        surface = opened;
        prev_w = w;
    }
    ground
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for trial in 0..200 {
        let (cols, rows) = (rng.random_range(1..=16), rng.random_range(1..=16));
        let mut pts = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                pts.push(Point3::new(c as f64, 0.0, r as f64));
            }
        }
        let grid = rasterize(&PointCloud::new(pts).unwrap(), 1.0).map_err(|e| e.to_string())?;
        if (grid.cols(), grid.rows()) != (cols, rows) {
            return Err(format!("trial {trial}: lattice rasterized to the wrong shape"));
        }
        let values: Vec<f64> = (0..cols * rows).map(|_| rng.random_range(-1.0..1.0)).collect();
        let grid = grid.with_elevations(values.clone());
        for w in [1, 2, 3, 5, 8] {
            if opening(&grid, w).elevations() != brute_open(&values, cols, rows, w) {
                return Err(format!("opening differs from the sliding-window oracle on trial {trial}, window {w}"));
            }
        }
    }
    let params = GroundFilterParams::default();
    let (mut ground_total, mut lifted_total) = (0, 0);
    for trial in 0..200 {
        let span_x = rng.random_range(0.2..2.39);
        let span_z = rng.random_range(0.2..2.39);
        let mut pts = Vec::new();
        let n = rng.random_range(30..400);
        for _ in 0..n {
            let (x, z) = (rng.random_range(0.0..span_x), rng.random_range(0.0..span_z));
            pts.push(Point3::new(x, 1.2 - rng.random_range(-0.02..0.02), 2.0 + z));
        }
        for _ in 0..rng.random_range(0..3) {
            let (bx, bz) = (rng.random_range(0.0..span_x), rng.random_range(0.0..span_z));
            let (sx, sz, h) = (rng.random_range(0.05..0.8), rng.random_range(0.05..0.8), rng.random_range(0.05..1.0));
            for _ in 0..rng.random_range(5..80) {
                let x = (bx + rng.random_range(0.0..sx)).min(span_x);
                let z = (bz + rng.random_range(0.0..sz)).min(span_z);
                pts.push(Point3::new(x, 1.2 - rng.random_range(0.0..h), 2.0 + z));
            }
        }
        let expected = reference_ground(&pts, &params);
        let labeling = progressive_filter(&PointCloud::new(pts.clone()).unwrap(), &params).map_err(|e| e.to_string())?;
        let got: Vec<bool> = {
            let ground: std::collections::HashSet<[u64; 3]> =
                labeling.ground.iter().map(|p| p.to_array().map(f64::to_bits)).collect();
            pts.iter().map(|p| ground.contains(&p.to_array().map(f64::to_bits))).collect()
        };
        if got != expected || labeling.ground.len() + labeling.non_ground.len() != pts.len() {
            return Err(format!("progressive filter differs from the reference iteration on scene {trial}"));
        }
        ground_total += labeling.ground.len();
        lifted_total += labeling.non_ground.len();
    }
    let elapsed = start.elapsed();
    let detail = format!(
        "200 grids x 5 windows and 200 scenes ({ground_total} ground, {lifted_total} non-ground points) exact in {:.2} s",
        elapsed.as_secs_f64()
    );
    if elapsed < Duration::from_secs(30) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn lattice_plane(slope_deg: f64) -> PointCloud {
    let t = slope_deg.to_radians().tan();
    let mut pts = Vec::new();
    for i in 0..200 {
        for j in 0..300 {
            let (x, z) = (-2.0 + i as f64 * 0.02, 1.0 + j as f64 * 0.02);
            pts.push(Point3::new(x, 1.2 - (z - 3.0) * t, z));
        }
    }
    PointCloud::new(pts).unwrap()
}

fn criterion_3() -> Outcome {
    let params = GroundFilterParams::default();
    let k = SynthCamera::default().intrinsics().unwrap();
    let lib = ArchetypeLibrary::builtin();
    let mut notes = Vec::new();
    for slope in [0.0, 5.0, 10.0] {
        let lattice = lattice_plane(slope);
        let mut spec = ScenarioSpec::new(3);
        spec.floor.slope_deg = slope;
        let rendered = generate(&spec, &k, &lib).map_err(|e| e.to_string())?;
        let rendered = cloud_from_depth(&rendered.bundle.depth, &k).unwrap();
        for (what, cloud) in [
            ("lattice", lattice.clone()),
            ("voxelized lattice", voxel_downsample(&lattice, params.cell_size).unwrap()),
            ("rendered", voxel_downsample(&rendered, params.cell_size).unwrap()),
        ] {
            let l = progressive_filter(&cloud, &params).map_err(|e| e.to_string())?;
            if !l.non_ground.is_empty() {
                return Err(format!("{slope}° {what} plane: {} of {} points non-ground", l.non_ground.len(), cloud.len()));
            }
        }
        notes.push(format!("{slope}°"));
    }

    let mut spec = ScenarioSpec::new(4);
    spec.furniture.push(FurnitureBox {
        position: [0.0, 3.5],
        size: [0.8, 0.8, 0.8],
        elevation: 0.0,
    });
    let g = generate(&spec, &k, &lib).map_err(|e| e.to_string())?;
    let cloud = cloud_from_depth(&g.bundle.depth, &k).unwrap();
    let truth = g.cloud_truth();
    let flags = {
        let l = progressive_filter(&cloud, &params).map_err(|e| e.to_string())?;
        let ground: std::collections::HashSet<[u64; 3]> = l.ground.iter().map(|p| p.to_array().map(f64::to_bits)).collect();
        cloud.iter().map(|p| ground.contains(&p.to_array().map(f64::to_bits))).collect::<Vec<_>>()
    };
    let box_points: Vec<usize> = (0..cloud.len()).filter(|&i| !truth[i]).collect();
    let wrong: Vec<usize> = box_points.iter().copied().filter(|&i| flags[i]).collect();
    let highest = wrong.iter().map(|&i| 1.2 - cloud.points()[i].y).fold(0.0, f64::max);
    let detail = format!(
        "planes at {} all ground; box: {} of {} points non-ground, missed points at most {highest:.3} m up",
        notes.join(", "),
        box_points.len() - wrong.len(),
        box_points.len()
    );
    if wrong.is_empty() && !box_points.is_empty() {
        Ok(detail)
    } else {
        Err(detail)
    }
}

struct Corpus {
    frames: Vec<GeneratedFrame>,
    labels: Labels,
}

fn corpus() -> Corpus {
    let k = SynthCamera::default().intrinsics().unwrap();
    let spec = CorpusSpec::new(50, 50, 1);
    assert_eq!((spec.noise.depth_sigma, spec.noise.dropout), (0.01, 0.15));
    let frames = generate_corpus(&spec, &k, &ArchetypeLibrary::builtin()).expect("corpus renders");
    let labels = labels_of(&frames);
    Corpus { frames, labels }
}

fn session_reports(c: &Corpus, gp: &GroundFilterParams) -> falldet::Result<BTreeMap<u64, Vec<ReasoningReport>>> {
    let bundles = c.frames.iter().map(|f| Ok(f.bundle.clone()));
    let result = run_session(bundles, &ReasoningConfig::default(), gp, &mut NullSink, Some(&c.labels))?;
    Ok(result.reports_by_frame())
}

fn criterion_4(c: &Corpus, elapsed_render: Duration) -> Outcome {
    let start = Instant::now();
    let reports = session_reports(c, &GroundFilterParams::default()).map_err(|e| e.to_string())?;
    let m = evaluate(&reports, &c.labels);
    let elapsed = elapsed_render + start.elapsed();
    let (tpr, acc) = (m.true_positive_rate.unwrap_or(0.0), m.accuracy.unwrap_or(0.0));
    let detail = format!(
        "TP {} FP {} TN {} FN {}: TPR {tpr:.3}, accuracy {acc:.3} in {:.1} s",
        m.tp,
        m.fp,
        m.tn,
        m.fn_,
        elapsed.as_secs_f64()
    );
    if m.labeled == 100 && tpr >= 0.90 && acc >= 0.90 && elapsed < Duration::from_secs(120) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_5(c: &Corpus) -> Outcome {
    let reports = session_reports(c, &GroundFilterParams::default()).map_err(|e| e.to_string())?;
    let thresholds = threshold_range(0.1, 1.5, 0.05).unwrap();
    let points: Vec<SweepPoint> = threshold_sweep(&reports, &c.labels, &thresholds).map_err(|e| e.to_string())?;
    let best = argmax_threshold(&points).ok_or("empty sweep")?;
    let peaked = is_single_peaked(&points);
    let top = points.iter().map(|p| p.accuracy).fold(f64::MIN, f64::max);
    let plateau: Vec<f64> = points.iter().filter(|p| p.accuracy == top).map(|p| p.threshold).collect();
    let detail = format!(
        "{} thresholds, peak accuracy {top:.2} on [{:.2}, {:.2}] m, argmax {best:.3} m, single-peaked {peaked}",
        points.len(),
        plateau[0],
        plateau[plateau.len() - 1]
    );
    if peaked && (0.5..=0.9).contains(&best) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fixture(archetype: &str, yaw_deg: f64) -> falldet::Result<ReasoningReport> {
    let k = SynthCamera::default().intrinsics().unwrap();
    let mut spec = ScenarioSpec::new(6);
    spec.person.push(PersonSpec {
        archetype: archetype.into(),
        position: [0.0, 3.4],
        yaw_deg,
        scale: 1.75,
        fallen: None,
    });
    let g = generate(&spec, &k, &ArchetypeLibrary::builtin())?;
    let cfg = ReasoningConfig::default();
    let mut reports = falldet::pipeline::process_frame(&g.bundle, &cfg, &GroundFilterParams::default())?;
    Ok(reports.remove(0))
}

fn criterion_6() -> Outcome {
    let fmt = |v: Option<f64>| v.map_or("-".to_owned(), |d| format!("{d:.2}"));
    let kneel = fixture("kneeling", 0.0).map_err(|e| e.to_string())?;
    let couch = fixture("upper_body_off_couch", 0.0).map_err(|e| e.to_string())?;
    let bed = fixture("sleeping_on_bed", 90.0).map_err(|e| e.to_string())?;
    let t = ReasoningConfig::default().height_threshold;
    let ubc_path = couch.decision == Decision::Fallen
        && couch.ubc_ground_distance.is_some_and(|d| d < t)
        && couch.cog_ground_distance.is_some_and(|d| d >= 0.7);
    let detail = format!(
        "kneeling {:?}; couch {:?} with CoG {} m, UbC {} m; bed {:?}",
        kneel.decision,
        couch.decision,
        fmt(couch.cog_ground_distance),
        fmt(couch.ubc_ground_distance),
        bed.decision
    );
    if kneel.decision == Decision::NotFallen && ubc_path && bed.decision == Decision::NotFallen {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn perturbations() -> Vec<(String, GroundFilterParams)> {
    let d = GroundFilterParams::default();
    let mut out = Vec::new();
    for f in [0.5, 1.5] {
        let int = |v: usize| ((v as f64 * f).round() as usize).max(1);
        out.push((format!("cell_size x{f}"), GroundFilterParams { cell_size: d.cell_size * f, ..d }));
        out.push((format!("initial_window x{f}"), GroundFilterParams { initial_window: int(d.initial_window), ..d }));
        out.push((format!("max_window x{f}"), GroundFilterParams { max_window: int(d.max_window), ..d }));
        out.push((format!("window_growth x{f}"), GroundFilterParams { window_growth: d.window_growth * f, ..d }));
        out.push((
            format!("initial_threshold x{f}"),
            GroundFilterParams { initial_threshold: d.initial_threshold * f, ..d },
        ));
        out.push((format!("slope x{f}"), GroundFilterParams { slope: d.slope * f, ..d }));
        out.push((format!("max_threshold x{f}"), GroundFilterParams { max_threshold: d.max_threshold * f, ..d }));
    }
    out
}

fn criterion_7(c: &Corpus) -> Outcome {
    let accuracy = |gp: &GroundFilterParams| -> Result<f64, String> {
        let r = session_reports(c, gp).map_err(|e| e.to_string())?;
        Ok(evaluate(&r, &c.labels).accuracy.unwrap_or(0.0))
    };
    let base = accuracy(&GroundFilterParams::default())?;
    let mut worst = (String::new(), base);
    for (name, gp) in perturbations() {
        let acc = accuracy(&gp)?;
        if acc < worst.1 {
            worst = (name, acc);
        }
    }
    let detail = format!("baseline {base:.2}; worst {:.2} ({})", worst.1, if worst.0.is_empty() { "none lower" } else { &worst.0 });
    if base - worst.1 <= 0.05 + 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_file() {
            out.insert(path.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&path).unwrap());
        }
    }
    out
}

fn falldet(args: &[&std::ffi::OsStr]) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_falldet"))
        .args(args)
        .status()
        .map_err(|e| e.to_string())?;
    status.success().then_some(()).ok_or_else(|| format!("falldet {args:?} exited with {status}"))
}

fn criterion_8() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let scenario = tmp.path().join("scenario.toml");
    std::fs::write(&scenario, "[corpus]\nn_falls = 4\nn_nonfalls = 4\nseed = 8\n").unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for out in [&a, &b] {
        falldet(&["synth".as_ref(), scenario.as_os_str(), "--out".as_ref(), out.as_os_str()])?;
    }
    let (ta, tb) = (tree(&a), tree(&b));
    if ta != tb || ta.len() != 2 * 8 + 2 {
        return Err("synth outputs differ between runs".into());
    }
    let (ra, rb) = (tmp.path().join("ra.json"), tmp.path().join("rb.json"));
    for out in [&ra, &rb] {
        falldet(&["classify".as_ref(), a.as_os_str(), "--report".as_ref(), out.as_os_str()])?;
    }
    let (ja, jb) = (std::fs::read(&ra).unwrap(), std::fs::read(&rb).unwrap());
    if ja != jb || ja.is_empty() {
        return Err("classify reports differ between runs".into());
    }
    Ok(format!("synth wrote {} identical files twice; classify report {} bytes identical", ta.len(), ja.len()))
}

fn main() {
    let render_start = Instant::now();
    let c = corpus();
    let render = render_start.elapsed();
    let results: Vec<(u32, &str, Outcome)> = vec![
        (1, "closed-form oracles", criterion_1()),
        (2, "morphology and filter oracles", criterion_2()),
        (3, "slope tolerance and box rejection", criterion_3()),
        (4, "corpus accuracy", criterion_4(&c, render)),
        (5, "threshold sweep shape", criterion_5(&c)),
        (6, "kneeling, couch and bed fixtures", criterion_6()),
        (7, "ground parameter robustness", criterion_7(&c)),
        (8, "determinism of synth and classify", criterion_8()),
    ];
    let mut failed = 0;
    for (n, name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS criterion {n} ({name}): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {n} ({name}): {detail}");
            }
        }
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
