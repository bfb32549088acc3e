use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::archetype::{Archetype, ArchetypeLibrary, BodyFrame, REFERENCE_HEIGHT};
use super::scenario::{PersonSpec, ScenarioSpec};
use crate::error::{Error, Result};
use crate::geometry::{CameraIntrinsics, DepthFrame, Point3, SensorRange};
use crate::pipeline::FrameBundle;
use crate::pose::{Keypoint2D, KeypointId, PoseDetection2D};

use KeypointId::*;

/// Radius of the sphere drawn at each joint, meters.
pub fn joint_radius(id: KeypointId) -> f64 {
    match id {
        Nose | RightEar | LeftEar => 0.025,
        RightEye | LeftEye => 0.02,
        Neck => 0.055,
        Chest => 0.10,
        RightShoulder | LeftShoulder | RightKnee | LeftKnee => 0.06,
        RightElbow | LeftElbow => 0.045,
        RightWrist | LeftWrist => 0.04,
        RightHip | LeftHip => 0.08,
        RightAnkle | LeftAnkle => 0.05,
    }
}

pub const HEAD_RADIUS: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq)]
enum End {
    Joint(KeypointId),
    /// Centre of the head sphere, midway between the ears.
    Head,
    /// Midway between the hips.
    MidHip,
}

/// Limb capsules and their radii.
const CAPSULES: [(End, End, f64); 15] = [
    (End::Joint(Neck), End::Head, 0.05),
    (End::Joint(RightShoulder), End::Joint(LeftShoulder), 0.06),
    (End::Joint(Neck), End::Joint(Chest), 0.10),
    (End::Joint(Chest), End::MidHip, 0.12),
    (End::Joint(RightShoulder), End::Joint(RightHip), 0.08),
    (End::Joint(LeftShoulder), End::Joint(LeftHip), 0.08),
    (End::Joint(RightHip), End::Joint(LeftHip), 0.09),
    (End::Joint(RightShoulder), End::Joint(RightElbow), 0.045),
    (End::Joint(LeftShoulder), End::Joint(LeftElbow), 0.045),
    (End::Joint(RightElbow), End::Joint(RightWrist), 0.04),
    (End::Joint(LeftElbow), End::Joint(LeftWrist), 0.04),
    (End::Joint(RightHip), End::Joint(RightKnee), 0.07),
    (End::Joint(LeftHip), End::Joint(LeftKnee), 0.07),
    (End::Joint(RightKnee), End::Joint(RightAnkle), 0.055),
    (End::Joint(LeftKnee), End::Joint(LeftAnkle), 0.055),
];

fn touches(end: End, id: KeypointId) -> bool {
    match end {
        End::Joint(j) => j == id,
        End::Head => matches!(id, Nose | RightEye | LeftEye | RightEar | LeftEar),
        End::MidHip => matches!(id, RightHip | LeftHip),
    }
}

/// Largest radius among the primitives meeting at a joint; a keypoint is
/// visible when the first surface along its ray is no nearer than this.
pub fn visibility_radius(id: KeypointId) -> f64 {
    let mut r = joint_radius(id);
    if touches(End::Head, id) {
        r = r.max(HEAD_RADIUS);
    }
    for (a, b, rad) in CAPSULES {
        if touches(a, id) || touches(b, id) {
            r = r.max(rad);
        }
    }
    r
}

#[derive(Debug, Clone, Copy)]
enum Shape {
    Sphere { c: Point3, r: f64 },
    Capsule { a: Point3, b: Point3, r: f64 },
    Cuboid { c: Point3, axes: [Point3; 3], half: [f64; 3] },
}

impl Shape {
    /// Ray parameter `t` of the first hit along `t * d`, with `d.z == 1`.
    fn hit(&self, d: Point3) -> Option<f64> {
        match *self {
            Shape::Sphere { c, r } => {
                let a = d.dot(d);
                let b = d.dot(c);
                let disc = b * b - a * (c.dot(c) - r * r);
                if disc < 0.0 {
                    return None;
                }
                let t = (b - disc.sqrt()) / a;
                (t > 1e-9).then_some(t)
            }
            Shape::Capsule { a, b, r } => {
                let len = d.norm();
                capsule_hit(d / len, a, b, r).map(|t| t / len)
            }
            Shape::Cuboid { c, axes, half } => {
                let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
                for i in 0..3 {
                    let o = -c.dot(axes[i]);
                    let dd = d.dot(axes[i]);
                    if dd.abs() < 1e-12 {
                        if o.abs() > half[i] {
                            return None;
                        }
                        continue;
                    }
                    let (mut a, mut b) = ((-half[i] - o) / dd, (half[i] - o) / dd);
                    if a > b {
                        std::mem::swap(&mut a, &mut b);
                    }
                    t0 = t0.max(a);
                    t1 = t1.min(b);
                    if t0 > t1 {
                        return None;
                    }
                }
                (t0 > 1e-9).then_some(t0)
            }
        }
    }

    fn bounds(&self) -> (Point3, Point3) {
        match *self {
            Shape::Sphere { c, r } => {
                let e = Point3::new(r, r, r);
                (c - e, c + e)
            }
            Shape::Capsule { a, b, r } => {
                let e = Point3::new(r, r, r);
                (a.min(b) - e, a.max(b) + e)
            }
            Shape::Cuboid { c, axes, half } => {
                let mut e = Point3::ORIGIN;
                for (ax, h) in axes.iter().zip(half) {
                    e += Point3::new(ax.x.abs(), ax.y.abs(), ax.z.abs()) * h;
                }
                (c - e, c + e)
            }
        }
    }
}

/// Ray-capsule intersection for a unit direction from the origin.
fn capsule_hit(rd: Point3, pa: Point3, pb: Point3, r: f64) -> Option<f64> {
    let ba = pb - pa;
    let oa = -pa;
    let baba = ba.dot(ba);
    if baba < 1e-18 {
        return Shape::Sphere { c: pa, r }.hit(rd);
    }
    let bard = ba.dot(rd);
    let baoa = ba.dot(oa);
    let rdoa = rd.dot(oa);
    let oaoa = oa.dot(oa);
    let a = baba - bard * bard;
    let b = baba * rdoa - baoa * bard;
    let c = baba * oaoa - baoa * baoa - r * r * baba;
    let h = b * b - a * c;
    if a > 1e-12 && h >= 0.0 {
        let t = (-b - h.sqrt()) / a;
        let y = baoa + t * bard;
        if y > 0.0 && y < baba {
            return (t > 1e-9).then_some(t);
        }
    }
    // End caps.
    let t = [pa, pb]
        .iter()
        .filter_map(|&c| Shape::Sphere { c, r }.hit(rd))
        .fold(f64::INFINITY, f64::min);
    t.is_finite().then_some(t)
}

/// Bit set of the keypoints a primitive belongs to.
fn bit(id: KeypointId) -> u32 {
    1 << id as u32
}

fn end_bits(end: End) -> u32 {
    match end {
        End::Joint(j) => bit(j),
        End::Head => 0,
        End::MidHip => bit(RightHip) | bit(LeftHip),
    }
}

#[derive(Debug, Clone)]
struct Group {
    shapes: Vec<(Shape, u32)>,
    /// Pixel rectangle `[u0, v0, u1, v1]` outside which no shape can be hit.
    rect: [f64; 4],
}

impl Group {
    fn new(shapes: Vec<(Shape, u32)>, k: &CameraIntrinsics) -> Self {
        let (mut lo, mut hi) = shapes[0].0.bounds();
        for (s, _) in &shapes[1..] {
            let (l, h) = s.bounds();
            lo = lo.min(l);
            hi = hi.max(h);
        }
        let rect = if lo.z <= 1e-3 {
            [f64::NEG_INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::INFINITY]
        } else {
            let mut r = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
            for i in 0..8 {
                let p = Point3::new(
                    if i & 1 == 0 { lo.x } else { hi.x },
                    if i & 2 == 0 { lo.y } else { hi.y },
                    if i & 4 == 0 { lo.z } else { hi.z },
                );
                let (u, v) = (k.fx * p.x / p.z + k.cx, k.fy * p.y / p.z + k.cy);
                r = [r[0].min(u), r[1].min(v), r[2].max(u), r[3].max(v)];
            }
            [r[0] - 1.0, r[1] - 1.0, r[2] + 1.0, r[3] + 1.0]
        };
        Self { shapes, rect }
    }
}

/// What a ray hit first.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Hit {
    z: f64,
    floor: bool,
    /// Keypoints the hit primitive belongs to.
    parts: u32,
}

struct Scene {
    k: CameraIntrinsics,
    floor_n: Point3,
    floor_c: f64,
    max_range: f64,
    groups: Vec<Group>,
}

impl Scene {
    fn cast(&self, u: f64, v: f64) -> Option<Hit> {
        let d = Point3::new((u - self.k.cx) / self.k.fx, (v - self.k.cy) / self.k.fy, 1.0);
        let mut best: Option<Hit> = None;
        let nd = self.floor_n.dot(d);
        if nd.abs() > 1e-12 {
            let t = self.floor_c / nd;
            if t > 1e-9 {
                best = Some(Hit { z: t, floor: true, parts: 0 });
            }
        }
        for g in &self.groups {
            if u < g.rect[0] || v < g.rect[1] || u > g.rect[2] || v > g.rect[3] {
                continue;
            }
            for &(s, parts) in &g.shapes {
                if let Some(t) = s.hit(d) {
                    if best.is_none_or(|b| t < b.z) {
                        best = Some(Hit { z: t, floor: false, parts });
                    }
                }
            }
        }
        best.filter(|h| h.z <= self.max_range)
    }
}

/// A posed person in camera coordinates.
#[derive(Debug, Clone)]
pub struct PlacedPerson {
    pub joints: BTreeMap<KeypointId, Point3>,
    pub fallen: bool,
    shapes: Vec<(Shape, u32)>,
    props: Vec<(Shape, u32)>,
}

/// Floor geometry of a scenario: `n · p = c` with `n` pointing up.
#[derive(Debug, Clone, Copy)]
pub struct Floor {
    pub n: Point3,
    pub c: f64,
}

impl Floor {
    pub fn of(spec: &ScenarioSpec) -> Self {
        let th = spec.floor.slope_deg.to_radians();
        let n = Point3::new(0.0, -th.cos(), -th.sin());
        let c = n.dot(Point3::new(0.0, spec.floor.camera_height, spec.floor.pivot_z));
        Self { n, c }
    }

    /// The floor point below or above `(x, z)`.
    pub fn at(&self, x: f64, z: f64) -> Point3 {
        let y = (self.c - self.n.z * z - self.n.x * x) / self.n.y;
        Point3::new(x, y, z)
    }

    /// Signed height of `p` above the floor along its normal.
    pub fn height(&self, p: Point3) -> f64 {
        self.n.dot(p) - self.c
    }
}

pub fn place_person(person: &PersonSpec, archetype: &Archetype, floor: &Floor) -> PlacedPerson {
    let gravity_up = Point3::new(0.0, -1.0, 0.0);
    let up = match archetype.frame {
        BodyFrame::Gravity => gravity_up,
        BodyFrame::Floor => floor.n,
    };
    let anchor = floor.at(person.position[0], person.position[1]);
    let toward_camera = Point3::new(0.0, 0.0, -1.0);
    let f0 = (toward_camera - up * toward_camera.dot(up)).normalized().expect("up is never along z");
    let (sy, cy) = person.yaw_deg.to_radians().sin_cos();
    let fwd = f0 * cy + up.cross(f0) * sy;
    let right = fwd.cross(up);
    let s = person.scale / REFERENCE_HEIGHT;
    let su = if archetype.scale_up { s } else { 1.0 };
    let place = |j: [f64; 3], scale: f64, scale_up: f64, base: f64| {
        anchor + right * (j[0] * scale) + up * (j[1] * scale_up + base) + fwd * (j[2] * scale)
    };
    let joints: BTreeMap<KeypointId, Point3> = archetype
        .joints
        .iter()
        .map(|(&id, &j)| (id, place(j, s, su, archetype.base_up)))
        .collect();
    let end = |e: End| match e {
        End::Joint(id) => joints[&id],
        End::Head => (joints[&RightEar] + joints[&LeftEar]) * 0.5,
        End::MidHip => (joints[&RightHip] + joints[&LeftHip]) * 0.5,
    };
    let mut shapes: Vec<(Shape, u32)> = joints
        .iter()
        .map(|(&id, &c)| (Shape::Sphere { c, r: joint_radius(id) }, bit(id)))
        .collect();
    shapes.push((Shape::Sphere { c: end(End::Head), r: HEAD_RADIUS }, 0));
    for (a, b, r) in CAPSULES {
        shapes.push((Shape::Capsule { a: end(a), b: end(b), r }, end_bits(a) | end_bits(b)));
    }
    let props = archetype
        .props
        .iter()
        .map(|p| {
            let shape = Shape::Cuboid {
                c: place(p.center, 1.0, 1.0, 0.0),
                axes: [right, up, fwd],
                half: [p.size[0] / 2.0, p.size[1] / 2.0, p.size[2] / 2.0],
            };
            (shape, 0)
        })
        .collect();
    PlacedPerson {
        joints,
        fallen: archetype.fallen,
        shapes,
        props,
    }
}

/// One rendered frame with its ground truth.
#[derive(Debug, Clone)]
pub struct GeneratedFrame {
    pub bundle: FrameBundle,
    /// Fallen label per person, in keypoint-file order.
    pub fallen: Vec<bool>,
    /// True joint positions per person.
    pub joints: Vec<BTreeMap<KeypointId, Point3>>,
    /// Per pixel: `Some(true)` for floor, `Some(false)` for anything else,
    /// `None` where the frame has no depth.
    pub ground_truth: Vec<Option<bool>>,
}

impl GeneratedFrame {
    /// Ground-truth flags in the order `cloud_from_depth` emits points.
    pub fn cloud_truth(&self) -> Vec<bool> {
        self.ground_truth.iter().filter_map(|&g| g).collect()
    }
}

fn build_scene(spec: &ScenarioSpec, k: &CameraIntrinsics, people: &[PlacedPerson], floor: Floor) -> Scene {
    let mut groups = Vec::new();
    for b in &spec.furniture {
        let base = floor.at(b.position[0], b.position[1]);
        let c = base + Point3::new(0.0, -(b.elevation + b.size[1] / 2.0), 0.0);
        let shape = Shape::Cuboid {
            c,
            axes: [Point3::new(1.0, 0.0, 0.0), Point3::new(0.0, 1.0, 0.0), Point3::new(0.0, 0.0, 1.0)],
            half: [b.size[0] / 2.0, b.size[1] / 2.0, b.size[2] / 2.0],
        };
        groups.push(Group::new(vec![(shape, 0)], k));
    }
    for p in people {
        groups.push(Group::new(p.shapes.clone(), k));
        if !p.props.is_empty() {
            groups.push(Group::new(p.props.clone(), k));
        }
    }
    Scene {
        k: *k,
        floor_n: floor.n,
        floor_c: floor.c,
        max_range: spec.max_range,
        groups,
    }
}

fn place_people(
    spec: &ScenarioSpec,
    k: &CameraIntrinsics,
    lib: &ArchetypeLibrary,
) -> Result<(Floor, Vec<PlacedPerson>)> {
    spec.validate(lib)?;
    k.validate()?;
    let floor = Floor::of(spec);
    let people = spec
        .person
        .iter()
        .map(|p| Ok(place_person(p, lib.get(&p.archetype)?, &floor)))
        .collect::<Result<_>>()?;
    Ok((floor, people))
}

fn outside_frustum(people: &[PlacedPerson], k: &CameraIntrinsics) -> Option<usize> {
    people.iter().position(|p| {
        !p.joints
            .values()
            .all(|&j| j.z > 0.1 && k.project(j).is_some_and(|(u, v)| k.contains(u, v)))
    })
}

/// Whether every joint of every person projects into the image.
pub fn fits_frustum(spec: &ScenarioSpec, k: &CameraIntrinsics, lib: &ArchetypeLibrary) -> Result<bool> {
    let (_, people) = place_people(spec, k, lib)?;
    Ok(outside_frustum(&people, k).is_none())
}

/// A keypoint shows when its ray first meets its own body part, or any
/// surface no nearer than its visibility radius.
fn sees(hit: Hit, id: KeypointId, joint: Point3) -> bool {
    hit.parts & bit(id) != 0 || hit.z >= joint.z - visibility_radius(id) - 0.005
}

/// Renders one frame of `spec` with the given RNG seed.
pub fn generate_with_seed(
    spec: &ScenarioSpec,
    k: &CameraIntrinsics,
    lib: &ArchetypeLibrary,
    frame_id: u64,
    seed: u64,
) -> Result<GeneratedFrame> {
    let (floor, people) = place_people(spec, k, lib)?;
    if let Some(i) = outside_frustum(&people, k) {
        return Err(Error::Scenario(format!("person {i} is outside the camera frustum")));
    }
    let scene = build_scene(spec, k, &people, floor);
    let (w, h) = (k.width as usize, k.height as usize);
    let hits: Vec<Option<Hit>> = (0..h)
        .into_par_iter()
        .flat_map_iter(|v| {
            let scene = &scene;
            (0..w).map(move |u| scene.cast(u as f64, v as f64))
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = &spec.noise;
    let range = SensorRange::default();
    let mut raw = Vec::with_capacity(w * h);
    let mut truth = Vec::with_capacity(w * h);
    for hit in &hits {
        let hole: f64 = rng.random();
        let g: f64 = rng.sample(StandardNormal);
        match hit {
            Some(hit) if hole >= noise.hole_probability => {
                let z = hit.z + noise.depth_sigma * g;
                if range.contains(z) {
                    raw.push(z as f32);
                    truth.push(Some(hit.floor));
                } else {
                    raw.push(f32::NAN);
                    truth.push(None);
                }
            }
            _ => {
                raw.push(f32::NAN);
                truth.push(None);
            }
        }
    }
    let depth = DepthFrame::from_meters(k.width, k.height, &raw, range)?;
    // from_meters may reject values that round outside the range as f32.
    for (t, d) in truth.iter_mut().zip(depth.raw()) {
        if d.is_none() {
            *t = None;
        }
    }

    let [lo, hi] = noise.confidence;
    let mut poses = Vec::with_capacity(people.len());
    for p in &people {
        let mut kps = Vec::new();
        for id in KeypointId::ALL {
            let drop: f64 = rng.random();
            let u01: f64 = rng.random();
            let confidence = lo + (hi - lo) * u01;
            let joint = p.joints[&id];
            let Some((u, v)) = k.project(joint) else { continue };
            if !k.contains(u, v) || drop < noise.dropout {
                continue;
            }
            let visible = scene.cast(u, v).is_some_and(|hit| sees(hit, id, joint));
            if visible {
                kps.push(Keypoint2D::new(id, u, v, confidence.clamp(0.0, 1.0))?);
            }
        }
        poses.push(PoseDetection2D::new(kps)?);
    }

    Ok(GeneratedFrame {
        bundle: FrameBundle {
            frame_id,
            timestamp: frame_id as f64,
            depth,
            intrinsics: *k,
            poses,
        },
        fallen: people.iter().map(|p| p.fallen).collect(),
        joints: people.into_iter().map(|p| p.joints).collect(),
        ground_truth: truth,
    })
}

/// Renders the first frame of `spec`.
pub fn generate(spec: &ScenarioSpec, k: &CameraIntrinsics, lib: &ArchetypeLibrary) -> Result<GeneratedFrame> {
    generate_with_seed(spec, k, lib, 0, spec.seed)
}

/// Renders all `spec.frames` frames; frame `i` uses seed `spec.seed + i`.
pub fn generate_frames(
    spec: &ScenarioSpec,
    k: &CameraIntrinsics,
    lib: &ArchetypeLibrary,
    first_id: u64,
) -> Result<Vec<GeneratedFrame>> {
    (0..spec.frames as u64)
        .map(|i| generate_with_seed(spec, k, lib, first_id + i, spec.seed.wrapping_add(i)))
        .collect()
}
