//! Procedural meshes: analytic test bodies, articulated box figures and
//! vertex noise. Used by tests, benchmarks and the CLI's demo corpus.

use std::collections::HashMap;

use nalgebra::{Matrix3, Rotation3, Vector3};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Normal};

use crate::mesh::TriMesh;

pub fn seeded_rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// The cube `[0,1]^3` as 12 outward-facing triangles.
pub fn unit_cube() -> TriMesh {
    box_mesh(Vector3::repeat(0.5), Vector3::repeat(0.5), 1)
}

/// Axis-aligned box with each face split into `subdiv x subdiv` quads.
/// Faces do not share vertices.
pub fn box_mesh(center: Vector3<f64>, half: Vector3<f64>, subdiv: usize) -> TriMesh {
    let s = subdiv.max(1);
    let mut vertices = Vec::with_capacity(6 * (s + 1) * (s + 1));
    let mut faces = Vec::with_capacity(12 * s * s);
    // (normal axis, sign); tangent axes chosen so that u x v = sign * e_axis.
    for axis in 0..3 {
        for sign in [1.0, -1.0] {
            let (mut ua, mut va) = ((axis + 1) % 3, (axis + 2) % 3);
            if sign < 0.0 {
                std::mem::swap(&mut ua, &mut va);
            }
            let base = vertices.len();
            for i in 0..=s {
                for j in 0..=s {
                    let mut p = Vector3::zeros();
                    p[axis] = sign;
                    p[ua] = -1.0 + 2.0 * i as f64 / s as f64;
                    p[va] = -1.0 + 2.0 * j as f64 / s as f64;
                    vertices.push(center + p.component_mul(&half));
                }
            }
            let at = |i: usize, j: usize| base + i * (s + 1) + j;
            for i in 0..s {
                for j in 0..s {
                    faces.push([at(i, j), at(i + 1, j), at(i + 1, j + 1)]);
                    faces.push([at(i, j), at(i + 1, j + 1), at(i, j + 1)]);
                }
            }
        }
    }
    TriMesh { vertices, faces }
}

/// Geodesic sphere from a subdivided icosahedron; `20 * 4^subdiv` faces.
pub fn icosphere(subdiv: usize, radius: f64) -> TriMesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<Vector3<f64>> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .iter()
    .map(|p| Vector3::from(*p).normalize())
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdiv {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Vector3<f64>>| {
            *cache.entry((a.min(b), a.max(b))).or_insert_with(|| {
                vertices.push(((vertices[a] + vertices[b]) * 0.5).normalize());
                vertices.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    for v in &mut vertices {
        *v *= radius;
    }
    TriMesh { vertices, faces }
}

/// Uniformly random rotation.
pub fn random_rotation(rng: &mut impl Rng) -> Rotation3<f64> {
    // Unit quaternion from four normals.
    let normal = Normal::new(0.0, 1.0).unwrap();
    let q = nalgebra::Quaternion::new(
        normal.sample(rng),
        normal.sample(rng),
        normal.sample(rng),
        normal.sample(rng),
    );
    nalgebra::UnitQuaternion::from_quaternion(q).to_rotation_matrix()
}

/// A convex polytope: an icosphere under a random orientation-preserving
/// linear map, then shifted. Linear images of convex sets stay convex.
pub fn random_convex_polytope(rng: &mut impl Rng) -> TriMesh {
    let base = icosphere(rng.gen_range(1..=2), 1.0);
    let stretch = Matrix3::from_diagonal(&Vector3::new(
        rng.gen_range(0.4..2.0),
        rng.gen_range(0.4..2.0),
        rng.gen_range(0.4..2.0),
    ));
    let map = random_rotation(rng).matrix() * stretch * random_rotation(rng).matrix();
    let shift = Vector3::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    base.map_vertices(|v| map * v + shift)
}

/// Joint angles, in radians, of a box-built humanoid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    /// Arm elevation about the body's sagittal axis; 0 hangs down, pi points up.
    pub left_shoulder: f64,
    pub right_shoulder: f64,
    /// Forearm bend relative to the upper arm, forward.
    pub left_elbow: f64,
    pub right_elbow: f64,
    /// Leg swing forward about the hip.
    pub left_hip: f64,
    pub right_hip: f64,
    /// Shin bend backward at the knee.
    pub left_knee: f64,
    pub right_knee: f64,
    /// Forward lean of the torso and head.
    pub lean: f64,
}

impl Pose {
    pub const STANDING: Pose = Pose {
        left_shoulder: 0.15,
        right_shoulder: 0.15,
        left_elbow: 0.0,
        right_elbow: 0.0,
        left_hip: 0.0,
        right_hip: 0.0,
        left_knee: 0.0,
        right_knee: 0.0,
        lean: 0.0,
    };

    /// Five distinct poses used for the synthetic retrieval corpus.
    pub fn classes() -> [(&'static str, Pose); 5] {
        use std::f64::consts::FRAC_PI_2;
        [
            ("stand", Pose::STANDING),
            (
                "t_pose",
                Pose {
                    left_shoulder: FRAC_PI_2,
                    right_shoulder: FRAC_PI_2,
                    ..Pose::STANDING
                },
            ),
            (
                "reach",
                Pose {
                    left_shoulder: FRAC_PI_2,
                    right_shoulder: FRAC_PI_2,
                    left_elbow: FRAC_PI_2,
                    right_elbow: FRAC_PI_2,
                    ..Pose::STANDING
                },
            ),
            (
                "stride",
                Pose {
                    left_hip: 0.6,
                    right_hip: -0.5,
                    right_knee: 0.6,
                    left_elbow: 0.8,
                    right_elbow: 0.8,
                    ..Pose::STANDING
                },
            ),
            (
                "crouch",
                Pose {
                    left_hip: 1.2,
                    right_hip: 1.2,
                    left_knee: 1.9,
                    right_knee: 1.9,
                    lean: 0.5,
                    left_elbow: 1.4,
                    right_elbow: 1.4,
                    ..Pose::STANDING
                },
            ),
        ]
    }

    /// Joint-wise linear blend, `self` at `t = 0` and `other` at `t = 1`.
    pub fn lerp(&self, other: &Pose, t: f64) -> Pose {
        let mix = |a: f64, b: f64| a + (b - a) * t;
        Pose {
            left_shoulder: mix(self.left_shoulder, other.left_shoulder),
            right_shoulder: mix(self.right_shoulder, other.right_shoulder),
            left_elbow: mix(self.left_elbow, other.left_elbow),
            right_elbow: mix(self.right_elbow, other.right_elbow),
            left_hip: mix(self.left_hip, other.left_hip),
            right_hip: mix(self.right_hip, other.right_hip),
            left_knee: mix(self.left_knee, other.left_knee),
            right_knee: mix(self.right_knee, other.right_knee),
            lean: mix(self.lean, other.lean),
        }
    }

    pub fn random(rng: &mut impl Rng) -> Pose {
        Pose {
            left_shoulder: rng.gen_range(0.0..3.0),
            right_shoulder: rng.gen_range(0.0..3.0),
            left_elbow: rng.gen_range(0.0..2.0),
            right_elbow: rng.gen_range(0.0..2.0),
            left_hip: rng.gen_range(-0.6..1.4),
            right_hip: rng.gen_range(-0.6..1.4),
            left_knee: rng.gen_range(0.0..2.0),
            right_knee: rng.gen_range(0.0..2.0),
            lean: rng.gen_range(0.0..0.6),
        }
    }
}

/// A limb box hanging from `joint` along `-y` in its local frame, then
/// rotated by `rot` about the joint.
fn limb(joint: Vector3<f64>, rot: &Rotation3<f64>, half: Vector3<f64>, subdiv: usize) -> TriMesh {
    box_mesh(Vector3::new(0.0, -half.y, 0.0), half, subdiv).map_vertices(|v| joint + rot * v)
}

/// Humanoid of about 1.8 units height made of 14 boxes. `subdiv` controls
/// mesh density: each box face carries `2 * subdiv^2` triangles.
pub fn articulated_figure(pose: &Pose, subdiv: usize) -> TriMesh {
    let x = Vector3::x_axis();
    let z = Vector3::z_axis();
    let lean = Rotation3::from_axis_angle(&x, pose.lean);
    let pelvis = Vector3::new(0.0, 0.9, 0.0);
    let mut parts = Vec::new();

    // Torso and head lean forward about the pelvis.
    parts.push(box_mesh(Vector3::new(0.0, 0.3, 0.0), Vector3::new(0.2, 0.3, 0.1), subdiv).map_vertices(|v| pelvis + lean * v));
    parts.push(box_mesh(Vector3::new(0.0, 0.72, 0.0), Vector3::new(0.09, 0.11, 0.1), subdiv).map_vertices(|v| pelvis + lean * v));

    let arm = Vector3::new(0.05, 0.15, 0.05);
    for (side, shoulder, elbow) in [
        (1.0, pose.left_shoulder, pose.left_elbow),
        (-1.0, pose.right_shoulder, pose.right_elbow),
    ] {
        let joint = pelvis + lean * Vector3::new(side * 0.26, 0.58, 0.0);
        let upper = lean * Rotation3::from_axis_angle(&z, side * shoulder);
        parts.push(limb(joint, &upper, arm, subdiv));
        let wrist_rot = upper * Rotation3::from_axis_angle(&x, -elbow);
        let elbow_pos = joint + upper * Vector3::new(0.0, -2.0 * arm.y, 0.0);
        parts.push(limb(elbow_pos, &wrist_rot, arm * 0.9, subdiv));
        let hand_pos = elbow_pos + wrist_rot * Vector3::new(0.0, -1.8 * arm.y, 0.0);
        parts.push(limb(hand_pos, &wrist_rot, Vector3::new(0.04, 0.05, 0.02), subdiv));
    }

    let leg = Vector3::new(0.08, 0.22, 0.08);
    for (side, hip, knee) in [
        (1.0, pose.left_hip, pose.left_knee),
        (-1.0, pose.right_hip, pose.right_knee),
    ] {
        let joint = pelvis + Vector3::new(side * 0.1, 0.0, 0.0);
        let thigh = Rotation3::from_axis_angle(&x, -hip);
        parts.push(limb(joint, &thigh, leg, subdiv));
        let shin = thigh * Rotation3::from_axis_angle(&x, knee);
        let knee_pos = joint + thigh * Vector3::new(0.0, -2.0 * leg.y, 0.0);
        parts.push(limb(knee_pos, &shin, leg * 0.9, subdiv));
        let ankle = knee_pos + shin * Vector3::new(0.0, -1.8 * leg.y, 0.0);
        let foot = box_mesh(Vector3::new(0.0, -0.03, 0.06), Vector3::new(0.06, 0.03, 0.12), subdiv)
            .map_vertices(|v| ankle + shin * v);
        parts.push(foot);
    }

    parts
        .iter()
        .skip(1)
        .fold(parts[0].clone(), |acc, p| acc.merged(p))
}

/// Adds isotropic Gaussian noise with standard deviation
/// `fraction * bbox_diagonal` to every vertex coordinate.
pub fn jitter(mesh: &TriMesh, fraction: f64, rng: &mut impl Rng) -> TriMesh {
    let (lo, hi) = mesh.bounds();
    let sigma = fraction * (hi - lo).norm();
    if sigma <= 0.0 {
        return mesh.clone();
    }
    let normal = Normal::new(0.0, sigma).unwrap();
    let vertices = mesh
        .vertices()
        .iter()
        .map(|v| v + Vector3::from_fn(|_, _| normal.sample(rng)))
        .collect();
    TriMesh {
        vertices,
        faces: mesh.faces().to_vec(),
    }
}

/// Two box figures built from the same six boxes: one with both arms down,
/// one with the left arm translated above the shoulder. They share every
/// face normal and area, so their weighted-area functions coincide while
/// their breadth functions do not.
pub fn arm_raise_pair() -> (TriMesh, TriMesh) {
    let slab = |x0: f64, y0: f64, x1: f64, y1: f64| {
        let lo = Vector3::new(x0.min(x1), y0.min(y1), 0.0);
        let hi = Vector3::new(x0.max(x1), y0.max(y1), 0.5);
        box_mesh((lo + hi) * 0.5, (hi - lo) * 0.5, 1)
    };
    let common = [
        slab(0.5, 0.0, 1.0, 0.5),
        slab(0.25, 0.0, 1.25, -1.25),
        slab(1.25, 0.0, 1.5, -1.5),
        slab(0.25, -1.25, 0.75, -3.0),
        slab(0.75, -1.25, 1.25, -3.0),
    ];
    let body = common[1..].iter().fold(common[0].clone(), |a, b| a.merged(b));
    let arm_down = slab(0.0, 0.0, 0.25, -1.5);
    let arm_up = arm_down.translated(&Vector3::new(0.0, 1.25, 0.0));
    (body.merged(&arm_down), body.merged(&arm_up))
}
