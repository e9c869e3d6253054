//! Parametric hand-gesture fixtures.
//!
//! Every generator works in the radar frame with the `Internal20` layout:
//! the radar sits at the origin looking along +z, the hand hovers about
//! 0.25 m above it with the palm facing the radar and the fingers pointing
//! along +y. Two-handed gestures stack the right hand (joints 0..20) and a
//! mirrored left hand (joints 20..40).

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use nalgebra::{Rotation3, Unit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::hand_model::{
    joint, CoordFrame, JointFrameSequence, JointLayout, SkeletonFrame, STANDARD_BONE_LENGTHS,
};
use crate::{Error, Result, Vec3};

/// Default hover height of the wrist above the radar, meters.
pub const HOVER_HEIGHT: f64 = 0.25;

/// Knuckle offsets from the wrist (x, y) for index..pinky, meters at scale 1.
const KNUCKLES: [(f64, f64); 4] = [
    (0.024, 0.066),
    (0.006, 0.068),
    (-0.012, 0.064),
    (-0.028, 0.056),
];
/// Lateral spread of the phalanx direction for index..pinky.
const SPREAD: [f64; 4] = [0.08, 0.0, -0.08, -0.16];

/// Flexion of each finger, radians per joint (thumb first).
pub type Curl = [f64; 5];

fn rotate(v: Vec3, axis: Vec3, angle: f64) -> Vec3 {
    Rotation3::from_axis_angle(&Unit::new_normalize(axis), angle) * v
}

/// One right hand in its local frame (wrist at the origin, palm facing −z).
pub fn hand_pose(scale: f64, curl: Curl) -> Vec<Vec3> {
    let mut joints = vec![Vec3::zeros(); 20];
    let lengths = STANDARD_BONE_LENGTHS;

    // thumb: three bones out from the wrist towards +x
    let dir = Vec3::new(0.75, 0.6, -0.15).normalize();
    let lateral = dir.cross(&Vec3::z()).normalize();
    let mut p = Vec3::zeros();
    for k in 0..3 {
        let d = rotate(dir, lateral, -curl[0] * k as f64);
        p += d * lengths[k] * scale;
        joints[joint::FINGER_START[0] + k] = p;
    }

    let mut seg = 3;
    for f in 0..4 {
        let start = joint::FINGER_START[f + 1];
        let (kx, ky) = KNUCKLES[f];
        joints[start] = Vec3::new(kx, ky, 0.0) * scale;
        seg += 1;
        let dir = Vec3::new(SPREAD[f], 1.0, 0.12).normalize();
        let lateral = dir.cross(&Vec3::z()).normalize();
        let mut p = joints[start];
        for k in 1..4 {
            let d = rotate(dir, lateral, -curl[f + 1] * k as f64);
            p += d * lengths[seg] * scale;
            joints[start + k] = p;
            seg += 1;
        }
    }
    joints
}

/// Mirror image of a hand through the local x = 0 plane.
pub fn mirrored(hand: &[Vec3]) -> Vec<Vec3> {
    hand.iter().map(|j| Vec3::new(-j.x, j.y, j.z)).collect()
}

/// Places a local-frame hand with its wrist at `wrist`, optionally tilted
/// about x (pitch) and z (yaw).
pub fn place(hand: &[Vec3], wrist: Vec3, pitch: f64, yaw: f64) -> Vec<Vec3> {
    let rot = Rotation3::from_euler_angles(pitch, 0.0, yaw);
    hand.iter().map(|j| rot * j + wrist).collect()
}

/// The flat reference pose: open hand, wrist 0.25 m above the radar.
pub fn canonical_hand(scale: f64) -> Vec<Vec3> {
    place(
        &hand_pose(scale, [0.0; 5]),
        Vec3::new(0.0, -0.05 * scale, HOVER_HEIGHT),
        0.0,
        0.0,
    )
}

/// Builds a radar-frame `Internal20` sequence by sampling `pose(t)` at
/// `rate` Hz over `duration` seconds (both ends included).
pub fn sequence_from_fn(
    duration: f64,
    rate: f64,
    hands: usize,
    mut pose: impl FnMut(f64) -> Vec<Vec3>,
) -> Result<JointFrameSequence> {
    if !(duration > 0.0 && rate > 0.0) {
        return Err(Error::InvalidArgument(
            "duration and rate must be positive".into(),
        ));
    }
    let n = (duration * rate).round() as usize + 1;
    let frames = (0..n)
        .map(|i| {
            let t = i as f64 / rate;
            SkeletonFrame { t, joints: pose(t) }
        })
        .collect();
    JointFrameSequence::new(JointLayout::Internal20, CoordFrame::Radar, hands, frames)
}

/// The ten gesture classes of the fixture set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GestureKind {
    Grasp,
    FingerFriction,
    FingerWave,
    Circle,
    Slide,
    FingerCross,
    DoubleClap,
    DoubleDrumming,
    HandMerge,
    DoubleCircle,
}

impl GestureKind {
    pub const ALL: [GestureKind; 10] = [
        GestureKind::Grasp,
        GestureKind::FingerFriction,
        GestureKind::FingerWave,
        GestureKind::Circle,
        GestureKind::Slide,
        GestureKind::FingerCross,
        GestureKind::DoubleClap,
        GestureKind::DoubleDrumming,
        GestureKind::HandMerge,
        GestureKind::DoubleCircle,
    ];

    pub fn hands(self) -> usize {
        match self {
            GestureKind::DoubleClap
            | GestureKind::DoubleDrumming
            | GestureKind::HandMerge
            | GestureKind::DoubleCircle => 2,
            _ => 1,
        }
    }

    /// Whether fingers of the gesture hide each other for part of the motion.
    pub fn self_occluding(self) -> bool {
        matches!(
            self,
            GestureKind::Grasp
                | GestureKind::FingerCross
                | GestureKind::HandMerge
                | GestureKind::FingerFriction
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            GestureKind::Grasp => "grasp",
            GestureKind::FingerFriction => "finger_friction",
            GestureKind::FingerWave => "finger_wave",
            GestureKind::Circle => "circle",
            GestureKind::Slide => "slide",
            GestureKind::FingerCross => "finger_cross",
            GestureKind::DoubleClap => "double_clap",
            GestureKind::DoubleDrumming => "double_drumming",
            GestureKind::HandMerge => "hand_merge",
            GestureKind::DoubleCircle => "double_circle",
        }
    }
}

impl fmt::Display for GestureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GestureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GestureKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown gesture `{s}`")))
    }
}

/// Parameters of one generated gesture performance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GestureSpec {
    pub kind: GestureKind,
    /// Seconds; 1.6 s covers 16 radar frames at the default timing.
    pub duration: f64,
    /// Skeleton sampling rate, Hz.
    pub sensor_rate: f64,
    /// Hand size multiplier.
    pub scale: f64,
    /// Azimuth of the hand as seen from the radar, degrees.
    pub angle_deg: f64,
    /// Motion amplitude multiplier.
    pub speed: f64,
    /// Seeds small performer-to-performer variations.
    pub seed: u64,
}

impl Default for GestureSpec {
    fn default() -> Self {
        Self {
            kind: GestureKind::Circle,
            duration: 1.6,
            sensor_rate: 60.0,
            scale: 1.0,
            angle_deg: 0.0,
            speed: 1.0,
            seed: 0,
        }
    }
}

impl GestureSpec {
    pub fn new(kind: GestureKind) -> Self {
        Self {
            kind,
            ..Self::default()
        }
    }
}

/// Performer-specific jitter drawn once per gesture.
struct Style {
    phase: f64,
    amp: f64,
    tempo: f64,
    offset: Vec3,
}

impl Style {
    fn draw(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self {
            phase: rng.gen_range(-0.3..0.3),
            amp: rng.gen_range(0.85..1.15),
            tempo: rng.gen_range(0.9..1.1),
            offset: Vec3::new(
                rng.gen_range(-0.015..0.015),
                rng.gen_range(-0.015..0.015),
                rng.gen_range(-0.02..0.02),
            ),
        }
    }
}

/// Generates the skeleton sequence of a gesture.
pub fn generate(spec: &GestureSpec) -> Result<JointFrameSequence> {
    if !(spec.scale > 0.0 && spec.speed >= 0.0 && spec.angle_deg.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "invalid gesture spec {spec:?}"
        )));
    }
    let style = Style::draw(spec.seed);
    let s = spec.scale;
    let amp = spec.speed * style.amp;
    let azimuth = Rotation3::from_axis_angle(&Vec3::y_axis(), spec.angle_deg.to_radians());
    let base = Vec3::new(0.0, -0.05 * s, HOVER_HEIGHT) + style.offset;
    let dur = spec.duration;
    let kind = spec.kind;
    let open = hand_pose(s, [0.0; 5]);

    let pose = move |t: f64| -> Vec<Vec3> {
        let u = t / dur;
        // cycles completed so far, with per-performer tempo and phase
        let cyc = |n: f64| TAU * n * style.tempo * u + style.phase;
        let joints = match kind {
            GestureKind::Grasp => {
                let c = 0.55 * amp * (1.0 - cyc(2.0).cos());
                place(&hand_pose(s, [c * 0.6, c, c, c, c]), base, 0.0, 0.0)
            }
            GestureKind::FingerFriction => {
                let rub = 0.35 * amp * cyc(4.0).sin();
                let mut curl = [0.5, 0.5, 0.15, 0.15, 0.15];
                curl[0] += rub;
                curl[1] -= rub;
                place(&hand_pose(s, curl), base, 0.0, 0.0)
            }
            GestureKind::FingerWave => {
                let mut curl = [0.0; 5];
                for (f, c) in curl.iter_mut().enumerate() {
                    *c = 0.4 * amp * (1.0 - (cyc(2.0) - 0.9 * f as f64).cos());
                }
                place(&hand_pose(s, curl), base, 0.0, 0.0)
            }
            GestureKind::Circle => {
                let r = 0.06 * amp;
                let a = cyc(2.0);
                place(
                    &open,
                    base + Vec3::new(0.0, r * a.cos() - r, r * a.sin()),
                    0.0,
                    0.0,
                )
            }
            GestureKind::Slide => {
                let x = 0.09 * amp * (PI * style.tempo * u).sin() - 0.03;
                let z = -0.05 * amp * (PI * u).sin();
                place(
                    &open,
                    base + Vec3::new(x, 0.12 * amp * (u - 0.5), z),
                    0.0,
                    0.0,
                )
            }
            GestureKind::FingerCross => {
                let c = 0.5 * (1.0 - cyc(2.0).cos()) * amp;
                let mut hand = hand_pose(s, [0.4, 0.1, 0.1, 0.9, 0.9]);
                let tip_shift = Vec3::new(-0.02 * s * c, 0.0, -0.01 * s * c);
                for k in 1..4 {
                    hand[joint::FINGER_START[1] + k] += tip_shift * k as f64 / 3.0;
                    hand[joint::FINGER_START[2] + k] -= tip_shift * k as f64 / 3.0;
                }
                place(&hand, base, 0.0, 0.0)
            }
            GestureKind::DoubleClap => {
                let gap = 0.06 + 0.07 * amp * (0.5 + 0.5 * cyc(2.0).cos());
                two_hands(&open, base, gap, 0.0, 0.0, 1.1)
            }
            GestureKind::DoubleDrumming => {
                let dz = 0.035 * amp;
                let a = cyc(3.0);
                two_hands(&open, base, 0.16, dz * a.sin(), -dz * a.sin(), 0.0)
            }
            GestureKind::HandMerge => {
                let gap = 0.22 - 0.16 * amp.min(1.3) * (0.5 - 0.5 * (PI * u).cos());
                let dz = 0.03 * amp * (PI * u).sin();
                two_hands(&open, base, gap, -dz, -dz, 0.0)
            }
            GestureKind::DoubleCircle => {
                let r = 0.045 * amp;
                let a = cyc(2.0);
                let right = place(
                    &open,
                    base + Vec3::new(0.09, r * a.cos() - r, r * a.sin()),
                    0.0,
                    0.0,
                );
                let left = place(
                    &mirrored(&open),
                    base + Vec3::new(-0.09, r * a.cos() - r, -r * a.sin()),
                    0.0,
                    0.0,
                );
                [right, left].concat()
            }
        };
        joints.into_iter().map(|j| azimuth * j).collect()
    };
    sequence_from_fn(spec.duration, spec.sensor_rate, kind.hands(), pose)
}

/// Right hand at `+gap/2`, mirrored left hand at `−gap/2`, each lifted by
/// its own `dz`; `roll` turns the palms towards each other.
fn two_hands(
    open: &[Vec3],
    base: Vec3,
    gap: f64,
    dz_right: f64,
    dz_left: f64,
    roll: f64,
) -> Vec<Vec3> {
    let roll_r = Rotation3::from_axis_angle(&Vec3::y_axis(), roll);
    let roll_l = Rotation3::from_axis_angle(&Vec3::y_axis(), -roll);
    let right: Vec<Vec3> = open
        .iter()
        .map(|j| roll_r * j + base + Vec3::new(gap / 2.0, 0.0, dz_right))
        .collect();
    let left: Vec<Vec3> = mirrored(open)
        .iter()
        .map(|j| roll_l * j + base + Vec3::new(-gap / 2.0, 0.0, dz_left))
        .collect();
    [right, left].concat()
}
