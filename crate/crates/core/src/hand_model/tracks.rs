//! Per-chirp scatterer kinematics.
//!
//! Skeleton frames arrive at the camera rate; the radar needs the scene at
//! every chirp. Joints are interpolated linearly onto the chirp instants,
//! velocities and accelerations come from central differences on that grid
//! (one-sided at the ends), and occlusion is evaluated once per radar frame
//! at the frame's middle chirp.

use serde::{Deserialize, Serialize};

use super::mesh::{build_segments_in_frame, HandMesh, RadiiTable, Tessellation, SEGMENTS_PER_HAND};
use super::skeleton::{
    normalize_bone_lengths, CoordFrame, JointFrameSequence, JointLayout, STANDARD_BONE_LENGTHS,
};
use crate::geometry::line_angle;
use crate::radar_sim::occlusion::visibility_count;
use crate::radar_sim::{cylinder_rcs, RadarParams};
use crate::{Error, Result, Vec3};

/// Geometry options of the cylinder hand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HandModelConfig {
    pub radii: RadiiTable,
    pub tessellation: Tessellation,
    /// Radar phase center in the radar frame, meters.
    pub radar_origin: [f64; 3],
    /// Rebuild every hand with [`STANDARD_BONE_LENGTHS`] before meshing.
    pub normalize_bones: bool,
}

impl Default for HandModelConfig {
    fn default() -> Self {
        Self {
            radii: RadiiTable::default(),
            tessellation: Tessellation::default(),
            radar_origin: [0.0; 3],
            normalize_bones: false,
        }
    }
}

impl HandModelConfig {
    pub fn origin(&self) -> Vec3 {
        Vec3::from(self.radar_origin)
    }
}

/// Chirp start instants of the radar frames covered by a gesture.
#[derive(Debug, Clone, PartialEq)]
pub struct ChirpTimeline {
    pub frames: usize,
    pub chirps_per_frame: usize,
    pub times: Vec<f64>,
}

impl ChirpTimeline {
    /// Frame `f`, chirp `c` starts at `start + f/frame_rate + c·T_c`.
    pub fn new(start: f64, radar: &RadarParams, frames: usize) -> Self {
        let cpf = radar.chirps_per_frame;
        let mut times = Vec::with_capacity(frames * cpf);
        for f in 0..frames {
            let frame_start = start + f as f64 * radar.frame_period();
            for c in 0..cpf {
                times.push(frame_start + c as f64 * radar.chirp_interval);
            }
        }
        Self {
            frames,
            chirps_per_frame: cpf,
            times,
        }
    }

    /// Number of whole radar frames that fit between `start` and `end`.
    pub fn frames_between(start: f64, end: f64, radar: &RadarParams) -> usize {
        let active = (radar.chirps_per_frame - 1) as f64 * radar.chirp_interval;
        let span = end - start - active;
        if span < -1e-12 {
            0
        } else {
            ((span + 1e-9) / radar.frame_period()).floor() as usize + 1
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn frame_of(&self, chirp: usize) -> usize {
        chirp / self.chirps_per_frame
    }
}

/// Kinematic and radiometric history of one bone-center scatterer, one entry
/// per chirp.
#[derive(Debug, Clone, PartialEq)]
pub struct ScattererTrack {
    pub hand: usize,
    pub segment_id: usize,
    pub radius: f64,
    /// Tessellated vertex count of the segment.
    pub vertex_count: usize,
    pub center: Vec<Vec3>,
    /// Distance D to the radar origin, meters.
    pub distance: Vec<f64>,
    /// dD/dt, m/s; negative when approaching.
    pub radial_velocity: Vec<f64>,
    /// Magnitude of the center's acceleration, m/s².
    pub acceleration: Vec<f64>,
    /// Angle between bone axis and line of sight, radians in `[0, π/2]`.
    pub aspect_angle: Vec<f64>,
    /// Cylinder RCS, m².
    pub rcs: Vec<f64>,
    pub rcs_clamped: Vec<bool>,
    pub visible_vertices: Vec<usize>,
}

impl ScattererTrack {
    /// Derives distances, velocities, aspect angles and RCS from per-chirp
    /// centers and bone axes. Visibility starts out as fully visible.
    #[allow(clippy::too_many_arguments)]
    pub fn from_kinematics(
        hand: usize,
        segment_id: usize,
        radius: f64,
        vertex_count: usize,
        times: &[f64],
        center: Vec<Vec3>,
        axes: &[Vec3],
        origin: Vec3,
        wavelength: f64,
    ) -> Result<Self> {
        let n = times.len();
        if center.len() != n || axes.len() != n || n == 0 {
            return Err(Error::DimensionMismatch(format!(
                "{} times, {} centers, {} axes",
                n,
                center.len(),
                axes.len()
            )));
        }
        let los: Vec<Vec3> = center.iter().map(|c| c - origin).collect();
        let distance: Vec<f64> = los.iter().map(|l| l.norm()).collect();
        if let Some(d) = distance.iter().find(|d| !(**d > 0.0)) {
            return Err(Error::NonPositiveDistance(*d));
        }
        let velocity = central_difference(times, &center);
        let accel = central_difference(times, &velocity);
        let radial_velocity = velocity
            .iter()
            .zip(&los)
            .zip(&distance)
            .map(|((v, l), d)| v.dot(l) / d)
            .collect();
        let aspect_angle: Vec<f64> = axes
            .iter()
            .zip(&los)
            .map(|(a, l)| line_angle(*a, *l))
            .collect();
        let mut rcs = Vec::with_capacity(n);
        let mut rcs_clamped = Vec::with_capacity(n);
        for &theta in &aspect_angle {
            let r = cylinder_rcs(radius, theta, wavelength)?;
            rcs.push(r.sigma);
            rcs_clamped.push(r.clamped);
        }
        Ok(Self {
            hand,
            segment_id,
            radius,
            vertex_count,
            center,
            distance,
            radial_velocity,
            acceleration: accel.iter().map(|a| a.norm()).collect(),
            aspect_angle,
            rcs,
            rcs_clamped,
            visible_vertices: vec![vertex_count; n],
        })
    }

    pub fn len(&self) -> usize {
        self.distance.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distance.is_empty()
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        let lens = [
            self.center.len(),
            self.distance.len(),
            self.radial_velocity.len(),
            self.acceleration.len(),
            self.aspect_angle.len(),
            self.rcs.len(),
            self.visible_vertices.len(),
        ];
        if lens.iter().any(|&l| l != n) {
            return Err(Error::DimensionMismatch(format!(
                "track fields {lens:?} do not all match {n} chirps"
            )));
        }
        Ok(())
    }
}

/// Central differences on a possibly non-uniform grid, one-sided at the ends.
fn central_difference(times: &[f64], values: &[Vec3]) -> Vec<Vec3> {
    let n = values.len();
    if n < 2 {
        return vec![Vec3::zeros(); n];
    }
    (0..n)
        .map(|i| {
            let (lo, hi) = match i {
                0 => (0, 1),
                _ if i == n - 1 => (n - 2, n - 1),
                _ => (i - 1, i + 1),
            };
            (values[hi] - values[lo]) / (times[hi] - times[lo])
        })
        .collect()
}

/// All scatterer tracks of a gesture on a shared chirp timeline.
#[derive(Debug, Clone)]
pub struct TrackSet {
    pub timeline: ChirpTimeline,
    pub tracks: Vec<ScattererTrack>,
}

/// Piecewise-linear joint interpolation onto arbitrary sorted instants.
fn interpolate_joints(seq: &JointFrameSequence, times: &[f64]) -> Vec<Vec<Vec3>> {
    let frames = seq.frames();
    let mut k = 0;
    times
        .iter()
        .map(|&t| {
            while k + 2 < frames.len() && frames[k + 1].t <= t {
                k += 1;
            }
            if frames.len() == 1 {
                return frames[0].joints.clone();
            }
            let (f0, f1) = (&frames[k], &frames[k + 1]);
            let w = ((t - f0.t) / (f1.t - f0.t)).clamp(0.0, 1.0);
            f0.joints
                .iter()
                .zip(&f1.joints)
                .map(|(a, b)| a * (1.0 - w) + b * w)
                .collect()
        })
        .collect()
}

/// Resamples a radar-frame `Internal20` sequence onto the chirp timeline and
/// derives one [`ScattererTrack`] per bone (19 per hand).
pub fn resample_tracks(
    seq: &JointFrameSequence,
    radar: &RadarParams,
    model: &HandModelConfig,
) -> Result<TrackSet> {
    if seq.layout() != JointLayout::Internal20 || seq.coord_frame() != CoordFrame::Radar {
        return Err(Error::InvalidSequence(format!(
            "tracks need an Internal20 radar-frame sequence, got {:?} in {:?} frame",
            seq.layout(),
            seq.coord_frame()
        )));
    }
    model.tessellation.validate()?;
    let seq = if model.normalize_bones {
        normalized(seq)?
    } else {
        seq.clone()
    };

    let start = seq.frames()[0].t;
    let end = seq.frames()[seq.len() - 1].t;
    let frames = ChirpTimeline::frames_between(start, end, radar);
    if frames == 0 {
        return Err(Error::SequenceTooShort {
            duration: end - start,
            needed: (radar.chirps_per_frame - 1) as f64 * radar.chirp_interval,
        });
    }
    let timeline = ChirpTimeline::new(start, radar, frames);
    let joints = interpolate_joints(&seq, &timeline.times);
    let hands = seq.hands();
    let origin = model.origin();
    let vertex_count = model.tessellation.vertex_count();

    let mut tracks = Vec::with_capacity(hands * SEGMENTS_PER_HAND);
    let per_chirp_segments = joints
        .iter()
        .enumerate()
        .map(|(i, j)| build_segments_in_frame(j, &model.radii, i))
        .collect::<Result<Vec<_>>>()?;
    for s in 0..hands * SEGMENTS_PER_HAND {
        let centers = per_chirp_segments
            .iter()
            .map(|segs| segs[s].center())
            .collect();
        let axes: Vec<Vec3> = per_chirp_segments
            .iter()
            .map(|segs| segs[s].axis())
            .collect();
        let first = &per_chirp_segments[0][s];
        tracks.push(ScattererTrack::from_kinematics(
            first.hand,
            first.segment_id,
            first.radius,
            vertex_count,
            &timeline.times,
            centers,
            &axes,
            origin,
            radar.wavelength(),
        )?);
    }

    let cpf = timeline.chirps_per_frame;
    for f in 0..frames {
        let probe = f * cpf + cpf / 2;
        let mesh = HandMesh::from_segments(per_chirp_segments[probe].clone(), model.tessellation)?;
        let counts = visibility_count(&mesh, origin);
        for (track, &count) in tracks.iter_mut().zip(&counts) {
            track.visible_vertices[f * cpf..(f + 1) * cpf].fill(count);
        }
    }
    Ok(TrackSet { timeline, tracks })
}

fn normalized(seq: &JointFrameSequence) -> Result<JointFrameSequence> {
    let frames = seq
        .frames()
        .iter()
        .map(|fr| {
            let joints = fr
                .joints
                .chunks(20)
                .map(|hand| normalize_bone_lengths(hand, &STANDARD_BONE_LENGTHS))
                .collect::<Result<Vec<_>>>()?
                .concat();
            Ok(super::skeleton::SkeletonFrame { t: fr.t, joints })
        })
        .collect::<Result<Vec<_>>>()?;
    JointFrameSequence::new(seq.layout(), seq.coord_frame(), seq.hands(), frames)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gestures::canonical_hand;
    use crate::hand_model::SkeletonFrame;

    fn radar() -> RadarParams {
        RadarParams::default()
    }

    fn seq_from(frames: Vec<SkeletonFrame>) -> JointFrameSequence {
        JointFrameSequence::new(JointLayout::Internal20, CoordFrame::Radar, 1, frames).unwrap()
    }

    fn held(pose: &[Vec3], duration: f64, rate: f64) -> JointFrameSequence {
        let n = (duration * rate).round() as usize + 1;
        seq_from(
            (0..n)
                .map(|i| SkeletonFrame {
                    t: i as f64 / rate,
                    joints: pose.to_vec(),
                })
                .collect(),
        )
    }

    fn fast_model() -> HandModelConfig {
        HandModelConfig {
            tessellation: Tessellation {
                rings: 3,
                verts_per_ring: 6,
            },
            ..HandModelConfig::default()
        }
    }

    #[test]
    fn static_pose_has_zero_velocity() {
        let set = resample_tracks(
            &held(&canonical_hand(1.0), 2.0, 30.0),
            &radar(),
            &fast_model(),
        )
        .unwrap();
        assert_eq!(set.tracks.len(), 19);
        assert_eq!(set.timeline.frames, 20);
        for t in &set.tracks {
            assert!(t.radial_velocity.iter().all(|v| v.abs() < 1e-9));
            assert!(t.acceleration.iter().all(|a| a.abs() < 1e-9));
            assert!(t.distance.iter().all(|d| *d > 0.0));
            assert!(t
                .aspect_angle
                .iter()
                .all(|a| (0.0..=std::f64::consts::FRAC_PI_2).contains(a)));
        }
    }

    #[test]
    fn too_short_sequence_is_rejected() {
        let seq = held(&canonical_hand(1.0), 0.03, 100.0);
        assert!(matches!(
            resample_tracks(&seq, &radar(), &fast_model()),
            Err(Error::SequenceTooShort { .. })
        ));
    }

    #[test]
    fn approaching_on_axis_has_minus_one_radial_velocity() {
        // whole hand moving at (0, 0, -1) m/s, wrist starting 0.6 m above the radar
        let pose = canonical_hand(1.0);
        let rate = 50.0;
        let frames = (0..=10)
            .map(|i| {
                let t = i as f64 / rate;
                SkeletonFrame {
                    t,
                    joints: pose
                        .iter()
                        .map(|j| j + Vec3::new(0.0, 0.0, 0.4 - t))
                        .collect(),
                }
            })
            .collect();
        let mut cfg = crate::radar_sim::RadarConfig::default();
        cfg.frame_rate_fps = 15.0;
        let radar = RadarParams::from_config(&cfg).unwrap();
        let set = resample_tracks(&seq_from(frames), &radar, &fast_model()).unwrap();
        // the middle-finger bones lie closest to the radar axis; check exact
        // relation v_r = v · los / |los| and its on-axis limit
        for t in &set.tracks {
            for (i, v) in t.radial_velocity.iter().enumerate() {
                let los = t.center[i];
                let expected = -los.z / los.norm();
                assert!((v - expected).abs() < 1e-9, "{v} vs {expected}");
            }
        }
    }

    #[test]
    fn on_axis_point_moving_down_has_exact_radial_velocity() {
        let timeline = ChirpTimeline::new(0.0, &radar(), 2);
        let centers: Vec<Vec3> = timeline
            .times
            .iter()
            .map(|t| Vec3::new(0.0, 0.0, 0.5 - t))
            .collect();
        let axes = vec![Vec3::x(); timeline.len()];
        let track = ScattererTrack::from_kinematics(
            0,
            0,
            0.005,
            402,
            &timeline.times,
            centers,
            &axes,
            Vec3::zeros(),
            radar().wavelength(),
        )
        .unwrap();
        assert!(track.radial_velocity.iter().all(|v| (v + 1.0).abs() < 1e-9));
    }

    #[test]
    fn resampling_on_the_chirp_grid_is_identity() {
        let radar = radar();
        let timeline = ChirpTimeline::new(0.25, &radar, 2);
        let base = canonical_hand(1.0);
        let frames: Vec<SkeletonFrame> = timeline
            .times
            .iter()
            .enumerate()
            .map(|(i, &t)| SkeletonFrame {
                t,
                joints: base
                    .iter()
                    .map(|j| {
                        j + Vec3::new(
                            0.01 * (i as f64 * 0.37).sin(),
                            0.0,
                            0.002 * i as f64 / 256.0,
                        )
                    })
                    .collect(),
            })
            .collect();
        let seq = seq_from(frames.clone());
        let set = resample_tracks(&seq, &radar, &fast_model()).unwrap();
        assert_eq!(set.timeline.times, timeline.times);
        for (i, fr) in frames.iter().enumerate() {
            let segs =
                crate::hand_model::build_segments(&fr.joints, &RadiiTable::default()).unwrap();
            for (track, seg) in set.tracks.iter().zip(&segs) {
                assert_eq!(track.center[i], seg.center());
            }
        }
    }

    #[test]
    fn piecewise_linear_motion_is_reproduced() {
        // wrist path: two straight legs with a corner at t = 0.5 s
        let knots = [
            (0.0, Vec3::new(0.0, 0.0, 0.3)),
            (0.5, Vec3::new(0.05, 0.0, 0.32)),
            (1.2, Vec3::new(0.0, 0.04, 0.28)),
        ];
        let path = |t: f64| {
            let (i, _) = knots
                .windows(2)
                .enumerate()
                .find(|(_, w)| t <= w[1].0)
                .unwrap();
            let (t0, p0) = knots[i];
            let (t1, p1) = knots[i + 1];
            p0 + (p1 - p0) * ((t - t0) / (t1 - t0))
        };
        let base = canonical_hand(1.0);
        let wrist = base[0];
        let frames = knots
            .iter()
            .map(|(t, p)| SkeletonFrame {
                t: *t,
                joints: base.iter().map(|j| j - wrist + p).collect(),
            })
            .collect();
        let set = resample_tracks(&seq_from(frames), &radar(), &fast_model()).unwrap();
        let offset = |s: usize| {
            let b = crate::hand_model::BONES[s];
            (base[b.from] + base[b.to]) * 0.5 - wrist
        };
        for track in &set.tracks {
            for (i, &t) in set.timeline.times.iter().enumerate() {
                let expected = path(t) + offset(track.segment_id);
                assert!((track.center[i] - expected).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn static_translation_with_radar_keeps_distance_and_angle() {
        let seq = held(&canonical_hand(1.0), 0.3, 30.0);
        let shift = Vec3::new(0.07, -0.03, 0.11);
        let a = resample_tracks(&seq, &radar(), &fast_model()).unwrap();
        let model_b = HandModelConfig {
            radar_origin: shift.into(),
            ..fast_model()
        };
        let b = resample_tracks(&seq.translated(shift), &radar(), &model_b).unwrap();
        for (ta, tb) in a.tracks.iter().zip(&b.tracks) {
            for i in 0..ta.len() {
                assert!((ta.distance[i] - tb.distance[i]).abs() < 1e-12);
                assert!((ta.aspect_angle[i] - tb.aspect_angle[i]).abs() < 1e-9);
            }
            assert_eq!(ta.visible_vertices, tb.visible_vertices);
        }
    }

    #[test]
    fn wrong_layout_is_rejected() {
        let seq = JointFrameSequence::new(
            JointLayout::Leap20,
            CoordFrame::Sensor,
            1,
            vec![SkeletonFrame {
                t: 0.0,
                joints: canonical_hand(1.0),
            }],
        )
        .unwrap();
        assert!(matches!(
            resample_tracks(&seq, &radar(), &fast_model()),
            Err(Error::InvalidSequence(_))
        ));
    }
}
