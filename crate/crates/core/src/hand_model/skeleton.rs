use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vec3};

/// Joint ordering of a skeleton frame.
///
/// `Leap20` and `Internal20` share the same ordering (wrist, then the thumb
/// and the four fingers from base to tip); they differ only in which sensor
/// produced them. `Dhg22` is the 22-joint ordering of depth-camera datasets:
/// wrist, palm center, then four joints per finger (base, two articulations,
/// tip) starting with the thumb.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum JointLayout {
    Leap20,
    #[serde(rename = "DHG22")]
    Dhg22,
    Internal20,
}

impl JointLayout {
    pub fn joints_per_hand(self) -> usize {
        match self {
            JointLayout::Leap20 | JointLayout::Internal20 => 20,
            JointLayout::Dhg22 => 22,
        }
    }
}

/// Coordinate frame the joint positions are expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoordFrame {
    Sensor,
    Radar,
}

/// Indices into an `Internal20` hand.
pub mod joint {
    pub const WRIST: usize = 0;
    /// First joint of each finger chain (thumb, index, middle, ring, pinky).
    pub const FINGER_START: [usize; 5] = [1, 4, 8, 12, 16];
    /// Number of joints after the wrist for each finger chain.
    pub const FINGER_LEN: [usize; 5] = [3, 4, 4, 4, 4];
}

/// One time-stamped skeleton sample. Positions are in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonFrame {
    pub t: f64,
    pub joints: Vec<Vec3>,
}

/// Time-ordered skeleton frames sharing one layout and coordinate frame.
#[derive(Debug, Clone, PartialEq)]
pub struct JointFrameSequence {
    layout: JointLayout,
    coord_frame: CoordFrame,
    hands: usize,
    frames: Vec<SkeletonFrame>,
}

impl JointFrameSequence {
    pub fn new(
        layout: JointLayout,
        coord_frame: CoordFrame,
        hands: usize,
        frames: Vec<SkeletonFrame>,
    ) -> Result<Self> {
        if !(1..=2).contains(&hands) {
            return Err(Error::InvalidSequence(format!(
                "hands must be 1 or 2, got {hands}"
            )));
        }
        if frames.is_empty() {
            return Err(Error::Empty("skeleton frames"));
        }
        let expected = layout.joints_per_hand() * hands;
        for (i, frame) in frames.iter().enumerate() {
            if frame.joints.len() != expected {
                return Err(Error::InvalidSequence(format!(
                    "frame {i} has {} joints, layout {layout:?} with {hands} hand(s) needs {expected}",
                    frame.joints.len()
                )));
            }
            if !frame.t.is_finite()
                || frame
                    .joints
                    .iter()
                    .any(|j| !j.iter().all(|c| c.is_finite()))
            {
                return Err(Error::NonFinite(format!("skeleton frame {i}")));
            }
            if i > 0 && frame.t <= frames[i - 1].t {
                return Err(Error::InvalidSequence(format!(
                    "timestamps not strictly increasing at frame {i} ({} <= {})",
                    frame.t,
                    frames[i - 1].t
                )));
            }
        }
        Ok(Self {
            layout,
            coord_frame,
            hands,
            frames,
        })
    }

    pub fn layout(&self) -> JointLayout {
        self.layout
    }

    pub fn coord_frame(&self) -> CoordFrame {
        self.coord_frame
    }

    pub fn hands(&self) -> usize {
        self.hands
    }

    pub fn frames(&self) -> &[SkeletonFrame] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.frames[self.frames.len() - 1].t - self.frames[0].t
    }

    pub fn joints_per_frame(&self) -> usize {
        self.layout.joints_per_hand() * self.hands
    }

    /// Rebuilds the sequence with every joint passed through `f`.
    pub fn map_joints(
        &self,
        layout: JointLayout,
        coord_frame: CoordFrame,
        mut f: impl FnMut(Vec3) -> Vec3,
    ) -> Result<Self> {
        let frames = self
            .frames
            .iter()
            .map(|fr| SkeletonFrame {
                t: fr.t,
                joints: fr.joints.iter().map(|&j| f(j)).collect(),
            })
            .collect();
        Self::new(layout, coord_frame, self.hands, frames)
    }

    /// Same sequence shifted rigidly by `offset`.
    pub fn translated(&self, offset: Vec3) -> Self {
        let frames = self
            .frames
            .iter()
            .map(|fr| SkeletonFrame {
                t: fr.t,
                joints: fr.joints.iter().map(|j| j + offset).collect(),
            })
            .collect();
        Self {
            frames,
            ..self.clone()
        }
    }
}

/// Per-bone standard lengths (meters) in segment order, used by the optional
/// bone-length normalization pass.
pub const STANDARD_BONE_LENGTHS: [f64; 19] = [
    0.046, 0.032, 0.027, // thumb
    0.068, 0.040, 0.023, 0.018, // index
    0.065, 0.045, 0.027, 0.019, // middle
    0.060, 0.042, 0.026, 0.019, // ring
    0.055, 0.033, 0.018, 0.017, // pinky
];

/// Rebuilds an `Internal20` hand so that every bone keeps its direction but
/// takes the given length, walking each finger chain out from the wrist.
pub fn normalize_bone_lengths(hand: &[Vec3], lengths: &[f64; 19]) -> Result<Vec<Vec3>> {
    if hand.len() != 20 {
        return Err(Error::InvalidSequence(format!(
            "bone normalization needs 20 joints, got {}",
            hand.len()
        )));
    }
    let mut out = hand.to_vec();
    let mut seg = 0;
    for finger in 0..5 {
        let start = joint::FINGER_START[finger];
        let mut prev_src = hand[joint::WRIST];
        let mut prev_dst = out[joint::WRIST];
        for k in 0..joint::FINGER_LEN[finger] {
            let idx = start + k;
            let dir = hand[idx] - prev_src;
            let len = dir.norm();
            if len < 1e-12 {
                return Err(Error::InvalidSequence(format!(
                    "cannot normalize zero-length bone {seg}"
                )));
            }
            let placed = prev_dst + dir * (lengths[seg] / len);
            prev_src = hand[idx];
            prev_dst = placed;
            out[idx] = placed;
            seg += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(t: f64, n: usize) -> SkeletonFrame {
        SkeletonFrame {
            t,
            joints: vec![Vec3::new(0.0, 0.0, 0.2); n],
        }
    }

    #[test]
    fn rejects_non_increasing_timestamps() {
        let err = JointFrameSequence::new(
            JointLayout::Internal20,
            CoordFrame::Radar,
            1,
            vec![frame(0.0, 20), frame(0.0, 20)],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidSequence(_)));
    }

    #[test]
    fn rejects_wrong_joint_count() {
        assert!(JointFrameSequence::new(
            JointLayout::Dhg22,
            CoordFrame::Sensor,
            1,
            vec![frame(0.0, 20)]
        )
        .is_err());
        assert!(JointFrameSequence::new(
            JointLayout::Internal20,
            CoordFrame::Radar,
            2,
            vec![frame(0.0, 40)]
        )
        .is_ok());
    }

    #[test]
    fn rejects_nan() {
        let mut f = frame(0.0, 20);
        f.joints[3].y = f64::NAN;
        assert!(matches!(
            JointFrameSequence::new(JointLayout::Internal20, CoordFrame::Radar, 1, vec![f]),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn normalization_sets_lengths_and_keeps_directions() {
        let hand = crate::gestures::canonical_hand(1.3);
        let out = normalize_bone_lengths(&hand, &STANDARD_BONE_LENGTHS).unwrap();
        let bones = crate::hand_model::BONES;
        for (i, bone) in bones.iter().enumerate() {
            let src = hand[bone.to] - hand[bone.from];
            let dst = out[bone.to] - out[bone.from];
            assert!((dst.norm() - STANDARD_BONE_LENGTHS[i]).abs() < 1e-12);
            assert!((src.normalize() - dst.normalize()).norm() < 1e-12);
        }
    }
}
