//! Conversion of 22-joint depth-camera skeletons to the internal 20-joint
//! radar-frame layout.

use serde::{Deserialize, Serialize};

use crate::hand_model::{CoordFrame, JointFrameSequence, JointLayout, SkeletonFrame};
use crate::{Error, Result, Vec3};

/// Index of the palm-center joint in a `Dhg22` hand.
pub const DHG_PALM: usize = 1;
/// The two thumb articulations merged into one joint.
pub const DHG_THUMB_PAIR: (usize, usize) = (3, 4);

/// One output axis as a signed copy of an input axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisSource {
    pub axis: usize,
    pub sign: f64,
}

/// Signed axis permutation applied after joint conversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisMap(pub [AxisSource; 3]);

impl AxisMap {
    pub fn identity() -> Self {
        Self([0, 1, 2].map(|axis| AxisSource { axis, sign: 1.0 }))
    }

    /// Camera frame (y up, z away from the camera) to radar frame (z up):
    /// `x' = x`, `y' = −z`, `z' = y`.
    pub fn camera_to_radar() -> Self {
        Self([
            AxisSource { axis: 0, sign: 1.0 },
            AxisSource {
                axis: 2,
                sign: -1.0,
            },
            AxisSource { axis: 1, sign: 1.0 },
        ])
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = [false; 3];
        for src in &self.0 {
            if src.axis > 2 || seen[src.axis] || !(src.sign == 1.0 || src.sign == -1.0) {
                return Err(Error::InvalidArgument(format!(
                    "axis map {:?} is not a signed permutation",
                    self.0
                )));
            }
            seen[src.axis] = true;
        }
        Ok(())
    }

    pub fn apply(&self, p: Vec3) -> Vec3 {
        Vec3::from(self.0.map(|s| s.sign * p[s.axis]))
    }
}

/// Where the aligned skeleton is moved after the axis map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Translation {
    /// Add a fixed offset, meters.
    Fixed([f64; 3]),
    /// Move the sequence-mean palm center to this point, meters.
    PalmCentroid([f64; 3]),
}

/// How a `Dhg22` sequence becomes an `Internal20` radar-frame sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlignmentSpec {
    pub drop: Vec<usize>,
    pub merge: (usize, usize),
    pub axes: AxisMap,
    pub translation: Translation,
}

impl Default for AlignmentSpec {
    fn default() -> Self {
        Self {
            drop: vec![DHG_PALM],
            merge: DHG_THUMB_PAIR,
            axes: AxisMap::camera_to_radar(),
            translation: Translation::PalmCentroid([0.0, 0.0, crate::gestures::HOVER_HEIGHT]),
        }
    }
}

impl AlignmentSpec {
    /// Identity axes and a fixed offset; the joint conversion is unchanged.
    pub fn fixed(offset: [f64; 3]) -> Self {
        Self {
            axes: AxisMap::identity(),
            translation: Translation::Fixed(offset),
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        self.axes.validate()?;
        let (a, b) = self.merge;
        let n = JointLayout::Dhg22.joints_per_hand();
        let mut drop = self.drop.clone();
        drop.sort_unstable();
        drop.dedup();
        if a >= n || b != a + 1 || drop.iter().any(|&d| d >= n || d == a || d == b) {
            return Err(Error::InvalidArgument(format!(
                "alignment drops {:?} and merges ({a}, {b}): need an adjacent in-range pair outside the drop list",
                self.drop
            )));
        }
        if n - drop.len() - 1 != JointLayout::Internal20.joints_per_hand() {
            return Err(Error::InvalidArgument(format!(
                "dropping {} joint(s) and merging one pair leaves {} joints, not 20",
                drop.len(),
                n - drop.len() - 1
            )));
        }
        Ok(())
    }
}

fn convert_hand(hand: &[Vec3], drop: &[usize], merge: (usize, usize), axes: &AxisMap) -> Vec<Vec3> {
    let mut out = Vec::with_capacity(JointLayout::Internal20.joints_per_hand());
    for (i, &p) in hand.iter().enumerate() {
        if drop.contains(&i) || i == merge.1 {
            continue;
        }
        let p = if i == merge.0 {
            (p + hand[merge.1]) * 0.5
        } else {
            p
        };
        out.push(axes.apply(p));
    }
    out
}

/// Converts a `Dhg22` sequence to a radar-frame `Internal20` sequence.
pub fn align_skeleton(
    seq: &JointFrameSequence,
    spec: &AlignmentSpec,
) -> Result<JointFrameSequence> {
    if seq.layout() != JointLayout::Dhg22 {
        return Err(Error::InvalidSequence(format!(
            "alignment needs a DHG22 sequence, got {:?}",
            seq.layout()
        )));
    }
    spec.validate()?;
    let per_hand = JointLayout::Dhg22.joints_per_hand();
    let frames: Vec<SkeletonFrame> = seq
        .frames()
        .iter()
        .map(|fr| SkeletonFrame {
            t: fr.t,
            joints: fr
                .joints
                .chunks_exact(per_hand)
                .flat_map(|hand| convert_hand(hand, &spec.drop, spec.merge, &spec.axes))
                .collect(),
        })
        .collect();

    let offset = match spec.translation {
        Translation::Fixed(d) => Vec3::from(d),
        Translation::PalmCentroid(target) => {
            let mut sum = Vec3::zeros();
            let mut n = 0.0;
            for fr in seq.frames() {
                for hand in fr.joints.chunks_exact(per_hand) {
                    sum += spec.axes.apply(hand[DHG_PALM]);
                    n += 1.0;
                }
            }
            Vec3::from(target) - sum / n
        }
    };
    let aligned = JointFrameSequence::new(
        JointLayout::Internal20,
        CoordFrame::Radar,
        seq.hands(),
        frames,
    )?;
    Ok(aligned.translated(offset))
}
