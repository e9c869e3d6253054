use serde::{Deserialize, Serialize};

use super::skeleton::{CoordFrame, JointFrameSequence, JointLayout};
use crate::{Error, Result, Vec3};

/// Horizontal offset of the skeleton sensor relative to the radar antenna,
/// meters. Both devices sit in the same horizontal plane facing up, so the
/// vertical axis needs no correction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SensorOffset {
    pub dx: f64,
    pub dy: f64,
}

impl SensorOffset {
    pub fn new(dx: f64, dy: f64) -> Result<Self> {
        if !(dx.is_finite() && dy.is_finite()) {
            return Err(Error::NonFinite("sensor offset".into()));
        }
        Ok(Self { dx, dy })
    }

    fn as_vec(self) -> Vec3 {
        Vec3::new(self.dx, self.dy, 0.0)
    }
}

/// Moves a sensor-frame sequence into the radar-centered frame:
/// `X' = X − dx`, `Y' = Y − dy`, `Z' = Z`.
///
/// `Leap20` input comes out tagged `Internal20`; other layouts are kept.
pub fn leap_to_radar(seq: &JointFrameSequence, offset: SensorOffset) -> Result<JointFrameSequence> {
    if seq.coord_frame() != CoordFrame::Sensor {
        return Err(Error::InvalidSequence(
            "leap_to_radar expects a sensor-frame sequence".into(),
        ));
    }
    let offset = SensorOffset::new(offset.dx, offset.dy)?.as_vec();
    let layout = match seq.layout() {
        JointLayout::Leap20 => JointLayout::Internal20,
        other => other,
    };
    seq.map_joints(layout, CoordFrame::Radar, |j| j - offset)
}

/// Inverse of [`leap_to_radar`].
pub fn radar_to_leap(seq: &JointFrameSequence, offset: SensorOffset) -> Result<JointFrameSequence> {
    if seq.coord_frame() != CoordFrame::Radar {
        return Err(Error::InvalidSequence(
            "radar_to_leap expects a radar-frame sequence".into(),
        ));
    }
    let offset = SensorOffset::new(offset.dx, offset.dy)?.as_vec();
    let layout = match seq.layout() {
        JointLayout::Internal20 => JointLayout::Leap20,
        other => other,
    };
    seq.map_joints(layout, CoordFrame::Sensor, |j| j + offset)
}
