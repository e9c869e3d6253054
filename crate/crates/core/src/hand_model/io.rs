//! Skeleton file reading and writing.
//!
//! Two layouts of the same records are accepted:
//!
//! ```text
//! line-delimited:   {"layout":"Internal20","hands":1,"frame":"radar"}
//!                   {"t":0.000,"joints":[[x,y,z], ...]}
//!                   {"t":0.016,"joints":[[x,y,z], ...]}
//!
//! array-style:      {"header":{...}, "frames":[{"t":..,"joints":[..]}, ...]}
//! ```
//!
//! Joint coordinates are millimeters on disk and meters in memory.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::skeleton::{CoordFrame, JointFrameSequence, JointLayout, SkeletonFrame};
use crate::{Error, Result, Vec3};

const MM_PER_M: f64 = 1000.0;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SkeletonHeader {
    pub layout: JointLayout,
    pub hands: usize,
    pub frame: CoordFrame,
}

#[derive(Debug, Serialize, Deserialize)]
struct FrameRecord {
    t: f64,
    joints: Vec<[f64; 3]>,
}

#[derive(Debug, Deserialize)]
struct ArrayFile {
    header: SkeletonHeader,
    frames: Vec<FrameRecord>,
}

fn to_sequence(header: SkeletonHeader, records: Vec<FrameRecord>) -> Result<JointFrameSequence> {
    let frames = records
        .into_iter()
        .map(|r| SkeletonFrame {
            t: r.t,
            joints: r
                .joints
                .iter()
                .map(|p| Vec3::new(p[0], p[1], p[2]) / MM_PER_M)
                .collect(),
        })
        .collect();
    JointFrameSequence::new(header.layout, header.frame, header.hands, frames)
}

/// Parses skeleton text in either accepted layout.
pub fn parse_skeleton(text: &str, origin: &Path) -> Result<JointFrameSequence> {
    if let Ok(file) = serde_json::from_str::<ArrayFile>(text) {
        return to_sequence(file.header, file.frames);
    }
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, first) = lines
        .next()
        .ok_or_else(|| Error::format(origin, "empty skeleton file"))?;
    let header: SkeletonHeader = serde_json::from_str(first)
        .map_err(|e| Error::format(origin, format!("header record: {e}")))?;
    let records = lines
        .map(|(no, line)| {
            serde_json::from_str::<FrameRecord>(line)
                .map_err(|e| Error::format(origin, format!("line {}: {e}", no + 1)))
        })
        .collect::<Result<Vec<_>>>()?;
    to_sequence(header, records)
}

pub fn read_skeleton(path: impl AsRef<Path>) -> Result<JointFrameSequence> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_skeleton(&text, path)
}

/// Serializes a sequence in the line-delimited layout.
pub fn skeleton_to_string(seq: &JointFrameSequence) -> String {
    let header = SkeletonHeader {
        layout: seq.layout(),
        hands: seq.hands(),
        frame: seq.coord_frame(),
    };
    let mut out = serde_json::to_string(&header).expect("header serializes");
    out.push('\n');
    for frame in seq.frames() {
        let rec = FrameRecord {
            t: frame.t,
            joints: frame
                .joints
                .iter()
                .map(|j| [j.x * MM_PER_M, j.y * MM_PER_M, j.z * MM_PER_M])
                .collect(),
        };
        out.push_str(&serde_json::to_string(&rec).expect("frame serializes"));
        out.push('\n');
    }
    out
}

pub fn write_skeleton(seq: &JointFrameSequence, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, skeleton_to_string(seq)).map_err(|e| Error::io(path, e))
}

/// Reads a DHG-style skeleton text file: one frame per line, 22 joints × 3
/// whitespace-separated coordinates in meters, frames sampled at `frame_rate`.
pub fn read_dhg_text(path: impl AsRef<Path>, frame_rate: f64) -> Result<JointFrameSequence> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dhg_text(&text, frame_rate, path)
}

pub fn parse_dhg_text(text: &str, frame_rate: f64, origin: &Path) -> Result<JointFrameSequence> {
    if !(frame_rate > 0.0 && frame_rate.is_finite()) {
        return Err(Error::InvalidArgument(format!("frame rate {frame_rate}")));
    }
    let mut frames = Vec::new();
    for (no, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let values = line
            .split_whitespace()
            .map(|v| v.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::format(origin, format!("line {}: {e}", no + 1)))?;
        if values.len() != 66 {
            return Err(Error::format(
                origin,
                format!(
                    "line {}: expected 66 values, found {}",
                    no + 1,
                    values.len()
                ),
            ));
        }
        let joints = values
            .chunks_exact(3)
            .map(|c| Vec3::new(c[0], c[1], c[2]))
            .collect();
        frames.push(SkeletonFrame {
            t: frames.len() as f64 / frame_rate,
            joints,
        });
    }
    JointFrameSequence::new(JointLayout::Dhg22, CoordFrame::Sensor, 1, frames)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_delimited_round_trip_converts_units() {
        let text = concat!(
            "{\"layout\":\"Internal20\",\"hands\":1,\"frame\":\"radar\"}\n",
            "{\"t\":0.0,\"joints\":[",
            "[1,2,3],[1,2,3],[1,2,3],[1,2,3],[1,2,3],[1,2,3],[1,2,3],[1,2,3],[1,2,3],[1,2,3],",
            "[1,2,3],[1,2,3],[1,2,3],[1,2,3],[1,2,3],[1,2,3],[1,2,3],[1,2,3],[1,2,3],[1,2,300]]}\n"
        );
        let seq = parse_skeleton(text, Path::new("mem")).unwrap();
        assert_eq!(seq.len(), 1);
        assert!((seq.frames()[0].joints[19].z - 0.3).abs() < 1e-15);
        let again = parse_skeleton(&skeleton_to_string(&seq), Path::new("mem")).unwrap();
        assert_eq!(again.frames()[0].joints.len(), 20);
        assert!((again.frames()[0].joints[19] - seq.frames()[0].joints[19]).norm() < 1e-15);
    }

    #[test]
    fn array_style_is_accepted() {
        let joints: Vec<[f64; 3]> = vec![[0.0, 0.0, 250.0]; 22];
        let doc = serde_json::json!({
            "header": {"layout": "DHG22", "hands": 1, "frame": "sensor"},
            "frames": [{"t": 0.0, "joints": joints}, {"t": 0.05, "joints": joints}]
        });
        let seq = parse_skeleton(&doc.to_string(), Path::new("mem")).unwrap();
        assert_eq!(seq.layout(), JointLayout::Dhg22);
        assert_eq!(seq.len(), 2);
    }

    #[test]
    fn bad_frame_line_reports_line_number() {
        let text = "{\"layout\":\"Internal20\",\"hands\":1,\"frame\":\"radar\"}\n{oops}\n";
        let err = parse_skeleton(text, Path::new("g.jsonl")).unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }

    #[test]
    fn dhg_text_needs_66_values() {
        let good = vec!["0.1"; 66].join(" ");
        let seq = parse_dhg_text(&format!("{good}\n{good}\n"), 30.0, Path::new("d")).unwrap();
        assert_eq!(seq.len(), 2);
        assert!((seq.frames()[1].t - 1.0 / 30.0).abs() < 1e-15);
        assert!(parse_dhg_text("0.1 0.2\n", 30.0, Path::new("d")).is_err());
    }
}
