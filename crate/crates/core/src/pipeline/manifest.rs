//! Dataset manifests: which skeleton files to synthesize and how to slice
//! the results.
//!
//! ```json
//! {
//!   "labels": ["grasp", "circle"],
//!   "sensor_offset": {"dx": 0.0, "dy": 0.05},
//!   "entries": [
//!     {"id": "s01-grasp-0", "label": "grasp", "skeleton": "skel/s01-grasp-0.jsonl",
//!      "reference": "real/s01-grasp-0.spec", "subject": "s01", "angle": 0,
//!      "hands": 1, "occlusion": true}
//!   ]
//! }
//! ```
//!
//! Relative paths resolve against the manifest's directory.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::align::AlignmentSpec;
use crate::gestures::GestureKind;
use crate::hand_model::SensorOffset;
use crate::{Error, Result};

/// Azimuth tags used when slicing results.
pub const ANGLE_TAGS: [i32; 3] = [0, 30, -30];

/// Default frame rate of DHG-style text skeletons.
pub const DHG_FRAME_RATE: f64 = 30.0;

/// How a skeleton file is encoded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkeletonFormat {
    /// JSON records, see [`crate::hand_model::parse_skeleton`].
    Json,
    /// Whitespace-separated 22-joint rows in meters.
    DhgText,
}

impl SkeletonFormat {
    /// `.txt` files are DHG text, everything else JSON.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("txt") => SkeletonFormat::DhgText,
            _ => SkeletonFormat::Json,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub label: String,
    pub skeleton: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<SkeletonFormat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<PathBuf>,
    #[serde(default)]
    pub subject: String,
    #[serde(default)]
    pub angle: i32,
    #[serde(default = "one")]
    pub hands: usize,
    #[serde(default)]
    pub occlusion: bool,
}

fn one() -> usize {
    1
}

impl ManifestEntry {
    pub fn skeleton_format(&self) -> SkeletonFormat {
        self.format
            .unwrap_or_else(|| SkeletonFormat::from_path(&self.skeleton))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    /// Allowed labels; empty means the ten built-in gesture names.
    #[serde(default)]
    pub labels: Vec<String>,
    #[serde(default)]
    pub sensor_offset: SensorOffset,
    #[serde(default = "dhg_rate")]
    pub dhg_frame_rate: f64,
    #[serde(default)]
    pub alignment: AlignmentSpec,
    pub entries: Vec<ManifestEntry>,
}

fn dhg_rate() -> f64 {
    DHG_FRAME_RATE
}

impl DatasetManifest {
    pub fn new(entries: Vec<ManifestEntry>) -> Self {
        Self {
            labels: Vec::new(),
            sensor_offset: SensorOffset::default(),
            dhg_frame_rate: DHG_FRAME_RATE,
            alignment: AlignmentSpec::default(),
            entries,
        }
    }

    pub fn label_set(&self) -> BTreeSet<String> {
        if self.labels.is_empty() {
            GestureKind::ALL
                .iter()
                .map(|k| k.name().to_string())
                .collect()
        } else {
            self.labels.iter().cloned().collect()
        }
    }

    /// Parses manifest JSON; relative paths resolve against `base`.
    /// Checks ids, labels, tags and that every referenced file exists.
    pub fn from_json(text: &str, base: &Path, origin: &Path) -> Result<Self> {
        let mut m: DatasetManifest =
            serde_json::from_str(text).map_err(|e| Error::format(origin, e.to_string()))?;
        for e in &mut m.entries {
            e.skeleton = base.join(&e.skeleton);
            if let Some(r) = &mut e.reference {
                *r = base.join(&*r);
            }
        }
        m.validate(origin)?;
        Ok(m)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_json(&text, base, path)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn validate(&self, origin: &Path) -> Result<()> {
        let labels = self.label_set();
        let mut ids = BTreeSet::new();
        if !(self.dhg_frame_rate > 0.0 && self.dhg_frame_rate.is_finite()) {
            return Err(Error::format(
                origin,
                format!("dhg_frame_rate {}", self.dhg_frame_rate),
            ));
        }
        for e in &self.entries {
            let bad = |msg: String| Error::format(origin, format!("entry `{}`: {msg}", e.id));
            if e.id.is_empty() {
                return Err(Error::format(origin, "entry with empty id"));
            }
            if !ids.insert(e.id.as_str()) {
                return Err(bad("duplicate id".into()));
            }
            if !labels.contains(&e.label) {
                return Err(bad(format!("label `{}` not in the label set", e.label)));
            }
            if !ANGLE_TAGS.contains(&e.angle) {
                return Err(bad(format!("angle {} not one of {ANGLE_TAGS:?}", e.angle)));
            }
            if !(1..=2).contains(&e.hands) {
                return Err(bad(format!("hands must be 1 or 2, got {}", e.hands)));
            }
            for path in std::iter::once(&e.skeleton).chain(&e.reference) {
                if !path.is_file() {
                    return Err(bad(format!("missing file {}", path.display())));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(id: &str, label: &str, skeleton: &str) -> String {
        format!(
            r#"{{"id":"{id}","label":"{label}","skeleton":"{skeleton}","subject":"s1","angle":30,"hands":1}}"#
        )
    }

    #[test]
    fn paths_resolve_against_manifest_dir() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("a.jsonl"), "x").unwrap();
        let text = format!(r#"{{"entries":[{}]}}"#, entry("a", "grasp", "a.jsonl"));
        let path = dir.path().join("m.json");
        fs::write(&path, text).unwrap();
        let m = DatasetManifest::load(&path).unwrap();
        assert_eq!(m.entries[0].skeleton, dir.path().join("a.jsonl"));
        assert_eq!(m.entries[0].angle, 30);
        assert!(!m.entries[0].occlusion);
        assert_eq!(m.entries[0].skeleton_format(), SkeletonFormat::Json);
    }

    #[test]
    fn invalid_entries_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("a.txt"), "x").unwrap();
        let base = dir.path();
        let load = |entries: &str| {
            DatasetManifest::from_json(&format!(r#"{{"entries":[{entries}]}}"#), base, base)
        };
        assert!(load(&entry("a", "grasp", "a.txt")).is_ok());
        assert!(load(&entry("a", "jump", "a.txt")).is_err());
        assert!(load(&entry("a", "grasp", "missing.txt")).is_err());
        assert!(load(&format!(
            "{},{}",
            entry("a", "grasp", "a.txt"),
            entry("a", "slide", "a.txt")
        ))
        .is_err());
        let bad_angle = entry("a", "grasp", "a.txt").replace("30", "45");
        assert!(load(&bad_angle).is_err());
    }

    #[test]
    fn custom_label_sets_replace_the_builtin_one() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("a.txt"), "x").unwrap();
        let text = format!(
            r#"{{"labels":["pinch"],"entries":[{}]}}"#,
            entry("a", "pinch", "a.txt")
        );
        let m = DatasetManifest::from_json(&text, dir.path(), dir.path()).unwrap();
        assert_eq!(m.entries[0].skeleton_format(), SkeletonFormat::DhgText);
        let text = format!(
            r#"{{"labels":["pinch"],"entries":[{}]}}"#,
            entry("a", "grasp", "a.txt")
        );
        assert!(DatasetManifest::from_json(&text, dir.path(), dir.path()).is_err());
    }
}
