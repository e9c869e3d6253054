//! Batch synthesis of a manifest into a directory of spectrogram files.
//!
//! ```text
//! out/
//!   <id>.spec        binary spectrogram, one per successful entry
//!   <id>.png         optional heatmap
//!   <id>.csv         optional
//!   index.json       entries in manifest order, ids grouped by label, failures
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::corpus::par_map;
use super::evaluate::Failure;
use super::manifest::DatasetManifest;
use super::synth::{synthesize_entry, SynthesisContext};
use crate::dsp::Colormap;
use crate::weightnet::WeightNetParams;
use crate::{Error, Result};

/// Default heatmap upscaling.
pub const PNG_SCALE: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExportOptions {
    pub png: Option<Colormap>,
    pub png_scale: u32,
    pub csv: bool,
}

impl Default for ExportOptions {
    fn default() -> Self {
        Self {
            png: None,
            png_scale: PNG_SCALE,
            csv: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub id: String,
    pub label: String,
    /// Paths relative to the output directory.
    pub spectrogram: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub png: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportIndex {
    pub entries: Vec<IndexEntry>,
    pub by_label: BTreeMap<String, Vec<String>>,
    pub failures: Vec<Failure>,
}

impl ExportIndex {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::format(path, e.to_string()))
    }
}

pub const INDEX_FILE: &str = "index.json";

/// Synthesizes every entry (in parallel) and writes its files, then the
/// index. Every entry ends up either in `entries` or in `failures`.
pub fn export_dataset(
    manifest: &DatasetManifest,
    ctx: &SynthesisContext,
    params: Option<&WeightNetParams>,
    out_dir: impl AsRef<Path>,
    opts: &ExportOptions,
) -> Result<ExportIndex> {
    let out = out_dir.as_ref();
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let probe = out.join(".write-test");
    fs::write(&probe, b"").map_err(|e| Error::io(out, e))?;
    let _ = fs::remove_file(&probe);

    let results = par_map(manifest.entries.len(), |i| -> Result<IndexEntry> {
        let entry = &manifest.entries[i];
        let synth = synthesize_entry(entry, manifest, ctx, params)?;
        let spec = PathBuf::from(format!("{}.spec", entry.id));
        let write = |e: Error| e.at_stage(&entry.id, "write");
        synth.spectrogram.save(out.join(&spec)).map_err(write)?;
        let png = match opts.png {
            Some(cmap) => {
                let p = PathBuf::from(format!("{}.png", entry.id));
                synth
                    .spectrogram
                    .save_png(out.join(&p), cmap, opts.png_scale)
                    .map_err(write)?;
                Some(p)
            }
            None => None,
        };
        let csv = if opts.csv {
            let p = PathBuf::from(format!("{}.csv", entry.id));
            synth.spectrogram.save_csv(out.join(&p)).map_err(write)?;
            Some(p)
        } else {
            None
        };
        Ok(IndexEntry {
            id: entry.id.clone(),
            label: entry.label.clone(),
            spectrogram: spec,
            png,
            csv,
        })
    });

    let mut index = ExportIndex {
        entries: Vec::new(),
        by_label: BTreeMap::new(),
        failures: Vec::new(),
    };
    for (entry, r) in manifest.entries.iter().zip(results) {
        match r {
            Ok(row) => {
                index
                    .by_label
                    .entry(row.label.clone())
                    .or_default()
                    .push(row.id.clone());
                index.entries.push(row);
            }
            Err(e) => {
                log::warn!("{}: {e}", entry.id);
                index.failures.push(Failure {
                    id: entry.id.clone(),
                    error: e.to_string(),
                });
            }
        }
    }
    let path = out.join(INDEX_FILE);
    let text = serde_json::to_string_pretty(&index).expect("index serializes");
    fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(index)
}
