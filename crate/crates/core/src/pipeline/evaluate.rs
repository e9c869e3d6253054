//! Synthetic-versus-reference scoring with per-attribute slices.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::corpus::{par_map, EntryMeta};
use super::manifest::DatasetManifest;
use super::synth::{synthesize_entry, SynthesisContext};
use crate::dsp::Spectrogram;
use crate::metrics::{mse, ssim, SsimConfig};
use crate::weightnet::WeightNetParams;
use crate::{Error, Result};

/// Similarity of one spectrogram pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairScore {
    pub ssim_x100: f64,
    pub mse: f64,
}

pub fn score_pair(a: &Spectrogram, b: &Spectrogram, cfg: &SsimConfig) -> Result<PairScore> {
    Ok(PairScore {
        ssim_x100: 100.0 * ssim(a, b, cfg)?,
        mse: mse(a, b)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredEntry {
    #[serde(flatten)]
    pub meta: EntryMeta,
    #[serde(flatten)]
    pub score: PairScore,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceStats {
    pub count: usize,
    pub mean_ssim_x100: f64,
    pub mean_mse: f64,
}

fn stats<'a>(scores: impl Iterator<Item = &'a PairScore>) -> SliceStats {
    let (mut n, mut s, mut m) = (0, 0.0, 0.0);
    for p in scores {
        n += 1;
        s += p.ssim_x100;
        m += p.mse;
    }
    let d = n.max(1) as f64;
    SliceStats {
        count: n,
        mean_ssim_x100: s / d,
        mean_mse: m / d,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub id: String,
    pub error: String,
}

/// Scores and their means, overall and per gesture, angle, subject, hand
/// count and occlusion flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub entries: Vec<ScoredEntry>,
    pub overall: SliceStats,
    /// `dimension → value → stats`.
    pub slices: BTreeMap<String, BTreeMap<String, SliceStats>>,
    pub failures: Vec<Failure>,
}

impl EvaluationReport {
    pub fn new(entries: Vec<ScoredEntry>, failures: Vec<Failure>) -> Self {
        let keys: [(&str, fn(&EntryMeta) -> String); 5] = [
            ("gesture", |m| m.label.clone()),
            ("angle", |m| m.angle.to_string()),
            ("subject", |m| m.subject.clone()),
            ("hands", |m| m.hands.to_string()),
            ("occlusion", |m| m.occlusion.to_string()),
        ];
        let mut slices = BTreeMap::new();
        for (dim, key) in keys {
            let mut groups: BTreeMap<String, Vec<&PairScore>> = BTreeMap::new();
            for e in &entries {
                groups.entry(key(&e.meta)).or_default().push(&e.score);
            }
            let per = groups
                .into_iter()
                .map(|(k, v)| (k, stats(v.into_iter())))
                .collect();
            slices.insert(dim.to_string(), per);
        }
        Self {
            overall: stats(entries.iter().map(|e| &e.score)),
            entries,
            slices,
            failures,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Synthesizes every manifest entry with a reference and scores it.
/// Entries without a reference or that fail are listed in `failures`.
pub fn evaluate_manifest(
    manifest: &DatasetManifest,
    ctx: &SynthesisContext,
    params: Option<&WeightNetParams>,
    cfg: &SsimConfig,
) -> Result<EvaluationReport> {
    if manifest.entries.is_empty() {
        return Err(Error::Empty("manifest"));
    }
    let results = par_map(manifest.entries.len(), |i| {
        let entry = &manifest.entries[i];
        let reference = entry.reference.as_ref().ok_or_else(|| {
            Error::InvalidArgument(format!("entry `{}` has no reference spectrogram", entry.id))
        })?;
        let reference =
            Spectrogram::load(reference).map_err(|e| e.at_stage(&entry.id, "reference"))?;
        let synth = synthesize_entry(entry, manifest, ctx, params)?;
        score_pair(&synth.spectrogram, &reference, cfg).map_err(|e| e.at_stage(&entry.id, "score"))
    });
    let mut scored = Vec::new();
    let mut failures = Vec::new();
    for (entry, r) in manifest.entries.iter().zip(results) {
        match r {
            Ok(score) => scored.push(ScoredEntry {
                meta: entry.into(),
                score,
            }),
            Err(e) => {
                log::warn!("{}: {e}", entry.id);
                failures.push(Failure {
                    id: entry.id.clone(),
                    error: e.to_string(),
                })
            }
        }
    }
    Ok(EvaluationReport::new(scored, failures))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta(label: &str, angle: i32, subject: &str) -> EntryMeta {
        EntryMeta {
            id: format!("{label}{angle}{subject}"),
            label: label.into(),
            subject: subject.into(),
            angle,
            hands: 1,
            occlusion: false,
        }
    }

    #[test]
    fn identical_pair_is_perfect() {
        let s =
            Spectrogram::normalized(4, 2, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 9.0], 0.1, 0.1)
                .unwrap();
        let p = score_pair(&s, &s, &SsimConfig::default()).unwrap();
        assert!((p.ssim_x100 - 100.0).abs() < 1e-9);
        assert_eq!(p.mse, 0.0);
    }

    #[test]
    fn slices_average_their_members() {
        let e = |m, s, q| ScoredEntry {
            meta: m,
            score: PairScore {
                ssim_x100: s,
                mse: q,
            },
        };
        let report = EvaluationReport::new(
            vec![
                e(meta("grasp", 0, "a"), 60.0, 0.1),
                e(meta("grasp", 30, "b"), 70.0, 0.3),
                e(meta("slide", 30, "a"), 80.0, 0.2),
            ],
            vec![],
        );
        assert_eq!(report.overall.count, 3);
        assert!((report.overall.mean_ssim_x100 - 70.0).abs() < 1e-12);
        let g = &report.slices["gesture"];
        assert!((g["grasp"].mean_ssim_x100 - 65.0).abs() < 1e-12);
        assert!((g["grasp"].mean_mse - 0.2).abs() < 1e-12);
        assert_eq!(report.slices["angle"]["30"].count, 2);
        assert_eq!(report.slices["subject"]["a"].count, 2);
        assert_eq!(report.slices["hands"]["1"].count, 3);
        let back: EvaluationReport = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(back, report);
    }
}
