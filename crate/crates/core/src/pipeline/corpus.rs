//! Generated datasets: gesture fixture files on disk and in-memory training
//! corpora whose references come from hidden weights.

use std::fs;
use std::path::Path;
use std::thread;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::manifest::{DatasetManifest, ManifestEntry, ANGLE_TAGS};
use super::synth::{
    synthesize_sequence, training_item, HiddenWeightRule, Reference, SynthesisContext,
};
use crate::gestures::{generate, GestureKind, GestureSpec};
use crate::hand_model::write_skeleton;
use crate::weightnet::TrainingItem;
use crate::{Error, Result};

/// Slicing tags of one gesture performance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryMeta {
    pub id: String,
    pub label: String,
    pub subject: String,
    pub angle: i32,
    pub hands: usize,
    pub occlusion: bool,
}

impl From<&ManifestEntry> for EntryMeta {
    fn from(e: &ManifestEntry) -> Self {
        Self {
            id: e.id.clone(),
            label: e.label.clone(),
            subject: e.subject.clone(),
            angle: e.angle,
            hands: e.hands,
            occlusion: e.occlusion,
        }
    }
}

/// Performance `i` of a generated set: gestures cycle through all ten
/// kinds, angles through the three tags, subjects through `subjects`.
pub fn performance(i: usize, seed: u64, subjects: usize) -> (GestureSpec, EntryMeta) {
    let kind = GestureKind::ALL[i % GestureKind::ALL.len()];
    let angle = ANGLE_TAGS[(i / GestureKind::ALL.len()) % ANGLE_TAGS.len()];
    let subject = i % subjects.max(1);
    let item_seed = seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(i as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(item_seed);
    let spec = GestureSpec {
        kind,
        angle_deg: angle as f64,
        scale: rng.gen_range(0.9..1.1),
        speed: rng.gen_range(0.8..1.2),
        seed: item_seed,
        ..GestureSpec::default()
    };
    let meta = EntryMeta {
        id: format!("s{subject:02}-{}-{i:03}", kind.name()),
        label: kind.name().to_string(),
        subject: format!("s{subject:02}"),
        angle,
        hands: kind.hands(),
        occlusion: kind.self_occluding(),
    };
    (spec, meta)
}

/// Runs `f` over `0..n` on all cores; results keep index order.
pub(crate) fn par_map<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let workers = thread::available_parallelism()
        .map_or(1, |p| p.get())
        .min(n.max(1));
    let mut slots: Vec<Option<T>> = (0..n).map(|_| None).collect();
    thread::scope(|s| {
        for (w, chunk) in slots.chunks_mut(n.div_ceil(workers).max(1)).enumerate() {
            let f = &f;
            let start = w * n.div_ceil(workers).max(1);
            s.spawn(move || {
                for (j, slot) in chunk.iter_mut().enumerate() {
                    *slot = Some(f(start + j));
                }
            });
        }
    });
    slots
        .into_iter()
        .map(|s| s.expect("every slot filled"))
        .collect()
}

/// Options of [`synthetic_corpus`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub count: usize,
    pub seed: u64,
    pub subjects: usize,
    /// Gesture length in seconds; 1.6 s fills the default 2048-chirp window.
    pub duration: f64,
    pub rule: HiddenWeightRule,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            count: 50,
            seed: 0,
            subjects: 5,
            duration: 1.6,
            rule: HiddenWeightRule::default(),
        }
    }
}

/// Training items whose references are synthesized with the hidden rule.
pub fn synthetic_corpus(
    spec: &CorpusSpec,
    ctx: &SynthesisContext,
) -> Result<Vec<(EntryMeta, TrainingItem)>> {
    if spec.count == 0 {
        return Err(Error::Empty("corpus"));
    }
    par_map(spec.count, |i| {
        let (mut g, meta) = performance(i, spec.seed, spec.subjects);
        g.duration = spec.duration;
        let seq = generate(&g).map_err(|e| e.at_stage(&meta.id, "generate"))?;
        let item = training_item(&meta.id, &seq, ctx, Reference::Hidden(&spec.rule))?;
        Ok((meta, item))
    })
    .into_iter()
    .collect()
}

/// Shuffles indices with `seed` and splits them into train / validation /
/// test by the given fractions (test gets the remainder).
pub fn split_indices(
    n: usize,
    val_fraction: f64,
    test_fraction: f64,
    seed: u64,
) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_test = ((n as f64) * test_fraction).round() as usize;
    let n_val = ((n as f64) * val_fraction).round() as usize;
    let test = idx.split_off(n - n_test.min(n));
    let val = idx.split_off(idx.len() - n_val.min(idx.len()));
    (idx, val, test)
}

/// Writes one skeleton file per gesture kind plus `manifest.json` into
/// `dir`. With a rule, hidden-weight reference spectrograms are written too.
pub fn write_fixture_set(
    dir: impl AsRef<Path>,
    seed: u64,
    ctx: &SynthesisContext,
    references: Option<&HiddenWeightRule>,
) -> Result<DatasetManifest> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir.join("skeletons")).map_err(|e| Error::io(dir, e))?;
    if references.is_some() {
        fs::create_dir_all(dir.join("references")).map_err(|e| Error::io(dir, e))?;
    }
    let entries = par_map(GestureKind::ALL.len(), |i| -> Result<ManifestEntry> {
        let (spec, meta) = performance(i, seed, 5);
        let seq = generate(&spec).map_err(|e| e.at_stage(&meta.id, "generate"))?;
        let skeleton = Path::new("skeletons").join(format!("{}.jsonl", meta.id));
        write_skeleton(&seq, dir.join(&skeleton))?;
        let reference = match references {
            Some(rule) => {
                let item = training_item(&meta.id, &seq, ctx, Reference::Hidden(rule))?;
                let path = Path::new("references").join(format!("{}.spec", meta.id));
                item.reference.save(dir.join(&path))?;
                Some(path)
            }
            None => None,
        };
        Ok(ManifestEntry {
            id: meta.id,
            label: meta.label,
            skeleton,
            format: None,
            reference,
            subject: meta.subject,
            angle: meta.angle,
            hands: meta.hands,
            occlusion: meta.occlusion,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let manifest = DatasetManifest::new(entries);
    manifest.save(dir.join("manifest.json"))?;
    DatasetManifest::load(dir.join("manifest.json"))
}

/// Unit-weight spectrogram of generated performance `i`; handy in demos.
pub fn fixture_spectrogram(
    i: usize,
    seed: u64,
    ctx: &SynthesisContext,
) -> Result<crate::dsp::Spectrogram> {
    let (spec, meta) = performance(i, seed, 5);
    let seq = generate(&spec)?;
    Ok(synthesize_sequence(&meta.id, &seq, ctx, None)?.spectrogram)
}
