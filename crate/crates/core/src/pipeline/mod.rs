//! End-to-end orchestration: skeleton alignment, dataset manifests,
//! per-gesture synthesis, training corpora, batch export and evaluation.

mod align;
mod corpus;
mod evaluate;
mod export;
mod manifest;
mod synth;

pub use align::{
    align_skeleton, AlignmentSpec, AxisMap, AxisSource, Translation, DHG_PALM, DHG_THUMB_PAIR,
};
pub use corpus::{
    fixture_spectrogram, performance, split_indices, synthetic_corpus, write_fixture_set,
    CorpusSpec, EntryMeta,
};
pub use evaluate::{
    evaluate_manifest, score_pair, EvaluationReport, Failure, PairScore, ScoredEntry, SliceStats,
};
pub use export::{export_dataset, ExportIndex, ExportOptions, IndexEntry, INDEX_FILE, PNG_SCALE};
pub use manifest::{DatasetManifest, ManifestEntry, SkeletonFormat, ANGLE_TAGS, DHG_FRAME_RATE};
pub use synth::{
    load_entry_sequence, prepare_sequence, simulate_composites, synthesize_entry,
    synthesize_sequence, training_item, HiddenWeightRule, Reference, Synthesis, SynthesisContext,
};
