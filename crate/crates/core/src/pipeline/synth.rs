//! Skeleton sequence to spectrogram, one gesture at a time.
//!
//! Per-scatterer IF cubes are synthesized one after another and folded into
//! the composite straight away, so memory stays at two cubes regardless of
//! the number of scatterers.

use serde::{Deserialize, Serialize};

use super::align::{align_skeleton, AlignmentSpec};
use super::manifest::{DatasetManifest, ManifestEntry, SkeletonFormat};
use crate::dsp::{process_cube, RangeBinMode, Spectrogram, StftConfig};
use crate::hand_model::{
    leap_to_radar, read_dhg_text, read_skeleton, resample_tracks, CoordFrame, HandModelConfig,
    JointFrameSequence, JointLayout, SensorOffset, TrackSet,
};
use crate::radar_sim::{
    accumulate_weighted, synthesize_if_with, FrameWeights, IfSignalCube, Provenance, RadarParams,
    SimOptions,
};
use crate::weightnet::{
    extract_features, Feature, FeatureTensor, ProjectedSignals, TrainingItem, WeightNetParams,
};
use crate::{Error, Result};

/// Everything besides the skeleton that determines a spectrogram.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SynthesisContext {
    pub radar: RadarParams,
    pub model: HandModelConfig,
    pub stft: StftConfig,
    pub sim: SimOptions,
    pub bin_mode: RangeBinMode,
}

impl SynthesisContext {
    pub fn new(radar: RadarParams) -> Self {
        Self {
            radar,
            ..Self::default()
        }
    }
}

/// Brings any supported sequence into the radar-frame `Internal20` layout.
pub fn prepare_sequence(
    seq: &JointFrameSequence,
    offset: SensorOffset,
    alignment: &AlignmentSpec,
) -> Result<JointFrameSequence> {
    match (seq.layout(), seq.coord_frame()) {
        (JointLayout::Dhg22, _) => align_skeleton(seq, alignment),
        (_, CoordFrame::Sensor) => leap_to_radar(seq, offset),
        (JointLayout::Internal20, CoordFrame::Radar) => Ok(seq.clone()),
        (layout, frame) => Err(Error::InvalidSequence(format!(
            "cannot use a {layout:?} sequence in the {frame:?} frame"
        ))),
    }
}

/// Reads and prepares the skeleton of a manifest entry.
pub fn load_entry_sequence(
    entry: &ManifestEntry,
    manifest: &DatasetManifest,
) -> Result<JointFrameSequence> {
    let seq = match entry.skeleton_format() {
        SkeletonFormat::Json => read_skeleton(&entry.skeleton),
        SkeletonFormat::DhgText => read_dhg_text(&entry.skeleton, manifest.dhg_frame_rate),
    }
    .map_err(|e| e.at_stage(&entry.id, "parse"))?;
    prepare_sequence(&seq, manifest.sensor_offset, &manifest.alignment)
        .map_err(|e| e.at_stage(&entry.id, "align"))
}

/// Synthesizes every scatterer once and accumulates one composite per
/// weight set.
pub fn simulate_composites(
    tracks: &TrackSet,
    ctx: &SynthesisContext,
    weights: &[&FrameWeights],
) -> Result<Vec<IfSignalCube>> {
    let chirps = tracks.timeline.len();
    let cpf = tracks.timeline.chirps_per_frame;
    for w in weights {
        if w.scatterers() != tracks.tracks.len() || w.frames() != tracks.timeline.frames {
            return Err(Error::DimensionMismatch(format!(
                "weights {}x{} for {} scatterers over {} frames",
                w.scatterers(),
                w.frames(),
                tracks.tracks.len(),
                tracks.timeline.frames
            )));
        }
        w.check_non_negative()?;
    }
    let samples = ctx.radar.samples_per_chirp;
    let mut acc: Vec<IfSignalCube> = weights
        .iter()
        .map(|_| IfSignalCube::zeros(chirps, samples, Provenance::Composite))
        .collect();
    for (k, track) in tracks.tracks.iter().enumerate() {
        let cube = synthesize_if_with(track, &ctx.radar, ctx.sim, k)?;
        for (a, w) in acc.iter_mut().zip(weights) {
            accumulate_weighted(a, &cube, w.row(k), cpf)?;
        }
    }
    Ok(acc)
}

/// Output of [`synthesize_sequence`].
#[derive(Debug, Clone)]
pub struct Synthesis {
    pub spectrogram: Spectrogram,
    /// Range bin the slow-time signal was taken from.
    pub bin: usize,
    pub weights: FrameWeights,
    pub features: FeatureTensor,
}

/// Full chain for one radar-frame `Internal20` sequence. Unit weights when
/// `params` is `None`. Errors carry `id` and the failing stage.
pub fn synthesize_sequence(
    id: &str,
    seq: &JointFrameSequence,
    ctx: &SynthesisContext,
    params: Option<&WeightNetParams>,
) -> Result<Synthesis> {
    let tracks =
        resample_tracks(seq, &ctx.radar, &ctx.model).map_err(|e| e.at_stage(id, "tracks"))?;
    let features = extract_features(&tracks.tracks, tracks.timeline.chirps_per_frame)
        .map_err(|e| e.at_stage(id, "features"))?;
    let weights = match params {
        Some(p) => p
            .forward(&features)
            .map_err(|e| e.at_stage(id, "weights"))?,
        None => FrameWeights::ones(features.scatterers(), features.frames()),
    };
    let composite = simulate_composites(&tracks, ctx, &[&weights])
        .map_err(|e| e.at_stage(id, "radar"))?
        .remove(0);
    let (spectrogram, bin) = process_cube(&composite, &ctx.radar, &ctx.stft, ctx.bin_mode)
        .map_err(|e| e.at_stage(id, "dsp"))?;
    Ok(Synthesis {
        spectrogram,
        bin,
        weights,
        features,
    })
}

/// Parses, aligns and synthesizes one manifest entry.
pub fn synthesize_entry(
    entry: &ManifestEntry,
    manifest: &DatasetManifest,
    ctx: &SynthesisContext,
    params: Option<&WeightNetParams>,
) -> Result<Synthesis> {
    let seq = load_entry_sequence(entry, manifest)?;
    synthesize_sequence(&entry.id, &seq, ctx, params)
}

/// Per-frame weights computed from raw motion features: a logistic step in
/// one feature between `low` and `high`. Stands in for the unknown physics a
/// trained network has to discover.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HiddenWeightRule {
    pub feature: Feature,
    pub center: f64,
    pub width: f64,
    pub low: f64,
    pub high: f64,
}

impl Default for HiddenWeightRule {
    fn default() -> Self {
        Self {
            feature: Feature::Rcs,
            center: -4.8,
            width: 1.0,
            low: 0.2,
            high: 2.0,
        }
    }
}

impl HiddenWeightRule {
    pub fn weights(&self, features: &FeatureTensor) -> Result<FrameWeights> {
        if !(self.width > 0.0 && self.low >= 0.0 && self.high >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "hidden weight rule {self:?}"
            )));
        }
        let rows = (0..features.scatterers())
            .map(|k| {
                (0..features.frames())
                    .map(|f| {
                        let x = (features.get(k, f, self.feature) - self.center) / self.width;
                        self.low + (self.high - self.low) / (1.0 + (-x).exp())
                    })
                    .collect()
            })
            .collect();
        FrameWeights::from_rows(rows)
    }
}

/// Where the reference spectrogram of a training item comes from.
#[derive(Debug, Clone, Copy)]
pub enum Reference<'a> {
    /// A measured (or otherwise external) spectrogram.
    Spectrogram(&'a Spectrogram),
    /// Synthesize the reference with weights from the rule.
    Hidden(&'a HiddenWeightRule),
}

/// Builds a [`TrainingItem`] for one sequence.
///
/// The first pass synthesizes the unit-weight composite (and the hidden-weight
/// reference when asked) to pick the range bin; the second pass re-synthesizes
/// each scatterer and keeps only its slow-time signal at that bin.
pub fn training_item(
    id: &str,
    seq: &JointFrameSequence,
    ctx: &SynthesisContext,
    reference: Reference,
) -> Result<TrainingItem> {
    let tracks =
        resample_tracks(seq, &ctx.radar, &ctx.model).map_err(|e| e.at_stage(id, "tracks"))?;
    let cpf = tracks.timeline.chirps_per_frame;
    let features = extract_features(&tracks.tracks, cpf).map_err(|e| e.at_stage(id, "features"))?;
    let unit = FrameWeights::ones(features.scatterers(), features.frames());
    let hidden = match reference {
        Reference::Hidden(rule) => Some(
            rule.weights(&features)
                .map_err(|e| e.at_stage(id, "weights"))?,
        ),
        Reference::Spectrogram(_) => None,
    };
    let mut sets = vec![&unit];
    sets.extend(hidden.as_ref());
    let composites =
        simulate_composites(&tracks, ctx, &sets).map_err(|e| e.at_stage(id, "radar"))?;
    let (_, bin) = process_cube(&composites[0], &ctx.radar, &ctx.stft, ctx.bin_mode)
        .map_err(|e| e.at_stage(id, "dsp"))?;
    let reference = match reference {
        Reference::Spectrogram(s) => s.clone(),
        Reference::Hidden(_) => {
            process_cube(&composites[1], &ctx.radar, &ctx.stft, ctx.bin_mode)
                .map_err(|e| e.at_stage(id, "dsp"))?
                .0
        }
    };
    drop(composites);

    let mut signals = ProjectedSignals::new(tracks.timeline.len(), cpf, bin)?;
    for (k, track) in tracks.tracks.iter().enumerate() {
        let cube = synthesize_if_with(track, &ctx.radar, ctx.sim, k)
            .map_err(|e| e.at_stage(id, "radar"))?;
        signals
            .push_cube(&cube)
            .map_err(|e| e.at_stage(id, "projection"))?;
    }
    TrainingItem::new(id, features, signals, reference).map_err(|e| e.at_stage(id, "item"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gestures::{generate, GestureKind, GestureSpec};
    use crate::metrics::{ssim, SsimConfig};
    use crate::weightnet::Objective;

    fn short_ctx() -> SynthesisContext {
        let mut ctx = SynthesisContext::default();
        ctx.stft.target_len = 512;
        ctx
    }

    fn seq(kind: GestureKind) -> JointFrameSequence {
        generate(&GestureSpec {
            duration: 0.45,
            ..GestureSpec::new(kind)
        })
        .unwrap()
    }

    #[test]
    fn unit_synthesis_is_normalized() {
        let out = synthesize_sequence("c", &seq(GestureKind::Circle), &short_ctx(), None).unwrap();
        assert_eq!(out.spectrogram.shape(), (64, 8));
        let v = out.spectrogram.values();
        assert!(v.iter().all(|x| (0.0..=1.0).contains(x)));
        assert_eq!(out.weights.scatterers(), 19);
        assert!(out.weights.as_slice().iter().all(|&w| w == 1.0));
    }

    #[test]
    fn untrained_network_reproduces_unit_weights() {
        let ctx = short_ctx();
        let s = seq(GestureKind::Grasp);
        let unit = synthesize_sequence("g", &s, &ctx, None).unwrap();
        let p = WeightNetParams::init(8, 3).unwrap();
        let net = synthesize_sequence("g", &s, &ctx, Some(&p)).unwrap();
        assert!(net
            .weights
            .as_slice()
            .iter()
            .all(|w| (w - 1.0).abs() < 1e-12));
        assert_eq!(net.spectrogram.shape(), unit.spectrogram.shape());
        assert!(
            ssim(&unit.spectrogram, &net.spectrogram, &SsimConfig::default()).unwrap() > 0.999_999
        );
    }

    #[test]
    fn errors_name_entry_and_stage() {
        let tiny = generate(&GestureSpec {
            duration: 0.01,
            ..GestureSpec::new(GestureKind::Slide)
        })
        .unwrap();
        let err = synthesize_sequence("slide-7", &tiny, &short_ctx(), None).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("slide-7") && msg.contains("tracks"), "{msg}");
    }

    #[test]
    fn hidden_item_reproduces_its_reference() {
        let ctx = short_ctx();
        let s = seq(GestureKind::FingerWave);
        let rule = HiddenWeightRule::default();
        let item = training_item("w", &s, &ctx, Reference::Hidden(&rule)).unwrap();
        assert_eq!(item.signals.scatterers(), 19);
        let hidden = rule.weights(&item.features).unwrap();
        let obj = Objective {
            stft: ctx.stft,
            ..Objective::default()
        };
        // equal range bins make the projected path exact
        let direct = synthesize_sequence("w", &s, &ctx, None).unwrap();
        if direct.bin == item.signals.bin() {
            assert!(obj.ssim_with_weights(&item, &hidden).unwrap() > 0.999);
        }
        let unit = FrameWeights::ones(19, item.features.frames());
        let own = obj.ssim_with_weights(&item, &unit).unwrap();
        assert!(
            (own - ssim(&direct.spectrogram, &item.reference, &SsimConfig::default()).unwrap())
                .abs()
                < 1e-9
        );
    }

    #[test]
    fn leap_sequences_are_moved_into_the_radar_frame() {
        let s = seq(GestureKind::Slide);
        let leap =
            crate::hand_model::radar_to_leap(&s, SensorOffset::new(0.0, 0.05).unwrap()).unwrap();
        let back = prepare_sequence(
            &leap,
            SensorOffset::new(0.0, 0.05).unwrap(),
            &AlignmentSpec::default(),
        )
        .unwrap();
        assert_eq!(back.layout(), JointLayout::Internal20);
        for (a, b) in s.frames().iter().zip(back.frames()) {
            for (p, q) in a.joints.iter().zip(&b.joints) {
                assert!((p - q).norm() < 1e-15);
            }
        }
    }
}
