use serde::{Deserialize, Serialize};

use crate::hand_model::ScattererTrack;
use crate::{Error, Result};

pub const FEATURE_COUNT: usize = 5;

/// Input features in tensor order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    /// Visible vertices over the segment's vertex count.
    Visibility,
    /// m/s.
    RadialVelocity,
    /// m/s².
    Acceleration,
    /// log10 of the RCS in m².
    Rcs,
    /// m.
    Distance,
}

impl Feature {
    pub const ALL: [Feature; FEATURE_COUNT] = [
        Feature::Visibility,
        Feature::RadialVelocity,
        Feature::Acceleration,
        Feature::Rcs,
        Feature::Distance,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Feature::Visibility => "visibility",
            Feature::RadialVelocity => "velocity",
            Feature::Acceleration => "acceleration",
            Feature::Rcs => "rcs",
            Feature::Distance => "distance",
        }
    }
}

/// Floor added to the RCS before taking log10, m².
pub const RCS_LOG_FLOOR: f64 = 1e-12;

/// Per-scatterer, per-frame features, `[scatterer][frame][feature]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTensor {
    scatterers: usize,
    frames: usize,
    data: Vec<f64>,
}

impl FeatureTensor {
    pub fn zeros(scatterers: usize, frames: usize) -> Self {
        Self {
            scatterers,
            frames,
            data: vec![0.0; scatterers * frames * FEATURE_COUNT],
        }
    }

    pub fn from_data(scatterers: usize, frames: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != scatterers * frames * FEATURE_COUNT {
            return Err(Error::DimensionMismatch(format!(
                "{} feature values for {scatterers} scatterers x {frames} frames",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("features".into()));
        }
        Ok(Self {
            scatterers,
            frames,
            data,
        })
    }

    pub fn scatterers(&self) -> usize {
        self.scatterers
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// The feature vector of one scatterer at one frame.
    pub fn at(&self, scatterer: usize, frame: usize) -> &[f64] {
        let o = (scatterer * self.frames + frame) * FEATURE_COUNT;
        &self.data[o..o + FEATURE_COUNT]
    }

    pub fn at_mut(&mut self, scatterer: usize, frame: usize) -> &mut [f64] {
        let o = (scatterer * self.frames + frame) * FEATURE_COUNT;
        &mut self.data[o..o + FEATURE_COUNT]
    }

    pub fn get(&self, scatterer: usize, frame: usize, feature: Feature) -> f64 {
        self.at(scatterer, frame)[feature.index()]
    }

    /// Copy with the scatterer rows reordered: row `i` of the result is row
    /// `order[i]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        let mut out = Self::zeros(order.len(), self.frames);
        for (i, &k) in order.iter().enumerate() {
            for f in 0..self.frames {
                out.at_mut(i, f).copy_from_slice(self.at(k, f));
            }
        }
        out
    }
}

/// Raw (unstandardized) features: per-frame means of the per-chirp values.
pub fn extract_features(
    tracks: &[ScattererTrack],
    chirps_per_frame: usize,
) -> Result<FeatureTensor> {
    let first = tracks.first().ok_or(Error::Empty("scatterer tracks"))?;
    if chirps_per_frame == 0 {
        return Err(Error::InvalidArgument(
            "chirps_per_frame must be positive".into(),
        ));
    }
    let chirps = first.len();
    if chirps == 0 || chirps % chirps_per_frame != 0 {
        return Err(Error::DimensionMismatch(format!(
            "{chirps} chirps do not split into frames of {chirps_per_frame}"
        )));
    }
    let frames = chirps / chirps_per_frame;
    let mut out = FeatureTensor::zeros(tracks.len(), frames);
    for (k, track) in tracks.iter().enumerate() {
        track.check_len(chirps)?;
        let per_vertex = 1.0 / track.vertex_count.max(1) as f64;
        for f in 0..frames {
            let mut acc = [0.0; FEATURE_COUNT];
            for m in f * chirps_per_frame..(f + 1) * chirps_per_frame {
                acc[0] += track.visible_vertices[m] as f64 * per_vertex;
                acc[1] += track.radial_velocity[m];
                acc[2] += track.acceleration[m];
                acc[3] += (track.rcs[m] + RCS_LOG_FLOOR).log10();
                acc[4] += track.distance[m];
            }
            for (dst, a) in out.at_mut(k, f).iter_mut().zip(acc) {
                *dst = a / chirps_per_frame as f64;
            }
        }
    }
    if out.data.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteStage("feature extraction"));
    }
    Ok(out)
}

/// Z-score statistics fitted on a training split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats {
    pub mean: [f64; FEATURE_COUNT],
    pub std: [f64; FEATURE_COUNT],
}

impl Default for FeatureStats {
    fn default() -> Self {
        Self {
            mean: [0.0; FEATURE_COUNT],
            std: [1.0; FEATURE_COUNT],
        }
    }
}

/// Standard deviations below this are treated as 1 (constant feature).
const MIN_STD: f64 = 1e-12;

impl FeatureStats {
    /// Population mean and standard deviation over every (scatterer, frame)
    /// cell of every tensor.
    pub fn fit<'a>(tensors: impl IntoIterator<Item = &'a FeatureTensor>) -> Result<Self> {
        let mut sum = [0.0; FEATURE_COUNT];
        let mut sq = [0.0; FEATURE_COUNT];
        let mut n = 0usize;
        for t in tensors {
            for cell in t.data.chunks_exact(FEATURE_COUNT) {
                for i in 0..FEATURE_COUNT {
                    sum[i] += cell[i];
                    sq[i] += cell[i] * cell[i];
                }
                n += 1;
            }
        }
        if n == 0 {
            return Err(Error::Empty("feature tensors"));
        }
        let mut stats = Self::default();
        for i in 0..FEATURE_COUNT {
            let mean = sum[i] / n as f64;
            let var = (sq[i] / n as f64 - mean * mean).max(0.0);
            stats.mean[i] = mean;
            stats.std[i] = if var.sqrt() > MIN_STD {
                var.sqrt()
            } else {
                1.0
            };
        }
        Ok(stats)
    }

    /// Standardizes a tensor; features switched off in `mask` become 0.
    pub fn apply(&self, raw: &FeatureTensor, mask: &FeatureMask) -> FeatureTensor {
        let mut out = raw.clone();
        for cell in out.data.chunks_exact_mut(FEATURE_COUNT) {
            for i in 0..FEATURE_COUNT {
                cell[i] = if mask.0[i] {
                    (cell[i] - self.mean[i]) / self.std[i]
                } else {
                    0.0
                };
            }
        }
        out
    }
}

/// Which features the network sees. Used for ablations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureMask(pub [bool; FEATURE_COUNT]);

impl Default for FeatureMask {
    fn default() -> Self {
        Self([true; FEATURE_COUNT])
    }
}

impl FeatureMask {
    pub fn without(feature: Feature) -> Self {
        let mut m = Self::default();
        m.0[feature.index()] = false;
        m
    }

    pub fn enabled(&self, feature: Feature) -> bool {
        self.0[feature.index()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hand_model::{ChirpTimeline, ScattererTrack};
    use crate::radar_sim::{RadarConfig, RadarParams};
    use crate::Vec3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params() -> RadarParams {
        RadarParams::from_config(&RadarConfig {
            chirps_per_frame: 8,
            ..Default::default()
        })
        .unwrap()
    }

    fn track(p: &RadarParams, frames: usize, velocity: Vec3) -> ScattererTrack {
        let tl = ChirpTimeline::new(0.0, p, frames);
        let centers = tl
            .times
            .iter()
            .map(|t| Vec3::new(0.02, 0.0, 0.3) + velocity * *t)
            .collect();
        let axes = vec![Vec3::new(1.0, 0.2, 0.3); tl.len()];
        ScattererTrack::from_kinematics(
            0,
            0,
            6e-3,
            402,
            &tl.times,
            centers,
            &axes,
            Vec3::zeros(),
            p.wavelength(),
        )
        .unwrap()
    }

    #[test]
    fn static_visible_cylinder() {
        let p = params();
        let t = track(&p, 3, Vec3::zeros());
        let f = extract_features(&[t], 8).unwrap();
        assert_eq!((f.scatterers(), f.frames()), (1, 3));
        for fr in 0..3 {
            assert_eq!(f.get(0, fr, Feature::Visibility), 1.0);
            assert!(f.get(0, fr, Feature::RadialVelocity).abs() < 1e-9);
            assert!(f.get(0, fr, Feature::Acceleration).abs() < 1e-9);
        }
    }

    #[test]
    fn fully_occluded_segment() {
        let p = params();
        let mut t = track(&p, 2, Vec3::zeros());
        t.visible_vertices.fill(0);
        let f = extract_features(&[t], 8).unwrap();
        assert_eq!(f.get(0, 1, Feature::Visibility), 0.0);
    }

    #[test]
    fn frame_means_match_naive_average() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut t = track(&p, 4, Vec3::new(0.1, -0.3, 0.2));
        for m in 0..t.len() {
            t.radial_velocity[m] = rng.gen_range(-2.0..2.0);
            t.acceleration[m] = rng.gen_range(0.0..5.0);
            t.visible_vertices[m] = rng.gen_range(0..=402);
            t.rcs[m] = rng.gen_range(1e-8..1e-5);
        }
        let f = extract_features(std::slice::from_ref(&t), 8).unwrap();
        for fr in 0..4 {
            let idx: Vec<usize> = (fr * 8..fr * 8 + 8).collect();
            let mean = |g: &dyn Fn(usize) -> f64| idx.iter().map(|&m| g(m)).sum::<f64>() / 8.0;
            let expect = [
                mean(&|m| t.visible_vertices[m] as f64 / 402.0),
                mean(&|m| t.radial_velocity[m]),
                mean(&|m| t.acceleration[m]),
                mean(&|m| (t.rcs[m] + RCS_LOG_FLOOR).log10()),
                mean(&|m| t.distance[m]),
            ];
            for (a, b) in f.at(0, fr).iter().zip(expect) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn empty_tracks_are_rejected() {
        assert!(matches!(extract_features(&[], 8), Err(Error::Empty(_))));
    }

    #[test]
    fn standardization_and_mask() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let raw =
            FeatureTensor::from_data(3, 4, (0..60).map(|_| rng.gen_range(-5.0..5.0)).collect())
                .unwrap();
        let stats = FeatureStats::fit([&raw]).unwrap();
        let z = stats.apply(&raw, &FeatureMask::default());
        let refit = FeatureStats::fit([&z]).unwrap();
        for i in 0..FEATURE_COUNT {
            assert!(refit.mean[i].abs() < 1e-12);
            assert!((refit.std[i] - 1.0).abs() < 1e-9);
        }
        let masked = stats.apply(&raw, &FeatureMask::without(Feature::Rcs));
        assert!((0..3).all(|k| (0..4).all(|f| masked.get(k, f, Feature::Rcs) == 0.0)));

        let constant = FeatureTensor::from_data(1, 2, vec![2.0; 10]).unwrap();
        let s = FeatureStats::fit([&constant]).unwrap();
        assert_eq!(s.std, [1.0; FEATURE_COUNT]);
    }
}
