use std::f64::consts::{LN_10, TAU};

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::spectrogram::Spectrogram;
use crate::radar_sim::RadarParams;
use crate::{Complex, Error, Result};

/// Slow-time STFT settings. The defaults give a 64×32 image from 2048 chirps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StftConfig {
    pub window_len: usize,
    pub hop: usize,
    /// Slow-time length every clip is center-cropped or zero-padded to.
    pub target_len: usize,
    /// Added to |X| before the dB conversion.
    pub log_floor: f64,
}

impl Default for StftConfig {
    fn default() -> Self {
        Self {
            window_len: 64,
            hop: 64,
            target_len: 2048,
            log_floor: 1e-6,
        }
    }
}

impl StftConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window_len < 2 || self.hop == 0 || self.target_len < self.window_len {
            return Err(Error::InvalidArgument(format!("STFT config {self:?}")));
        }
        if !(self.log_floor > 0.0 && self.log_floor.is_finite()) {
            return Err(Error::InvalidArgument("log floor must be positive".into()));
        }
        Ok(())
    }

    /// Number of STFT frames (spectrogram columns).
    pub fn frames(&self) -> usize {
        (self.target_len - self.window_len) / self.hop + 1
    }
}

/// Symmetric Hamming window `0.54 − 0.46·cos(2πn/(N−1))`.
pub fn hamming(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|i| 0.54 - 0.46 * (TAU * i as f64 / (n - 1) as f64).cos())
        .collect()
}

/// Where a clip of `len` samples lands in a `target`-sample buffer:
/// `(source start, destination start, count)`.
pub fn standardize_span(len: usize, target: usize) -> (usize, usize, usize) {
    if len >= target {
        ((len - target) / 2, 0, target)
    } else {
        (0, (target - len) / 2, len)
    }
}

/// Center crop or symmetric zero padding to exactly `target` samples.
pub fn standardize_length(seq: &[Complex], target: usize) -> Vec<Complex> {
    let (src, dst, count) = standardize_span(seq.len(), target);
    let mut out = vec![Complex::new(0.0, 0.0); target];
    out[dst..dst + count].copy_from_slice(&seq[src..src + count]);
    out
}

/// Hamming-windowed DFT of each hop, laid out `[doppler row][frame]` with
/// zero Doppler on row `window_len / 2` (positive Doppler above it).
///
/// `seq` must already have `cfg.target_len` samples.
pub fn stft_complex(seq: &[Complex], cfg: &StftConfig) -> Vec<Complex> {
    debug_assert_eq!(seq.len(), cfg.target_len);
    let w = cfg.window_len;
    let cols = cfg.frames();
    let window = hamming(w);
    let fft = FftPlanner::new().plan_fft_forward(w);
    let mut out = vec![Complex::new(0.0, 0.0); w * cols];
    let mut buf = vec![Complex::new(0.0, 0.0); w];
    for t in 0..cols {
        let seg = &seq[t * cfg.hop..t * cfg.hop + w];
        for ((b, s), win) in buf.iter_mut().zip(seg).zip(&window) {
            *b = s * win;
        }
        fft.process(&mut buf);
        for (k, z) in buf.iter().enumerate() {
            out[doppler_row(k, w) * cols + t] = *z;
        }
    }
    out
}

/// Row of DFT bin `k` after the zero-Doppler shift.
pub fn doppler_row(k: usize, window_len: usize) -> usize {
    (k + window_len / 2) % window_len
}

/// `20·log10(|X| + floor)`.
pub fn log_magnitude(values: &[Complex], floor: f64) -> Vec<f64> {
    values
        .iter()
        .map(|z| 20.0 * (z.norm() + floor).log10())
        .collect()
}

/// d(20·log10(|X| + floor)) / d|X|.
pub(crate) fn log_magnitude_slope(magnitude: f64, floor: f64) -> f64 {
    20.0 / (LN_10 * (magnitude + floor))
}

/// Normalized time-Doppler spectrogram of a slow-time sequence.
pub fn stft_spectrogram(
    slow_time: &[Complex],
    cfg: &StftConfig,
    params: &RadarParams,
) -> Result<Spectrogram> {
    cfg.validate()?;
    if slow_time.is_empty() {
        return Err(Error::Empty("slow-time sequence"));
    }
    if slow_time.len() < cfg.window_len {
        return Err(Error::InvalidArgument(format!(
            "slow-time sequence of {} samples is shorter than the {}-point window",
            slow_time.len(),
            cfg.window_len
        )));
    }
    let seq = standardize_length(slow_time, cfg.target_len);
    let spec = stft_complex(&seq, cfg);
    let db = log_magnitude(&spec, cfg.log_floor);
    Spectrogram::normalized(
        cfg.window_len,
        cfg.frames(),
        db,
        params.stft_velocity_resolution(cfg.window_len),
        cfg.hop as f64 * params.chirp_interval,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::range::argmax_first;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hamming_endpoints_and_symmetry() {
        let w = hamming(64);
        assert!((w[0] - 0.08).abs() < 1e-15);
        assert!((w[63] - 0.08).abs() < 1e-12);
        for i in 0..32 {
            assert!((w[i] - w[63 - i]).abs() < 1e-12);
        }
    }

    #[test]
    fn standardize_crops_center_and_pads_symmetrically() {
        let seq: Vec<Complex> = (0..10).map(|i| Complex::new(i as f64, 0.0)).collect();
        let cropped = standardize_length(&seq, 4);
        assert_eq!(
            cropped.iter().map(|z| z.re).collect::<Vec<_>>(),
            vec![3.0, 4.0, 5.0, 6.0]
        );
        let padded = standardize_length(&seq[..2], 6);
        assert_eq!(
            padded.iter().map(|z| z.re).collect::<Vec<_>>(),
            vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0]
        );
    }

    #[test]
    fn default_shape_is_64_by_32() {
        let cfg = StftConfig::default();
        assert_eq!(cfg.frames(), 32);
        let p = RadarParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let seq: Vec<Complex> = (0..3000)
            .map(|_| Complex::new(rng.gen(), rng.gen()))
            .collect();
        let s = stft_spectrogram(&seq, &cfg, &p).unwrap();
        assert_eq!((s.rows(), s.cols()), (64, 32));
        assert!(s.values().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn positive_doppler_tone_lands_above_center() {
        let p = RadarParams::default();
        let cfg = StftConfig::default();
        let v = 1.0;
        let dphi = 4.0 * std::f64::consts::PI * v * p.chirp_interval / p.wavelength();
        let seq: Vec<Complex> = (0..2048)
            .map(|n| Complex::from_polar(1.0, dphi * n as f64))
            .collect();
        let s = stft_spectrogram(&seq, &cfg, &p).unwrap();
        let expected = 32 + (v / p.stft_velocity_resolution(64)).round() as usize;
        for t in 0..32 {
            let col: Vec<f64> = (0..64).map(|r| s.get(r, t)).collect();
            assert_eq!(argmax_first(&col), expected);
        }
        // conjugation mirrors the Doppler axis
        let conj: Vec<Complex> = seq.iter().map(|z| z.conj()).collect();
        let sc = stft_spectrogram(&conj, &cfg, &p).unwrap();
        let col: Vec<f64> = (0..64).map(|r| sc.get(r, 5)).collect();
        assert_eq!(argmax_first(&col), 64 - expected);
    }

    #[test]
    fn zero_signal_is_all_zero_image() {
        let p = RadarParams::default();
        let s = stft_spectrogram(
            &vec![Complex::new(0.0, 0.0); 2048],
            &StftConfig::default(),
            &p,
        )
        .unwrap();
        assert!(s.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn empty_and_short_inputs_are_rejected() {
        let p = RadarParams::default();
        assert!(matches!(
            stft_spectrogram(&[], &StftConfig::default(), &p),
            Err(Error::Empty(_))
        ));
        assert!(
            stft_spectrogram(&[Complex::new(1.0, 0.0); 10], &StftConfig::default(), &p).is_err()
        );
    }
}
