//! Radar signal processing: range FFT, static clutter removal, range-bin
//! selection and the slow-time STFT that produces 64×32 spectrograms.

mod range;
mod spectrogram;
mod stft;

pub use range::{clutter_suppress, range_fft, select_range_bin, RangeBinMode, RangeProfileCube};
pub(crate) use spectrogram::min_max_normalize;
pub use spectrogram::{Colormap, Spectrogram, SPECTROGRAM_MAGIC, SPECTROGRAM_VERSION};
pub(crate) use stft::log_magnitude_slope;
pub use stft::{
    doppler_row, hamming, log_magnitude, standardize_length, standardize_span, stft_complex,
    stft_spectrogram, StftConfig,
};

use std::f64::consts::PI;

use crate::radar_sim::{IfSignalCube, RadarParams};
use crate::Result;

/// Range of a beat frequency: `d = f·c / (2S)`.
pub fn beat_to_distance(beat_frequency: f64, params: &RadarParams) -> f64 {
    beat_frequency * params.wave_speed / (2.0 * params.slope)
}

/// Radial velocity of a chirp-to-chirp phase step: `v = λ·Δφ / (4π·T_c)`.
pub fn phase_to_velocity(phase_step: f64, params: &RadarParams) -> f64 {
    params.wavelength() * phase_step / (4.0 * PI * params.chirp_interval)
}

/// Full chain from an IF cube to a spectrogram. Returns the image and the
/// selected range bin.
pub fn process_cube(
    cube: &IfSignalCube,
    params: &RadarParams,
    cfg: &StftConfig,
    mode: RangeBinMode,
) -> Result<(Spectrogram, usize)> {
    let profiles = clutter_suppress(&range_fft(cube, params))?;
    let (bin, slow_time) = select_range_bin(&profiles, mode)?;
    Ok((stft_spectrogram(&slow_time, cfg, params)?, bin))
}
