//! FMCW radar configuration.
//!
//! [`RadarConfig`] is the on-disk form with human units (GHz, MHz/µs, dB, dBm)
//! and [`RadarParams`] the validated SI form every computation uses.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Radar configuration file contents. Field names follow the radar's
/// parameter sheet; defaults describe a 77 GHz single-Tx/single-Rx sensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadarConfig {
    pub starting_frequency_ghz: f64,
    pub frequency_slope_mhz_per_us: f64,
    pub bandwidth_ghz: f64,
    /// Chirp ramp duration; derived as bandwidth / slope when absent.
    pub chirp_duration_us: Option<f64>,
    pub sampling_rate_ksps: f64,
    pub samples_per_chirp: usize,
    pub chirps_per_frame: usize,
    pub frame_rate_fps: f64,
    /// Chirp repetition interval; `frame period / chirps_per_frame` when absent.
    pub chirp_interval_us: Option<f64>,
    pub rx_gain_db: f64,
    pub tx_gain_db: f64,
    pub transmission_power_dbm: f64,
    pub amplitude: f64,
    pub initial_phase_rad: f64,
    pub speed_of_light_mps: f64,
}

impl Default for RadarConfig {
    fn default() -> Self {
        Self {
            starting_frequency_ghz: 77.0,
            frequency_slope_mhz_per_us: 76.22,
            bandwidth_ghz: 3.9,
            chirp_duration_us: None,
            sampling_rate_ksps: 12_500.0,
            samples_per_chirp: 256,
            chirps_per_frame: 128,
            frame_rate_fps: 10.0,
            chirp_interval_us: Some(390.0),
            rx_gain_db: 30.0,
            tx_gain_db: 8.0,
            transmission_power_dbm: 12.0,
            amplitude: 1.0,
            initial_phase_rad: 0.0,
            speed_of_light_mps: 3e8,
        }
    }
}

impl RadarConfig {
    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::format(origin, e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text, path)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("radar config serializes")
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Validated FMCW parameters in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct RadarParams {
    /// Chirp start frequency f0, Hz.
    pub start_frequency: f64,
    /// Sweep bandwidth B, Hz.
    pub bandwidth: f64,
    /// Chirp slope S, Hz/s.
    pub slope: f64,
    /// Ramp duration T, s.
    pub chirp_duration: f64,
    pub samples_per_chirp: usize,
    /// ADC sample rate, Hz.
    pub sample_rate: f64,
    pub chirps_per_frame: usize,
    /// Frames per second.
    pub frame_rate: f64,
    /// Chirp repetition interval T_c, s.
    pub chirp_interval: f64,
    /// Linear antenna gains.
    pub tx_gain: f64,
    pub rx_gain: f64,
    /// Transmit power, W.
    pub tx_power: f64,
    pub amplitude: f64,
    pub initial_phase: f64,
    /// Wave speed c, m/s.
    pub wave_speed: f64,
}

impl Default for RadarParams {
    fn default() -> Self {
        Self::from_config(&RadarConfig::default()).expect("default radar config is valid")
    }
}

impl RadarParams {
    pub fn from_config(cfg: &RadarConfig) -> Result<Self> {
        let bandwidth = cfg.bandwidth_ghz * 1e9;
        let slope = cfg.frequency_slope_mhz_per_us * 1e12;
        let chirp_duration = match cfg.chirp_duration_us {
            Some(us) => us * 1e-6,
            None => bandwidth / slope,
        };
        let frame_period = 1.0 / cfg.frame_rate_fps;
        let chirp_interval = match cfg.chirp_interval_us {
            Some(us) => us * 1e-6,
            None => frame_period / cfg.chirps_per_frame as f64,
        };
        let params = Self {
            start_frequency: cfg.starting_frequency_ghz * 1e9,
            bandwidth,
            slope,
            chirp_duration,
            samples_per_chirp: cfg.samples_per_chirp,
            sample_rate: cfg.sampling_rate_ksps * 1e3,
            chirps_per_frame: cfg.chirps_per_frame,
            frame_rate: cfg.frame_rate_fps,
            chirp_interval,
            tx_gain: db_to_linear(cfg.tx_gain_db),
            rx_gain: db_to_linear(cfg.rx_gain_db),
            tx_power: dbm_to_watts(cfg.transmission_power_dbm),
            amplitude: cfg.amplitude,
            initial_phase: cfg.initial_phase_rad,
            wave_speed: cfg.speed_of_light_mps,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_config(&RadarConfig::load(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("start_frequency", self.start_frequency),
            ("bandwidth", self.bandwidth),
            ("slope", self.slope),
            ("chirp_duration", self.chirp_duration),
            ("sample_rate", self.sample_rate),
            ("frame_rate", self.frame_rate),
            ("chirp_interval", self.chirp_interval),
            ("tx_gain", self.tx_gain),
            ("rx_gain", self.rx_gain),
            ("tx_power", self.tx_power),
            ("amplitude", self.amplitude),
            ("wave_speed", self.wave_speed),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !self.initial_phase.is_finite() {
            return Err(Error::InvalidParams("initial phase must be finite".into()));
        }
        if self.samples_per_chirp == 0 || self.chirps_per_frame == 0 {
            return Err(Error::InvalidParams(
                "sample and chirp counts must be positive".into(),
            ));
        }
        let implied = self.bandwidth / self.chirp_duration;
        if ((self.slope - implied) / self.slope).abs() > 1e-6 {
            return Err(Error::InvalidParams(format!(
                "slope {} Hz/s disagrees with bandwidth/duration {} Hz/s",
                self.slope, implied
            )));
        }
        let sampling_window = self.samples_per_chirp as f64 / self.sample_rate;
        if sampling_window > self.chirp_duration * (1.0 + 1e-12) {
            return Err(Error::InvalidParams(format!(
                "sampling window {sampling_window:.3e} s exceeds chirp duration {:.3e} s",
                self.chirp_duration
            )));
        }
        if self.chirp_interval < self.chirp_duration * (1.0 - 1e-12) {
            return Err(Error::InvalidParams(
                "chirp interval shorter than the chirp ramp".into(),
            ));
        }
        if self.chirp_interval * self.chirps_per_frame as f64 > self.frame_period() * (1.0 + 1e-12)
        {
            return Err(Error::InvalidParams(
                "chirps of one frame do not fit in the frame period".into(),
            ));
        }
        Ok(())
    }

    /// λ = c / f0.
    pub fn wavelength(&self) -> f64 {
        self.wave_speed / self.start_frequency
    }

    pub fn frame_period(&self) -> f64 {
        1.0 / self.frame_rate
    }

    /// Distance covered by one range-FFT bin, `c·fs / (2·S·N)`.
    pub fn range_bin_spacing(&self) -> f64 {
        self.wave_speed * self.sample_rate / (2.0 * self.slope * self.samples_per_chirp as f64)
    }

    /// Theoretical range resolution `c / 2B`.
    pub fn range_resolution(&self) -> f64 {
        self.wave_speed / (2.0 * self.bandwidth)
    }

    /// Range of the highest beat frequency the ADC can represent.
    pub fn max_range(&self) -> f64 {
        self.sample_rate * self.wave_speed / (2.0 * self.slope)
    }

    /// Unambiguous velocity `λ / (4·T_c)`.
    pub fn max_velocity(&self) -> f64 {
        self.wavelength() / (4.0 * self.chirp_interval)
    }

    /// Doppler resolution of a full frame, `2·v_max / chirps_per_frame`.
    pub fn frame_velocity_resolution(&self) -> f64 {
        2.0 * self.max_velocity() / self.chirps_per_frame as f64
    }

    /// Doppler bin width of a `window_len`-point slow-time DFT.
    pub fn stft_velocity_resolution(&self, window_len: usize) -> f64 {
        self.wavelength() / (2.0 * window_len as f64 * self.chirp_interval)
    }

    /// `(4π)^1.5`, the free-space spreading constant of the amplitude law.
    pub(crate) fn spreading_constant() -> f64 {
        (4.0 * PI).powf(1.5)
    }
}
