//! Hybrid FMCW radar spectrogram synthesis for hand gestures.
//!
//! The crate turns 3D hand-skeleton sequences into 64×32 time-Doppler
//! spectrograms in two layers:
//!
//! * a physics layer: every bone becomes a tessellated cylinder whose
//!   center is a point scatterer with a cylinder radar cross section, and
//!   each scatterer produces a dechirped FMCW intermediate-frequency (IF)
//!   signal ([`hand_model`], [`radar_sim`]);
//! * a learned layer: a small recurrent network looks at per-scatterer
//!   motion features (visibility, RCS, distance, velocity, acceleration) and
//!   assigns each scatterer a positive weight per radar frame. The weighted
//!   sum of the untouched per-scatterer signals goes through the usual
//!   range-FFT / clutter removal / STFT chain ([`dsp`]) and the network is
//!   trained end to end against reference spectrograms with an SSIM loss
//!   ([`weightnet`], [`metrics`]).
//!
//! [`pipeline`] wires everything together (dataset manifests, skeleton
//! alignment for 22-joint datasets, batch export and evaluation), and
//! [`gestures`] generates parametric gesture fixtures for tests and demos.

pub mod dsp;
pub mod error;
pub mod geometry;
pub mod gestures;
pub mod hand_model;
pub mod metrics;
pub mod pipeline;
pub mod radar_sim;
pub mod weightnet;

pub use error::{Error, Result};

/// Three-component `f64` vector used for every position in meters.
pub type Vec3 = nalgebra::Vector3<f64>;

/// Complex sample type used by the signal chain.
pub type Complex = num_complex::Complex64;
