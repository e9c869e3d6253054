//! FMCW radar model: parameters, cylinder RCS, occlusion and IF synthesis.

pub mod occlusion;
mod params;
mod rcs;
mod synth;

pub use occlusion::{visibility_count, SELF_EXCLUSION_EPS};
pub use params::{db_to_linear, dbm_to_watts, RadarConfig, RadarParams};
pub use rcs::{attenuated_amplitude, cylinder_rcs, Rcs, ASPECT_CLAMP_LIMIT, ASPECT_CLAMP_MARGIN};
pub use synth::{
    accumulate_weighted, chirp_amplitude, compose, fill_chirp, synthesize_if, synthesize_if_with,
    FrameWeights, IfSignalCube, Provenance, SimOptions,
};
