//! A single point scatterer moving at constant radial velocity, run through
//! the full range-FFT / clutter removal / STFT chain.
//!
//! ```text
//! cargo run --release --example point_target -- 1.2
//! ```

use handsynth::dsp::{process_cube, Colormap, RangeBinMode, StftConfig};
use handsynth::hand_model::{ChirpTimeline, ScattererTrack};
use handsynth::radar_sim::{synthesize_if, RadarParams};
use handsynth::Vec3;

fn main() -> handsynth::Result<()> {
    let v: f64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("velocity in m/s"))
        .unwrap_or(1.0);
    let radar = RadarParams::default();
    let timeline = ChirpTimeline::new(0.0, &radar, 16);
    let start = if v < 0.0 { 0.3 - v * 1.6 } else { 0.3 };
    let centers = timeline
        .times
        .iter()
        .map(|t| Vec3::new(0.0, 0.0, start + v * t))
        .collect();
    let axes = vec![Vec3::x(); timeline.len()];
    let track = ScattererTrack::from_kinematics(
        0,
        0,
        0.01,
        402,
        &timeline.times,
        centers,
        &axes,
        Vec3::zeros(),
        radar.wavelength(),
    )?;

    let cube = synthesize_if(&track, &radar)?;
    let (spec, bin) = process_cube(&cube, &radar, &StftConfig::default(), RangeBinMode::MaxEnergy)?;

    let values = spec.values();
    let peak = (0..values.len())
        .max_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap();
    let row = peak / spec.cols();
    println!("target velocity     {v:+.3} m/s");
    println!("selected range bin  {bin} ({:.3} m)", bin as f64 * radar.range_bin_spacing());
    println!("Doppler bin size    {:.4} m/s", spec.doppler_bin_velocity);
    println!("peak row            {row} -> {:+.3} m/s", spec.row_velocity(row));

    let out = std::env::temp_dir().join("point_target.png");
    spec.save_png(&out, Colormap::Jet, 8)?;
    println!("heatmap             {}", out.display());
    Ok(())
}
