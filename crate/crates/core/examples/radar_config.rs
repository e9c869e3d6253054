//! Loads radar settings from TOML (or uses the defaults) and prints the
//! quantities derived from them.
//!
//! ```text
//! cargo run --example radar_config -- [radar.toml]
//! ```

use std::path::Path;

use handsynth::radar_sim::{RadarConfig, RadarParams};

fn show(label: &str, p: &RadarParams) {
    println!("{label}");
    println!("  wavelength            {:.4} mm", p.wavelength() * 1e3);
    println!("  chirp interval        {:.1} us", p.chirp_interval * 1e6);
    println!("  range bin spacing     {:.4} m", p.range_bin_spacing());
    println!("  max range             {:.2} m", p.max_range());
    println!("  max velocity          {:.3} m/s", p.max_velocity());
    println!("  frame velocity res.   {:.4} m/s", p.frame_velocity_resolution());
    println!("  STFT bin (64 chirps)  {:.4} m/s", p.stft_velocity_resolution(64));
}

fn main() -> handsynth::Result<()> {
    let cfg = match std::env::args().nth(1) {
        Some(path) => RadarConfig::load(path)?,
        None => RadarConfig::default(),
    };
    show("configured", &RadarParams::from_config(&cfg)?);

    // a faster chirp cadence widens the unambiguous velocity span
    let text = cfg.to_toml_string().replace("chirp_interval_us = 390.0", "chirp_interval_us = 200.0");
    let faster = RadarConfig::from_toml_str(&text, Path::new("inline"))?;
    show("\nchirp interval 200 us", &RadarParams::from_config(&faster)?);

    println!("\n{}", cfg.to_toml_string());
    Ok(())
}
