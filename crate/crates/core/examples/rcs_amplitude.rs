//! Cylinder radar cross section against aspect angle, and the received
//! amplitude it implies at a few ranges.

use handsynth::radar_sim::{attenuated_amplitude, cylinder_rcs, RadarParams, ASPECT_CLAMP_LIMIT};

fn main() -> handsynth::Result<()> {
    let radar = RadarParams::default();
    let lambda = radar.wavelength();
    let radius = 0.008;
    println!("wavelength {:.3} mm, bone radius {} mm", lambda * 1e3, radius * 1e3);
    println!("aspect angle is clamped at {:.4} rad\n", ASPECT_CLAMP_LIMIT);
    println!("{:>8} {:>12} {:>8} {:>13} {:>13} {:>13}", "theta", "sigma m^2", "clamped", "A' @ 0.2 m", "A' @ 0.4 m", "A' @ 0.8 m");
    for deg in [0.0, 10.0, 30.0, 45.0, 60.0, 80.0, 89.0, 90.0] {
        let rcs = cylinder_rcs(radius, f64::to_radians(deg), lambda)?;
        print!("{deg:>8.1} {:>12.3e} {:>8}", rcs.sigma, rcs.clamped);
        for d in [0.2, 0.4, 0.8] {
            print!(" {:>13.4e}", attenuated_amplitude(&radar, rcs.sigma, d)?);
        }
        println!();
    }
    Ok(())
}
