use std::f64::consts::{FRAC_PI_2, PI};

use super::params::RadarParams;
use crate::{Error, Result};

/// Aspect angles at or beyond `π/2 − ASPECT_CLAMP_MARGIN` are clamped there;
/// the cylinder formula diverges at broadside.
pub const ASPECT_CLAMP_MARGIN: f64 = 1e-2;

pub const ASPECT_CLAMP_LIMIT: f64 = FRAC_PI_2 - ASPECT_CLAMP_MARGIN;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rcs {
    /// Radar cross section, m².
    pub sigma: f64,
    /// The aspect angle was clamped to [`ASPECT_CLAMP_LIMIT`].
    pub clamped: bool,
}

/// Backscatter RCS of a circular cylinder seen at aspect angle `theta`
/// (angle between the cylinder axis and the line of sight):
/// `σ = λ·r·sin θ / (8π·cos²θ)`.
pub fn cylinder_rcs(radius: f64, theta: f64, wavelength: f64) -> Result<Rcs> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidArgument(format!("cylinder radius {radius}")));
    }
    if !(wavelength.is_finite() && wavelength > 0.0) {
        return Err(Error::InvalidArgument(format!("wavelength {wavelength}")));
    }
    if !theta.is_finite() || theta < 0.0 {
        return Err(Error::InvalidArgument(format!("aspect angle {theta}")));
    }
    let clamped = theta >= ASPECT_CLAMP_LIMIT;
    let theta = theta.min(ASPECT_CLAMP_LIMIT);
    let cos = theta.cos();
    Ok(Rcs {
        sigma: wavelength * radius * theta.sin() / (8.0 * PI * cos * cos),
        clamped,
    })
}

/// Received amplitude after two-way spreading:
/// `A' = λ·sqrt(G_tx·G_rx·P·σ) / ((4π)^1.5·D²)`.
pub fn attenuated_amplitude(params: &RadarParams, sigma: f64, distance: f64) -> Result<f64> {
    if !(distance.is_finite() && distance > 0.0) {
        return Err(Error::NonPositiveDistance(distance));
    }
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::InvalidArgument(format!("RCS {sigma}")));
    }
    let power = params.tx_gain * params.rx_gain * params.tx_power * sigma;
    Ok(params.wavelength() * power.sqrt()
        / (RadarParams::spreading_constant() * distance * distance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn end_on_cylinder_has_no_rcs() {
        assert_eq!(cylinder_rcs(8e-3, 0.0, 3.896e-3).unwrap().sigma, 0.0);
    }

    #[test]
    fn forty_five_degrees_value() {
        // λ r sin(π/4) / (8π cos²(π/4)) = λ r √2 / (8π)
        let s = cylinder_rcs(8e-3, FRAC_PI_4, 3.896e-3).unwrap().sigma;
        let expected = 3.896e-3 * 8e-3 * 2f64.sqrt() / (8.0 * PI);
        assert!((s - expected).abs() / expected < 1e-14);
        assert!((s - 1.75e-6).abs() < 0.01e-6);
    }

    #[test]
    fn monotone_on_quarter_turn() {
        let mut prev = -1.0;
        for i in 0..500 {
            let theta = i as f64 / 500.0 * ASPECT_CLAMP_LIMIT;
            let s = cylinder_rcs(6e-3, theta, 3.9e-3).unwrap().sigma;
            assert!(s > prev);
            prev = s;
        }
    }

    #[test]
    fn broadside_is_clamped_and_finite() {
        let r = cylinder_rcs(5e-3, FRAC_PI_2, 3.9e-3).unwrap();
        assert!(r.clamped);
        assert!(r.sigma.is_finite());
        assert_eq!(
            r.sigma,
            cylinder_rcs(5e-3, ASPECT_CLAMP_LIMIT, 3.9e-3)
                .unwrap()
                .sigma
        );
        assert!(!cylinder_rcs(5e-3, 1.0, 3.9e-3).unwrap().clamped);
    }

    #[test]
    fn linear_in_radius_and_wavelength() {
        let base = cylinder_rcs(4e-3, 0.7, 3e-3).unwrap().sigma;
        let r2 = cylinder_rcs(8e-3, 0.7, 3e-3).unwrap().sigma;
        let l2 = cylinder_rcs(4e-3, 0.7, 6e-3).unwrap().sigma;
        assert!((r2 / base - 2.0).abs() < 1e-14);
        assert!((l2 / base - 2.0).abs() < 1e-14);
    }

    #[test]
    fn amplitude_laws() {
        let p = RadarParams::default();
        assert_eq!(attenuated_amplitude(&p, 0.0, 0.3).unwrap(), 0.0);
        let near = attenuated_amplitude(&p, 1e-6, 0.3).unwrap();
        let far = attenuated_amplitude(&p, 1e-6, 0.6).unwrap();
        assert!((near / far - 4.0).abs() < 1e-12);
        assert!(matches!(
            attenuated_amplitude(&p, 1e-6, 0.0),
            Err(Error::NonPositiveDistance(_))
        ));
    }
}
