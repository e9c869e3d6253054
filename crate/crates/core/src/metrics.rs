//! Image similarity between spectrograms: global SSIM and MSE.
//!
//! SSIM uses whole-image statistics (one window) with population variances.
//! Scores are printed ×100.

use serde::{Deserialize, Serialize};

use crate::dsp::Spectrogram;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsimConfig {
    pub c1: f64,
    pub c2: f64,
}

impl SsimConfig {
    /// `c1 = (0.01·L)²`, `c2 = (0.03·L)²`.
    pub fn for_dynamic_range(l: f64) -> Self {
        Self {
            c1: (0.01 * l).powi(2),
            c2: (0.03 * l).powi(2),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.c1 > 0.0 && self.c2 > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "SSIM constants must be positive: {self:?}"
            )))
        }
    }
}

impl Default for SsimConfig {
    fn default() -> Self {
        Self::for_dynamic_range(1.0)
    }
}

fn check_shapes(x: &Spectrogram, y: &Spectrogram) -> Result<()> {
    if x.shape() != y.shape() {
        return Err(Error::ShapeMismatch {
            left: x.shape(),
            right: y.shape(),
        });
    }
    Ok(())
}

struct Moments {
    mx: f64,
    my: f64,
    vx: f64,
    vy: f64,
    cov: f64,
}

fn moments(x: &[f64], y: &[f64]) -> Moments {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut vx, mut vy, mut cov) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        vx += da * da;
        vy += db * db;
        cov += da * db;
    }
    Moments {
        mx,
        my,
        vx: vx / n,
        vy: vy / n,
        cov: cov / n,
    }
}

/// SSIM of two equally long value slices.
pub fn ssim_values(x: &[f64], y: &[f64], cfg: &SsimConfig) -> Result<f64> {
    Ok(ssim_values_with_grad(x, y, cfg, false)?.0)
}

/// SSIM and, if requested, its gradient with respect to `x`.
pub fn ssim_values_with_grad(
    x: &[f64],
    y: &[f64],
    cfg: &SsimConfig,
    grad: bool,
) -> Result<(f64, Vec<f64>)> {
    cfg.validate()?;
    if x.len() != y.len() {
        return Err(Error::ShapeMismatch {
            left: (x.len(), 1),
            right: (y.len(), 1),
        });
    }
    if x.is_empty() {
        return Err(Error::Empty("image"));
    }
    let m = moments(x, y);
    let a1 = 2.0 * m.mx * m.my + cfg.c1;
    let a2 = 2.0 * m.cov + cfg.c2;
    let b1 = m.mx * m.mx + m.my * m.my + cfg.c1;
    let b2 = m.vx + m.vy + cfg.c2;
    let s = a1 * a2 / (b1 * b2);
    if !grad {
        return Ok((s, Vec::new()));
    }
    let n = x.len() as f64;
    let g = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| {
            let da1 = 2.0 * m.my / n;
            let da2 = 2.0 * (yi - m.my) / n;
            let db1 = 2.0 * m.mx / n;
            let db2 = 2.0 * (xi - m.mx) / n;
            s * (da1 / a1 + da2 / a2 - db1 / b1 - db2 / b2)
        })
        .collect();
    Ok((s, g))
}

/// Global SSIM between two spectrograms.
pub fn ssim(x: &Spectrogram, y: &Spectrogram, cfg: &SsimConfig) -> Result<f64> {
    check_shapes(x, y)?;
    ssim_values(x.values(), y.values(), cfg)
}

/// SSIM and its gradient with respect to the pixels of `x`.
pub fn ssim_with_grad(
    x: &Spectrogram,
    y: &Spectrogram,
    cfg: &SsimConfig,
) -> Result<(f64, Vec<f64>)> {
    check_shapes(x, y)?;
    ssim_values_with_grad(x.values(), y.values(), cfg, true)
}

/// Mean squared pixel difference.
pub fn mse(x: &Spectrogram, y: &Spectrogram) -> Result<f64> {
    check_shapes(x, y)?;
    let n = x.values().len() as f64;
    Ok(x.values()
        .iter()
        .zip(y.values())
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        / n)
}
