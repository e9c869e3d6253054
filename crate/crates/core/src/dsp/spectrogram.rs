//! Normalized time-Doppler images and their file formats.
//!
//! Binary layout (little endian):
//!
//! ```text
//! offset  size  field
//! 0       4     magic "HSPG"
//! 4       4     u32 format version (1)
//! 8       4     u32 rows (Doppler bins)
//! 12      4     u32 cols (time frames)
//! 16      8     f64 Doppler bin width, m/s
//! 24      8     f64 frame spacing, s
//! 32      4·r·c f32 values, row-major
//! ```

use std::fs;
use std::path::Path;

use crate::{Error, Result};

pub const SPECTROGRAM_MAGIC: &[u8; 4] = b"HSPG";
pub const SPECTROGRAM_VERSION: u32 = 1;
const HEADER_LEN: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    /// Velocity covered by one Doppler row, m/s.
    pub doppler_bin_velocity: f64,
    /// Time between columns, s.
    pub frame_spacing: f64,
}

/// Min-max scaling to `[0, 1]`; a constant image maps to zeros.
/// Returns the scaled values with the (first) argmin and argmax.
pub(crate) fn min_max_normalize(values: &[f64]) -> (Vec<f64>, usize, usize) {
    let mut lo = 0;
    let mut hi = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[lo] {
            lo = i;
        }
        if *v > values[hi] {
            hi = i;
        }
    }
    let range = values[hi] - values[lo];
    let out = if range > 0.0 {
        values.iter().map(|v| (v - values[lo]) / range).collect()
    } else {
        vec![0.0; values.len()]
    };
    (out, lo, hi)
}

impl Spectrogram {
    /// Wraps already-normalized values.
    pub fn new(
        rows: usize,
        cols: usize,
        values: Vec<f64>,
        doppler_bin_velocity: f64,
        frame_spacing: f64,
    ) -> Result<Self> {
        if values.len() != rows * cols || rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {rows}x{cols} spectrogram",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("spectrogram".into()));
        }
        Ok(Self {
            rows,
            cols,
            values,
            doppler_bin_velocity,
            frame_spacing,
        })
    }

    /// Min-max normalizes raw values (e.g. dB magnitudes) into `[0, 1]`.
    pub fn normalized(
        rows: usize,
        cols: usize,
        raw: Vec<f64>,
        doppler_bin_velocity: f64,
        frame_spacing: f64,
    ) -> Result<Self> {
        if raw.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteStage("log magnitude"));
        }
        if raw.is_empty() {
            return Err(Error::Empty("spectrogram"));
        }
        let (values, _, _) = min_max_normalize(&raw);
        Self::new(rows, cols, values, doppler_bin_velocity, frame_spacing)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    /// Doppler velocity at the center of `row`; row `rows/2` is zero.
    pub fn row_velocity(&self, row: usize) -> f64 {
        (row as f64 - (self.rows / 2) as f64) * self.doppler_bin_velocity
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 4 * self.values.len());
        out.extend_from_slice(SPECTROGRAM_MAGIC);
        out.extend_from_slice(&SPECTROGRAM_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.rows as u32).to_le_bytes());
        out.extend_from_slice(&(self.cols as u32).to_le_bytes());
        out.extend_from_slice(&self.doppler_bin_velocity.to_le_bytes());
        out.extend_from_slice(&self.frame_spacing.to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&(*v as f32).to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], origin: &Path) -> Result<Self> {
        let bad = |m: &str| Error::format(origin, m.to_string());
        if bytes.len() < HEADER_LEN || &bytes[..4] != SPECTROGRAM_MAGIC {
            return Err(bad("not a spectrogram file (bad magic)"));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
        let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        let version = u32_at(4);
        if version != SPECTROGRAM_VERSION {
            return Err(bad(&format!("unsupported spectrogram version {version}")));
        }
        let rows = u32_at(8) as usize;
        let cols = u32_at(12) as usize;
        if bytes.len() != HEADER_LEN + 4 * rows * cols {
            return Err(bad("truncated or oversized spectrogram payload"));
        }
        let values = bytes[HEADER_LEN..]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
            .collect();
        Self::new(rows, cols, values, f64_at(16), f64_at(24)).map_err(|e| bad(&e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes, path)
    }

    /// One CSV line per Doppler row, top row = most negative velocity.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for r in 0..self.rows {
            let line: Vec<String> = (0..self.cols)
                .map(|c| format!("{:.6}", self.get(r, c)))
                .collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    /// Heatmap with positive Doppler at the top, each cell drawn as a
    /// `scale`×`scale` block.
    pub fn to_image(&self, colormap: Colormap, scale: u32) -> image::RgbImage {
        let scale = scale.max(1);
        let (w, h) = (self.cols as u32 * scale, self.rows as u32 * scale);
        image::RgbImage::from_fn(w, h, |x, y| {
            let col = (x / scale) as usize;
            let row = self.rows - 1 - (y / scale) as usize;
            image::Rgb(colormap.map(self.get(row, col)))
        })
    }

    pub fn save_png(&self, path: impl AsRef<Path>, colormap: Colormap, scale: u32) -> Result<()> {
        let path = path.as_ref();
        self.to_image(colormap, scale)
            .save_with_format(path, image::ImageFormat::Png)
            .map_err(|e| Error::format(path, e.to_string()))
    }
}

/// Color scale for PNG export.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Colormap {
    Gray,
    #[default]
    Jet,
}

impl Colormap {
    pub fn map(self, v: f64) -> [u8; 3] {
        let v = v.clamp(0.0, 1.0);
        match self {
            Colormap::Gray => {
                let g = (v * 255.0).round() as u8;
                [g, g, g]
            }
            Colormap::Jet => {
                let channel = |center: f64| {
                    ((1.5 - (4.0 * v - center).abs()).clamp(0.0, 1.0) * 255.0).round() as u8
                };
                [channel(3.0), channel(2.0), channel(1.0)]
            }
        }
    }
}

impl std::str::FromStr for Colormap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gray" | "grey" => Ok(Colormap::Gray),
            "jet" => Ok(Colormap::Jet),
            other => Err(Error::InvalidArgument(format!(
                "unknown colormap `{other}`"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp() -> Spectrogram {
        let raw = (0..64 * 32).map(|i| (i % 97) as f64 - 40.0).collect();
        Spectrogram::normalized(64, 32, raw, 0.078, 0.025).unwrap()
    }

    #[test]
    fn normalization_spans_unit_interval() {
        let s = ramp();
        let min = s.values().iter().cloned().fold(f64::INFINITY, f64::min);
        let max = s.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!((min, max), (0.0, 1.0));
    }

    #[test]
    fn constant_image_normalizes_to_zero() {
        let s = Spectrogram::normalized(4, 2, vec![-120.0; 8], 1.0, 1.0).unwrap();
        assert!(s.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn binary_round_trip_is_f32_exact() {
        let s = ramp();
        let back = Spectrogram::from_bytes(&s.to_bytes(), Path::new("mem")).unwrap();
        assert_eq!(back.shape(), (64, 32));
        assert_eq!(back.doppler_bin_velocity, 0.078);
        for (a, b) in s.values().iter().zip(back.values()) {
            assert_eq!(*a as f32, *b as f32);
        }
        assert_eq!(back.to_bytes(), s.to_bytes());
    }

    #[test]
    fn corrupt_files_are_rejected() {
        let mut bytes = ramp().to_bytes();
        assert!(Spectrogram::from_bytes(&bytes[..40], Path::new("x")).is_err());
        bytes[0] = b'X';
        assert!(Spectrogram::from_bytes(&bytes, Path::new("x")).is_err());
    }

    #[test]
    fn png_is_upscaled_and_flipped() {
        let s = ramp();
        let img = s.to_image(Colormap::Gray, 8);
        assert_eq!(img.dimensions(), (256, 512));
        let top_left = img.get_pixel(0, 0).0[0];
        assert_eq!(top_left, Colormap::Gray.map(s.get(63, 0))[0]);
    }

    #[test]
    fn csv_has_one_line_per_row() {
        let csv = ramp().to_csv();
        assert_eq!(csv.lines().count(), 64);
        assert_eq!(csv.lines().next().unwrap().split(',').count(), 32);
    }
}
