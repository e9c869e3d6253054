use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::radar_sim::{IfSignalCube, RadarParams};
use crate::{Complex, Error, Result};

/// Range profiles, `[chirp][range bin]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeProfileCube {
    chirps: usize,
    bins: usize,
    data: Vec<Complex>,
    /// Meters per range bin.
    pub bin_spacing: f64,
}

impl RangeProfileCube {
    pub fn from_data(
        chirps: usize,
        bins: usize,
        data: Vec<Complex>,
        bin_spacing: f64,
    ) -> Result<Self> {
        if data.len() != chirps * bins {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {chirps}x{bins} range profiles",
                data.len()
            )));
        }
        Ok(Self {
            chirps,
            bins,
            data,
            bin_spacing,
        })
    }

    pub fn chirps(&self) -> usize {
        self.chirps
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn data(&self) -> &[Complex] {
        &self.data
    }

    pub fn get(&self, chirp: usize, bin: usize) -> Complex {
        self.data[chirp * self.bins + bin]
    }

    pub fn row(&self, chirp: usize) -> &[Complex] {
        &self.data[chirp * self.bins..(chirp + 1) * self.bins]
    }

    pub fn column(&self, bin: usize) -> Vec<Complex> {
        (0..self.chirps).map(|m| self.get(m, bin)).collect()
    }

    /// Slow-time energy per range bin.
    pub fn bin_energy(&self) -> Vec<f64> {
        let mut energy = vec![0.0; self.bins];
        for m in 0..self.chirps {
            for (e, z) in energy.iter_mut().zip(self.row(m)) {
                *e += z.norm_sqr();
            }
        }
        energy
    }
}

/// Unnormalized DFT along fast time of every chirp; bin `k` corresponds to
/// beat frequency `k·fs/N` and range `k·bin_spacing`.
pub fn range_fft(cube: &IfSignalCube, params: &RadarParams) -> RangeProfileCube {
    let (chirps, n) = cube.dims();
    let fft = FftPlanner::new().plan_fft_forward(n);
    let mut data = cube.data().to_vec();
    if n > 0 {
        fft.process(&mut data);
    }
    RangeProfileCube {
        chirps,
        bins: n,
        data,
        bin_spacing: params.range_bin_spacing(),
    }
}

/// Removes static returns by subtracting each bin's slow-time mean.
pub fn clutter_suppress(cube: &RangeProfileCube) -> Result<RangeProfileCube> {
    if cube.chirps < 2 {
        return Err(Error::TooFewChirps(cube.chirps));
    }
    let mut mean = vec![Complex::new(0.0, 0.0); cube.bins];
    for m in 0..cube.chirps {
        for (acc, z) in mean.iter_mut().zip(cube.row(m)) {
            *acc += z;
        }
    }
    let scale = 1.0 / cube.chirps as f64;
    for z in &mut mean {
        *z *= scale;
    }
    let mut data = cube.data.clone();
    for row in data.chunks_exact_mut(cube.bins) {
        for (z, mu) in row.iter_mut().zip(&mean) {
            *z -= mu;
        }
    }
    Ok(RangeProfileCube {
        data,
        ..cube.clone()
    })
}

/// How the gesture's range bin is chosen.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RangeBinMode {
    /// Bin with the largest slow-time energy; lowest index wins ties.
    #[default]
    MaxEnergy,
    Fixed(usize),
}

/// Index of the largest value, first index on ties.
pub(crate) fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Picks one range bin and returns `(bin, slow-time samples)`.
pub fn select_range_bin(
    cube: &RangeProfileCube,
    mode: RangeBinMode,
) -> Result<(usize, Vec<Complex>)> {
    if cube.bins == 0 {
        return Err(Error::Empty("range profiles"));
    }
    let bin = match mode {
        RangeBinMode::MaxEnergy => argmax_first(&cube.bin_energy()),
        RangeBinMode::Fixed(k) if k < cube.bins => k,
        RangeBinMode::Fixed(k) => {
            return Err(Error::RangeBinOutOfBounds {
                bin: k,
                bins: cube.bins,
            })
        }
    };
    Ok((bin, cube.column(bin)))
}
