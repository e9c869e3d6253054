use std::f64::consts::TAU;

use super::params::RadarParams;
use super::rcs::attenuated_amplitude;
use crate::hand_model::ScattererTrack;
use crate::{Complex, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Scatterer(usize),
    Composite,
}

/// Dechirped IF samples, `[chirp][fast-time sample]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct IfSignalCube {
    chirps: usize,
    samples: usize,
    data: Vec<Complex>,
    pub provenance: Provenance,
}

impl IfSignalCube {
    pub fn zeros(chirps: usize, samples: usize, provenance: Provenance) -> Self {
        Self {
            chirps,
            samples,
            data: vec![Complex::new(0.0, 0.0); chirps * samples],
            provenance,
        }
    }

    pub fn from_data(
        chirps: usize,
        samples: usize,
        data: Vec<Complex>,
        provenance: Provenance,
    ) -> Result<Self> {
        if data.len() != chirps * samples {
            return Err(Error::DimensionMismatch(format!(
                "{} samples for a {chirps}x{samples} cube",
                data.len()
            )));
        }
        if data.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite("IF cube".into()));
        }
        Ok(Self {
            chirps,
            samples,
            data,
            provenance,
        })
    }

    /// Slow-time length (number of chirps).
    pub fn chirps(&self) -> usize {
        self.chirps
    }

    /// Fast-time length (samples per chirp).
    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.chirps, self.samples)
    }

    pub fn data(&self) -> &[Complex] {
        &self.data
    }

    pub fn row(&self, chirp: usize) -> &[Complex] {
        &self.data[chirp * self.samples..(chirp + 1) * self.samples]
    }

    pub fn row_mut(&mut self, chirp: usize) -> &mut [Complex] {
        &mut self.data[chirp * self.samples..(chirp + 1) * self.samples]
    }

    pub fn get(&self, chirp: usize, sample: usize) -> Complex {
        self.data[chirp * self.samples + sample]
    }

    pub fn conj(&self) -> Self {
        Self {
            data: self.data.iter().map(|z| z.conj()).collect(),
            ..self.clone()
        }
    }
}

/// Knobs of the physical simulation.
#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct SimOptions {
    /// Scale every amplitude by the scatterer's visible vertex fraction.
    pub strict_occlusion: bool,
}

/// Writes one chirp of dechirped samples for a point scatterer at `distance`
/// with received amplitude `amplitude` into `out`.
///
/// With τ = 2D/c the IF sample at fast time t is
/// `amplitude · exp(j·2π(f0·τ + S·τ·t − S·τ²/2))`.
pub fn fill_chirp(params: &RadarParams, distance: f64, amplitude: f64, out: &mut [Complex]) {
    let tau = 2.0 * distance / params.wave_speed;
    let base = params.start_frequency * tau - 0.5 * params.slope * tau * tau;
    let base = base - base.floor();
    let step = params.slope * tau / params.sample_rate;
    for (i, z) in out.iter_mut().enumerate() {
        *z = Complex::from_polar(amplitude, TAU * (base + step * i as f64));
    }
}

/// Amplitude of chirp `m` of a track, including the transmit amplitude.
pub fn chirp_amplitude(
    track: &ScattererTrack,
    params: &RadarParams,
    opts: SimOptions,
    m: usize,
) -> Result<f64> {
    let mut a = params.amplitude * attenuated_amplitude(params, track.rcs[m], track.distance[m])?;
    if opts.strict_occlusion {
        a *= track.visible_vertices[m] as f64 / track.vertex_count.max(1) as f64;
    }
    Ok(a)
}

/// Per-scatterer IF cube with one row per chirp of the track.
pub fn synthesize_if(track: &ScattererTrack, params: &RadarParams) -> Result<IfSignalCube> {
    synthesize_if_with(track, params, SimOptions::default(), 0)
}

pub fn synthesize_if_with(
    track: &ScattererTrack,
    params: &RadarParams,
    opts: SimOptions,
    index: usize,
) -> Result<IfSignalCube> {
    let chirps = track.len();
    track.check_len(chirps)?;
    if chirps == 0 {
        return Err(Error::Empty("scatterer track"));
    }
    let mut cube = IfSignalCube::zeros(
        chirps,
        params.samples_per_chirp,
        Provenance::Scatterer(index),
    );
    for m in 0..chirps {
        let amp = chirp_amplitude(track, params, opts, m)?;
        fill_chirp(params, track.distance[m], amp, cube.row_mut(m));
    }
    Ok(cube)
}

/// Non-negative weights, one per scatterer per radar frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameWeights {
    scatterers: usize,
    frames: usize,
    data: Vec<f64>,
}

impl FrameWeights {
    pub fn ones(scatterers: usize, frames: usize) -> Self {
        Self::filled(scatterers, frames, 1.0)
    }

    pub fn filled(scatterers: usize, frames: usize, value: f64) -> Self {
        Self {
            scatterers,
            frames,
            data: vec![value; scatterers * frames],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let scatterers = rows.len();
        let frames = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != frames) {
            return Err(Error::DimensionMismatch("ragged weight rows".into()));
        }
        Ok(Self {
            scatterers,
            frames,
            data: rows.concat(),
        })
    }

    pub fn scatterers(&self) -> usize {
        self.scatterers
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn get(&self, scatterer: usize, frame: usize) -> f64 {
        self.data[scatterer * self.frames + frame]
    }

    pub fn set(&mut self, scatterer: usize, frame: usize, value: f64) {
        self.data[scatterer * self.frames + frame] = value;
    }

    pub fn row(&self, scatterer: usize) -> &[f64] {
        &self.data[scatterer * self.frames..(scatterer + 1) * self.frames]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn check_non_negative(&self) -> Result<()> {
        for k in 0..self.scatterers {
            for f in 0..self.frames {
                let value = self.get(k, f);
                if !(value >= 0.0 && value.is_finite()) {
                    return Err(Error::NegativeWeight {
                        scatterer: k,
                        frame: f,
                        value,
                    });
                }
            }
        }
        Ok(())
    }
}

impl std::ops::Add for &FrameWeights {
    type Output = FrameWeights;

    fn add(self, rhs: Self) -> FrameWeights {
        assert_eq!((self.scatterers, self.frames), (rhs.scatterers, rhs.frames));
        FrameWeights {
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
            ..self.clone()
        }
    }
}

/// `acc[m][t] += w(frame(m)) · cube[m][t]` with `frame(m) = m / chirps_per_frame`.
pub fn accumulate_weighted(
    acc: &mut IfSignalCube,
    cube: &IfSignalCube,
    weight_row: &[f64],
    chirps_per_frame: usize,
) -> Result<()> {
    if acc.dims() != cube.dims() {
        return Err(Error::DimensionMismatch(format!(
            "cube {:?} vs accumulator {:?}",
            cube.dims(),
            acc.dims()
        )));
    }
    let frames = cube.chirps().div_ceil(chirps_per_frame);
    if weight_row.len() != frames {
        return Err(Error::DimensionMismatch(format!(
            "{} weight frames for {} radar frames",
            weight_row.len(),
            frames
        )));
    }
    for m in 0..cube.chirps() {
        let w = weight_row[m / chirps_per_frame];
        if w == 0.0 {
            continue;
        }
        for (a, z) in acc.row_mut(m).iter_mut().zip(cube.row(m)) {
            *a += z * w;
        }
    }
    Ok(())
}

/// Weighted sum of per-scatterer cubes. Weights are constant within a radar
/// frame; unit weights give the plain physical sum.
pub fn compose(
    cubes: &[IfSignalCube],
    weights: &FrameWeights,
    chirps_per_frame: usize,
) -> Result<IfSignalCube> {
    let first = cubes.first().ok_or(Error::Empty("scatterer cubes"))?;
    if weights.scatterers() != cubes.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} weight rows for {} cubes",
            weights.scatterers(),
            cubes.len()
        )));
    }
    weights.check_non_negative()?;
    let (chirps, samples) = first.dims();
    let mut acc = IfSignalCube::zeros(chirps, samples, Provenance::Composite);
    for (k, cube) in cubes.iter().enumerate() {
        accumulate_weighted(&mut acc, cube, weights.row(k), chirps_per_frame)?;
    }
    Ok(acc)
}
