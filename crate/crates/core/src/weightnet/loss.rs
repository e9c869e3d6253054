//! Differentiable spectrogram loss.
//!
//! Range FFT, clutter removal and weighting are all linear, so for a fixed
//! range bin `b` the clutter-suppressed slow-time signal of the composite is
//! `y[n] = Σ_k w_k(frame(n))·P_k[n] − mean_n(...)`, where `P_k` is scatterer
//! `k`'s range-FFT value at bin `b`. Training keeps only the `P_k`
//! ([`ProjectedSignals`]) and differentiates
//! `weights → y → STFT → dB → min-max → 1 − SSIM` in closed form.

use std::f64::consts::TAU;

use rustfft::FftPlanner;

use super::features::FeatureTensor;
use super::network::WeightNetParams;
use crate::dsp::{
    doppler_row, hamming, log_magnitude, log_magnitude_slope, min_max_normalize, process_cube,
    standardize_length, standardize_span, stft_complex, RangeBinMode, Spectrogram, StftConfig,
};
use crate::metrics::{ssim, ssim_values_with_grad, SsimConfig};
use crate::radar_sim::{compose, FrameWeights, IfSignalCube, RadarParams};
use crate::{Complex, Error, Result};

/// Per-scatterer slow-time signals at one range bin, `[scatterer][chirp]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedSignals {
    chirps: usize,
    chirps_per_frame: usize,
    bin: usize,
    data: Vec<Complex>,
}

/// Range-FFT coefficients of bin `bin` for an `n`-point transform.
pub(crate) fn bin_twiddles(bin: usize, n: usize) -> Vec<Complex> {
    (0..n)
        .map(|t| Complex::from_polar(1.0, -TAU * ((bin * t) % n) as f64 / n as f64))
        .collect()
}

impl ProjectedSignals {
    pub fn new(chirps: usize, chirps_per_frame: usize, bin: usize) -> Result<Self> {
        if chirps == 0 || chirps_per_frame == 0 {
            return Err(Error::Empty("projected signals"));
        }
        Ok(Self {
            chirps,
            chirps_per_frame,
            bin,
            data: Vec::new(),
        })
    }

    /// Builds signals from raw per-scatterer rows (already at one bin).
    pub fn from_rows(chirps_per_frame: usize, bin: usize, rows: Vec<Vec<Complex>>) -> Result<Self> {
        let chirps = rows.first().map_or(0, Vec::len);
        let mut s = Self::new(chirps, chirps_per_frame, bin)?;
        for row in rows {
            s.push_row(row)?;
        }
        Ok(s)
    }

    pub fn push_row(&mut self, row: Vec<Complex>) -> Result<()> {
        if row.len() != self.chirps {
            return Err(Error::DimensionMismatch(format!(
                "row of {} chirps for signals of {}",
                row.len(),
                self.chirps
            )));
        }
        if row.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite("projected signal".into()));
        }
        self.data.extend(row);
        Ok(())
    }

    /// Appends one scatterer by evaluating its range FFT at the stored bin.
    pub fn push_cube(&mut self, cube: &IfSignalCube) -> Result<()> {
        let tw = bin_twiddles(self.bin, cube.samples());
        let row = (0..cube.chirps())
            .map(|m| cube.row(m).iter().zip(&tw).map(|(a, b)| a * b).sum())
            .collect();
        self.push_row(row)
    }

    /// Projects in-memory cubes. The bin is picked on the unit-weight
    /// composite exactly as the inference pipeline would.
    pub fn from_cubes(
        cubes: &[IfSignalCube],
        params: &RadarParams,
        stft: &StftConfig,
        mode: RangeBinMode,
    ) -> Result<Self> {
        let first = cubes.first().ok_or(Error::Empty("scatterer cubes"))?;
        let cpf = params.chirps_per_frame;
        let frames = first.chirps().div_ceil(cpf);
        let composite = compose(cubes, &FrameWeights::ones(cubes.len(), frames), cpf)?;
        let (_, bin) = process_cube(&composite, params, stft, mode)?;
        let mut s = Self::new(first.chirps(), cpf, bin)?;
        for cube in cubes {
            s.push_cube(cube)?;
        }
        Ok(s)
    }

    pub fn scatterers(&self) -> usize {
        self.data.len() / self.chirps
    }

    pub fn chirps(&self) -> usize {
        self.chirps
    }

    pub fn chirps_per_frame(&self) -> usize {
        self.chirps_per_frame
    }

    pub fn frames(&self) -> usize {
        self.chirps.div_ceil(self.chirps_per_frame)
    }

    pub fn bin(&self) -> usize {
        self.bin
    }

    pub fn row(&self, scatterer: usize) -> &[Complex] {
        &self.data[scatterer * self.chirps..(scatterer + 1) * self.chirps]
    }

    /// Weighted, clutter-suppressed slow-time signal.
    pub fn compose(&self, weights: &FrameWeights) -> Result<Vec<Complex>> {
        if weights.scatterers() != self.scatterers() || weights.frames() != self.frames() {
            return Err(Error::DimensionMismatch(format!(
                "weights {}x{} for signals {}x{}",
                weights.scatterers(),
                weights.frames(),
                self.scatterers(),
                self.frames()
            )));
        }
        let mut y = vec![Complex::new(0.0, 0.0); self.chirps];
        for k in 0..self.scatterers() {
            for (n, (acc, p)) in y.iter_mut().zip(self.row(k)).enumerate() {
                *acc += p * weights.get(k, n / self.chirps_per_frame);
            }
        }
        let mean = y.iter().sum::<Complex>() / self.chirps as f64;
        for z in &mut y {
            *z -= mean;
        }
        Ok(y)
    }
}

/// One training example: raw features, projected signals and the target.
#[derive(Debug, Clone)]
pub struct TrainingItem {
    pub id: String,
    pub features: FeatureTensor,
    pub signals: ProjectedSignals,
    pub reference: Spectrogram,
}

impl TrainingItem {
    pub fn new(
        id: impl Into<String>,
        features: FeatureTensor,
        signals: ProjectedSignals,
        reference: Spectrogram,
    ) -> Result<Self> {
        if features.scatterers() != signals.scatterers() || features.frames() != signals.frames() {
            return Err(Error::DimensionMismatch(format!(
                "features {}x{} vs signals {}x{}",
                features.scatterers(),
                features.frames(),
                signals.scatterers(),
                signals.frames()
            )));
        }
        Ok(Self {
            id: id.into(),
            features,
            signals,
            reference,
        })
    }
}

/// Loss value, SSIM and (optionally) the parameter gradient.
#[derive(Debug, Clone)]
pub struct LossEval {
    pub loss: f64,
    pub ssim: f64,
    pub grad: Vec<f64>,
}

/// `scale · (1 − SSIM)` of the synthesized spectrogram against the reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Objective {
    pub stft: StftConfig,
    pub ssim: SsimConfig,
    pub scale: f64,
}

impl Default for Objective {
    fn default() -> Self {
        Self {
            stft: StftConfig::default(),
            ssim: SsimConfig::default(),
            scale: 1.0,
        }
    }
}

fn check_finite(values: impl IntoIterator<Item = f64>, stage: &'static str) -> Result<()> {
    if values.into_iter().all(f64::is_finite) {
        Ok(())
    } else {
        Err(Error::NonFiniteStage(stage))
    }
}

impl Objective {
    /// Normalized spectrogram values of `signals` under `weights`.
    pub fn image(&self, signals: &ProjectedSignals, weights: &FrameWeights) -> Result<Vec<f64>> {
        Ok(self.image_parts(signals, weights)?.2)
    }

    /// (padded slow-time, STFT, normalized image, argmin, argmax, dB values)
    #[allow(clippy::type_complexity)]
    fn image_parts(
        &self,
        signals: &ProjectedSignals,
        weights: &FrameWeights,
    ) -> Result<(Vec<Complex>, Vec<Complex>, Vec<f64>, usize, usize, Vec<f64>)> {
        self.stft.validate()?;
        let y = signals.compose(weights)?;
        if y.len() < self.stft.window_len {
            return Err(Error::InvalidArgument(format!(
                "slow-time sequence of {} samples is shorter than the window",
                y.len()
            )));
        }
        let seq = standardize_length(&y, self.stft.target_len);
        let spec = stft_complex(&seq, &self.stft);
        let db = log_magnitude(&spec, self.stft.log_floor);
        check_finite(db.iter().copied(), "log magnitude")?;
        let (z, lo, hi) = min_max_normalize(&db);
        Ok((seq, spec, z, lo, hi, db))
    }

    /// SSIM of the item's synthesized image under explicit weights.
    pub fn ssim_with_weights(&self, item: &TrainingItem, weights: &FrameWeights) -> Result<f64> {
        let z = self.image(&item.signals, weights)?;
        Ok(ssim_values_with_grad(&z, item.reference.values(), &self.ssim, false)?.0)
    }

    pub fn loss(&self, params: &WeightNetParams, item: &TrainingItem) -> Result<f64> {
        Ok(self.evaluate(params, item, false)?.loss)
    }

    pub fn loss_and_grad(&self, params: &WeightNetParams, item: &TrainingItem) -> Result<LossEval> {
        self.evaluate(params, item, true)
    }

    /// Mean loss (and gradient) over a batch.
    pub fn batch(
        &self,
        params: &WeightNetParams,
        items: &[&TrainingItem],
        grad: bool,
    ) -> Result<LossEval> {
        if items.is_empty() {
            return Err(Error::Empty("batch"));
        }
        let mut total = LossEval {
            loss: 0.0,
            ssim: 0.0,
            grad: if grad {
                vec![0.0; params.len()]
            } else {
                Vec::new()
            },
        };
        for item in items {
            let e = self.evaluate(params, item, grad)?;
            total.loss += e.loss;
            total.ssim += e.ssim;
            for (a, b) in total.grad.iter_mut().zip(&e.grad) {
                *a += b;
            }
        }
        let n = items.len() as f64;
        total.loss /= n;
        total.ssim /= n;
        for g in &mut total.grad {
            *g /= n;
        }
        Ok(total)
    }

    fn evaluate(
        &self,
        params: &WeightNetParams,
        item: &TrainingItem,
        grad: bool,
    ) -> Result<LossEval> {
        let x = params.stats.apply(&item.features, &params.mask);
        let cache = params.forward_cached(&x)?;
        let signals = &item.signals;
        let (_, spec, z, lo, hi, db) = self.image_parts(signals, &cache.weights)?;
        let (s, g_ssim) = ssim_values_with_grad(&z, item.reference.values(), &self.ssim, grad)?;
        let loss = self.scale * (1.0 - s);
        if !loss.is_finite() {
            return Err(Error::NonFiniteStage("ssim"));
        }
        if !grad {
            return Ok(LossEval {
                loss,
                ssim: s,
                grad: Vec::new(),
            });
        }

        // min-max normalization; the extremes receive the straight-through terms
        let g_z: Vec<f64> = g_ssim.iter().map(|g| -self.scale * g).collect();
        let range = db[hi] - db[lo];
        let mut g_db = vec![0.0; db.len()];
        if range > 0.0 {
            let (mut to_lo, mut to_hi) = (0.0, 0.0);
            for i in 0..db.len() {
                g_db[i] = g_z[i] / range;
                to_lo += g_z[i] * (z[i] - 1.0) / range;
                to_hi -= g_z[i] * z[i] / range;
            }
            g_db[lo] += to_lo;
            g_db[hi] += to_hi;
        }

        // dB magnitude -> complex STFT cells
        let cfg = &self.stft;
        let g_spec: Vec<Complex> = spec
            .iter()
            .zip(&g_db)
            .map(|(x, g)| {
                let m = x.norm();
                if m == 0.0 {
                    Complex::new(0.0, 0.0)
                } else {
                    x * (g * log_magnitude_slope(m, cfg.log_floor) / m)
                }
            })
            .collect();

        // STFT adjoint: windowed inverse DFT of every column
        let w = cfg.window_len;
        let cols = cfg.frames();
        let window = hamming(w);
        let ifft = FftPlanner::new().plan_fft_inverse(w);
        let mut g_seq = vec![Complex::new(0.0, 0.0); cfg.target_len];
        let mut buf = vec![Complex::new(0.0, 0.0); w];
        for t in 0..cols {
            for (k, b) in buf.iter_mut().enumerate() {
                *b = g_spec[doppler_row(k, w) * cols + t];
            }
            ifft.process(&mut buf);
            for n in 0..w {
                g_seq[t * cfg.hop + n] += buf[n] * window[n];
            }
        }

        // length standardization, then clutter removal (a centering projection)
        let (src, dst, count) = standardize_span(signals.chirps(), cfg.target_len);
        let mut g_y = vec![Complex::new(0.0, 0.0); signals.chirps()];
        g_y[src..src + count].copy_from_slice(&g_seq[dst..dst + count]);
        let mean = g_y.iter().sum::<Complex>() / g_y.len() as f64;
        for g in &mut g_y {
            *g -= mean;
        }
        check_finite(
            g_y.iter().flat_map(|z| [z.re, z.im]),
            "spectrogram backward",
        )?;

        // weighting: dL/dw_k(f) = Σ_{n in f} Re(conj(g_y[n])·P_k[n])
        let cpf = signals.chirps_per_frame();
        let mut g_w = FrameWeights::filled(signals.scatterers(), signals.frames(), 0.0);
        for k in 0..signals.scatterers() {
            for (n, (g, p)) in g_y.iter().zip(signals.row(k)).enumerate() {
                let f = n / cpf;
                g_w.set(k, f, g_w.get(k, f) + (g.conj() * p).re);
            }
        }
        let grad = params.backward(&cache, &g_w);
        check_finite(grad.iter().copied(), "network backward")?;
        Ok(LossEval {
            loss,
            ssim: s,
            grad,
        })
    }
}

/// Reference loss through the full inference chain: network weights,
/// composition of the actual IF cubes, range FFT, clutter removal, range-bin
/// selection and STFT, then `1 − SSIM`.
pub fn pipeline_loss(
    params: &WeightNetParams,
    features: &FeatureTensor,
    cubes: &[IfSignalCube],
    reference: &Spectrogram,
    radar: &RadarParams,
    objective: &Objective,
    mode: RangeBinMode,
) -> Result<f64> {
    let weights = params.forward(features)?;
    let composite = compose(cubes, &weights, radar.chirps_per_frame)?;
    let (image, _) = process_cube(&composite, radar, &objective.stft, mode)?;
    Ok(objective.scale * (1.0 - ssim(&image, reference, &objective.ssim)?))
}

#[cfg(test)]
mod tests {
    use super::super::network::UNIT_WEIGHT_BIAS;
    use super::*;
    use crate::dsp::{range_fft, RangeBinMode};
    use crate::radar_sim::{Provenance, RadarConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_signals(
        rng: &mut ChaCha8Rng,
        ns: usize,
        chirps: usize,
        cpf: usize,
    ) -> ProjectedSignals {
        let rows = (0..ns)
            .map(|k| {
                let f = rng.gen_range(-0.4..0.4);
                let a = rng.gen_range(0.5..2.0) * (k + 1) as f64;
                (0..chirps)
                    .map(|n| {
                        Complex::from_polar(a, TAU * f * n as f64)
                            + Complex::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3))
                    })
                    .collect()
            })
            .collect();
        ProjectedSignals::from_rows(cpf, 3, rows).unwrap()
    }

    fn random_features(rng: &mut ChaCha8Rng, ns: usize, nf: usize) -> FeatureTensor {
        FeatureTensor::from_data(
            ns,
            nf,
            (0..ns * nf * 5).map(|_| rng.gen_range(-1.5..1.5)).collect(),
        )
        .unwrap()
    }

    fn reference(
        objective: &Objective,
        signals: &ProjectedSignals,
        weights: &FrameWeights,
    ) -> Spectrogram {
        let z = objective.image(signals, weights).unwrap();
        Spectrogram::new(
            objective.stft.window_len,
            objective.stft.frames(),
            z,
            1.0,
            1.0,
        )
        .unwrap()
    }

    fn unit_params(hidden: usize) -> WeightNetParams {
        let mut p = WeightNetParams::zeros(hidden).unwrap();
        p.tensor_mut("fc3.b").unwrap()[0] = UNIT_WEIGHT_BIAS;
        p
    }

    #[test]
    fn self_reconstruction_has_zero_loss_and_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let obj = Objective::default();
        let signals = random_signals(&mut rng, 3, 256, 64);
        let item = TrainingItem::new(
            "self",
            random_features(&mut rng, 3, 4),
            signals.clone(),
            reference(&obj, &signals, &FrameWeights::ones(3, 4)),
        )
        .unwrap();
        let e = obj.loss_and_grad(&unit_params(4), &item).unwrap();
        assert!(e.loss.abs() < 1e-12, "{}", e.loss);
        let norm = e.grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        assert!(norm < 1e-8, "{norm}");
    }

    #[test]
    fn loss_range_and_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let signals = random_signals(&mut rng, 2, 128, 32);
        let other = random_signals(&mut rng, 2, 128, 32);
        let obj = Objective::default();
        let item = TrainingItem::new(
            "x",
            random_features(&mut rng, 2, 4),
            signals,
            reference(&obj, &other, &FrameWeights::ones(2, 4)),
        )
        .unwrap();
        let p = WeightNetParams::init(4, 3).unwrap();
        let base = obj.loss_and_grad(&p, &item).unwrap();
        assert!((0.0..2.0).contains(&base.loss));
        let scaled = Objective { scale: 3.5, ..obj }
            .loss_and_grad(&p, &item)
            .unwrap();
        assert!((scaled.loss - 3.5 * base.loss).abs() < 1e-12);
        for (a, b) in scaled.grad.iter().zip(&base.grad) {
            assert!((a - 3.5 * b).abs() <= 1e-12 * b.abs().max(1e-12));
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        // 64 slow-time samples give a single 64-point STFT column
        let obj = Objective {
            stft: StftConfig {
                target_len: 64,
                ..StftConfig::default()
            },
            ..Objective::default()
        };
        let signals = random_signals(&mut rng, 2, 64, 16);
        let hidden =
            FrameWeights::from_rows(vec![vec![0.2, 0.4, 0.3, 0.1], vec![3.0, 2.0, 2.5, 1.5]])
                .unwrap();
        let target = reference(&obj, &signals, &hidden);
        let item =
            TrainingItem::new("fd", random_features(&mut rng, 2, 4), signals, target).unwrap();
        // a mid-training point: the output layer is no longer zero
        let mut p = WeightNetParams::init(2, 11).unwrap();
        p.tensor_mut("fc3.w").unwrap().copy_from_slice(&[0.8]);
        for v in p.as_mut_slice() {
            *v *= 3.0;
        }
        let g = obj.loss_and_grad(&p, &item).unwrap().grad;
        let (mut checked, mut ok) = (0, 0);
        for i in 0..p.len() {
            if g[i].abs() <= 1e-8 {
                continue;
            }
            let mut a = p.clone();
            let mut b = p.clone();
            a.as_mut_slice()[i] += 1e-5;
            b.as_mut_slice()[i] -= 1e-5;
            let fd = (obj.loss(&a, &item).unwrap() - obj.loss(&b, &item).unwrap()) / 2e-5;
            checked += 1;
            if (fd - g[i]).abs() <= 1e-4 * g[i].abs() {
                ok += 1;
            }
        }
        assert!(checked > 20);
        assert!(ok as f64 >= 0.95 * checked as f64, "{ok}/{checked}");
    }

    #[test]
    fn projection_matches_range_fft_column() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = RadarParams::from_config(&RadarConfig {
            samples_per_chirp: 64,
            sampling_rate_ksps: 3125.0,
            chirps_per_frame: 16,
            ..Default::default()
        })
        .unwrap();
        let cubes: Vec<IfSignalCube> = (0..3)
            .map(|k| {
                let data = (0..64 * 64)
                    .map(|_| Complex::new(rng.gen(), rng.gen()))
                    .collect();
                IfSignalCube::from_data(64, 64, data, Provenance::Scatterer(k)).unwrap()
            })
            .collect();
        let stft = StftConfig::default();
        let s = ProjectedSignals::from_cubes(&cubes, &p, &stft, RangeBinMode::Fixed(5)).unwrap();
        assert_eq!(s.bin(), 5);
        for (k, cube) in cubes.iter().enumerate() {
            let col = range_fft(cube, &p).column(5);
            for (a, b) in s.row(k).iter().zip(&col) {
                assert!((a - b).norm() < 1e-9 * b.norm().max(1.0));
            }
        }
    }

    #[test]
    fn projected_path_agrees_with_full_pipeline() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = RadarParams::from_config(&RadarConfig {
            samples_per_chirp: 64,
            sampling_rate_ksps: 3125.0,
            chirps_per_frame: 16,
            ..Default::default()
        })
        .unwrap();
        let cubes: Vec<IfSignalCube> = (0..2)
            .map(|k| {
                let data = (0..128 * 64)
                    .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                IfSignalCube::from_data(128, 64, data, Provenance::Scatterer(k)).unwrap()
            })
            .collect();
        let obj = Objective::default();
        let mode = RangeBinMode::Fixed(9);
        let signals = ProjectedSignals::from_cubes(&cubes, &p, &obj.stft, mode).unwrap();
        let feats = random_features(&mut rng, 2, 8);
        let target = reference(
            &obj,
            &random_signals(&mut rng, 2, 128, 16),
            &FrameWeights::ones(2, 8),
        );
        let item = TrainingItem::new("a", feats.clone(), signals, target.clone()).unwrap();
        let params = WeightNetParams::init(4, 1).unwrap();
        let fast = obj.loss(&params, &item).unwrap();
        let full = pipeline_loss(&params, &feats, &cubes, &target, &p, &obj, mode).unwrap();
        assert!((fast - full).abs() < 1e-9, "{fast} vs {full}");
    }
}
