//! The weighting network: one LSTM layer over radar frames followed by three
//! dense layers and a softplus output, shared by every scatterer.
//!
//! Parameter file layout (little endian):
//!
//! ```text
//! "RWNT"  u32 version  u32 tensor count
//! per tensor: u32 name length, UTF-8 name, u32 ndim, u32 dims[ndim],
//!             f32 values (row-major)
//! ```

use std::fs;
use std::ops::Range;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::features::{FeatureMask, FeatureStats, FeatureTensor, FEATURE_COUNT};
use crate::radar_sim::FrameWeights;
use crate::{Error, Result};

pub const PARAMS_MAGIC: &[u8; 4] = b"RWNT";
pub const PARAMS_VERSION: u32 = 1;
pub const DEFAULT_HIDDEN: usize = 32;

/// softplus⁻¹(1) = ln(e − 1); an output bias that starts every weight at 1.
pub const UNIT_WEIGHT_BIAS: f64 = 0.541_324_854_612_918_1;

pub(crate) fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Offsets of the named tensors inside the flat parameter vector.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Layout {
    input: usize,
    hidden: usize,
    half: usize,
    w_ih: Range<usize>,
    w_hh: Range<usize>,
    b: Range<usize>,
    w1: Range<usize>,
    b1: Range<usize>,
    w2: Range<usize>,
    b2: Range<usize>,
    w3: Range<usize>,
    b3: Range<usize>,
}

impl Layout {
    fn new(input: usize, hidden: usize) -> Self {
        let half = (hidden / 2).max(1);
        let mut at = 0;
        let mut take = |n: usize| {
            let r = at..at + n;
            at += n;
            r
        };
        Self {
            input,
            hidden,
            half,
            w_ih: take(4 * hidden * input),
            w_hh: take(4 * hidden * hidden),
            b: take(4 * hidden),
            w1: take(hidden * hidden),
            b1: take(hidden),
            w2: take(half * hidden),
            b2: take(half),
            w3: take(half),
            b3: take(1),
        }
    }

    fn len(&self) -> usize {
        self.b3.end
    }

    /// (name, range, shape) of every trainable tensor, in file order.
    fn tensors(&self) -> [(&'static str, Range<usize>, Vec<usize>); 9] {
        let (i, h, q) = (self.input, self.hidden, self.half);
        [
            ("lstm.w_ih", self.w_ih.clone(), vec![4 * h, i]),
            ("lstm.w_hh", self.w_hh.clone(), vec![4 * h, h]),
            ("lstm.b", self.b.clone(), vec![4 * h]),
            ("fc1.w", self.w1.clone(), vec![h, h]),
            ("fc1.b", self.b1.clone(), vec![h]),
            ("fc2.w", self.w2.clone(), vec![q, h]),
            ("fc2.b", self.b2.clone(), vec![q]),
            ("fc3.w", self.w3.clone(), vec![1, q]),
            ("fc3.b", self.b3.clone(), vec![1]),
        ]
    }
}

/// Trainable parameters plus the frozen feature standardization.
///
/// Gate order inside the LSTM matrices is input, forget, cell, output.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightNetParams {
    layout: Layout,
    theta: Vec<f64>,
    pub stats: FeatureStats,
    pub mask: FeatureMask,
}

impl WeightNetParams {
    /// All-zero parameters: every output is softplus(0) = ln 2.
    pub fn zeros(hidden: usize) -> Result<Self> {
        Self::zeros_with_input(FEATURE_COUNT, hidden)
    }

    fn zeros_with_input(input: usize, hidden: usize) -> Result<Self> {
        if hidden == 0 || input == 0 {
            return Err(Error::InvalidArgument(
                "layer sizes must be positive".into(),
            ));
        }
        let layout = Layout::new(input, hidden);
        Ok(Self {
            theta: vec![0.0; layout.len()],
            layout,
            stats: FeatureStats::default(),
            mask: FeatureMask::default(),
        })
    }

    /// Uniform `±1/√fan_in` initialization from a fixed seed, except for the
    /// output layer: its weights start at zero and its bias at softplus⁻¹(1),
    /// so an untrained network outputs exactly the unit weights of the pure
    /// physics model. Gradients still reach every layer after the first step.
    pub fn init(hidden: usize, seed: u64) -> Result<Self> {
        let mut p = Self::zeros(hidden)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = p.layout.clone();
        let fan = |n: usize| 1.0 / (n as f64).sqrt();
        let fills = [
            (l.w_ih.clone(), fan(l.input)),
            (l.w_hh.clone(), fan(l.hidden)),
            (l.b.clone(), fan(l.hidden)),
            (l.w1.clone(), fan(l.hidden)),
            (l.b1.clone(), fan(l.hidden)),
            (l.w2.clone(), fan(l.hidden)),
            (l.b2.clone(), fan(l.hidden)),
        ];
        for (range, bound) in fills {
            for v in &mut p.theta[range] {
                *v = rng.gen_range(-bound..bound);
            }
        }
        p.theta[l.b3.start] = UNIT_WEIGHT_BIAS;
        Ok(p)
    }

    pub fn hidden(&self) -> usize {
        self.layout.hidden
    }

    pub fn input(&self) -> usize {
        self.layout.input
    }

    /// Number of trainable scalars.
    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.theta
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.theta
    }

    /// Names of the trainable tensors in storage order.
    pub fn tensor_names(&self) -> Vec<&'static str> {
        self.layout.tensors().iter().map(|t| t.0).collect()
    }

    /// A trainable tensor by name, flattened row-major.
    pub fn tensor(&self, name: &str) -> Option<&[f64]> {
        let (_, r, _) = self.layout.tensors().into_iter().find(|t| t.0 == name)?;
        Some(&self.theta[r])
    }

    pub fn tensor_mut(&mut self, name: &str) -> Option<&mut [f64]> {
        let (_, r, _) = self.layout.tensors().into_iter().find(|t| t.0 == name)?;
        Some(&mut self.theta[r])
    }

    pub fn is_finite(&self) -> bool {
        self.theta.iter().all(|v| v.is_finite())
    }

    /// Per-scatterer, per-frame weights for raw features. Standardization
    /// and the feature mask stored in the parameters are applied first.
    pub fn forward(&self, raw: &FeatureTensor) -> Result<FrameWeights> {
        Ok(self
            .forward_cached(&self.stats.apply(raw, &self.mask))?
            .weights)
    }

    pub(crate) fn forward_cached(&self, x: &FeatureTensor) -> Result<ForwardCache> {
        if self.layout.input != FEATURE_COUNT {
            return Err(Error::DimensionMismatch(format!(
                "network expects {} features, tensor has {FEATURE_COUNT}",
                self.layout.input
            )));
        }
        if x.scatterers() == 0 || x.frames() == 0 {
            return Err(Error::Empty("feature tensor"));
        }
        let l = &self.layout;
        let (h, q) = (l.hidden, l.half);
        let th = &self.theta;
        let (w_ih, w_hh, b) = (&th[l.w_ih.clone()], &th[l.w_hh.clone()], &th[l.b.clone()]);
        let (w1, b1, w2, b2, w3, b3) = (
            &th[l.w1.clone()],
            &th[l.b1.clone()],
            &th[l.w2.clone()],
            &th[l.b2.clone()],
            &th[l.w3.clone()],
            th[l.b3.start],
        );
        let (ns, nf) = (x.scatterers(), x.frames());
        let mut cache = ForwardCache {
            scatterers: ns,
            frames: nf,
            hidden: h,
            half: q,
            x: x.clone(),
            gates: vec![0.0; ns * nf * 4 * h],
            cell: vec![0.0; ns * nf * h],
            hid: vec![0.0; ns * nf * h],
            a1: vec![0.0; ns * nf * h],
            a2: vec![0.0; ns * nf * q],
            out: vec![0.0; ns * nf],
            weights: FrameWeights::ones(ns, nf),
        };
        let mut z = vec![0.0; 4 * h];
        for k in 0..ns {
            let mut h_prev = vec![0.0; h];
            let mut c_prev = vec![0.0; h];
            for t in 0..nf {
                let cell = k * nf + t;
                let xt = x.at(k, t);
                for (r, zr) in z.iter_mut().enumerate() {
                    let mut acc = b[r];
                    for (w, v) in w_ih[r * FEATURE_COUNT..(r + 1) * FEATURE_COUNT]
                        .iter()
                        .zip(xt)
                    {
                        acc += w * v;
                    }
                    for (w, v) in w_hh[r * h..(r + 1) * h].iter().zip(&h_prev) {
                        acc += w * v;
                    }
                    *zr = acc;
                }
                let gates = &mut cache.gates[cell * 4 * h..(cell + 1) * 4 * h];
                for j in 0..h {
                    gates[j] = sigmoid(z[j]);
                    gates[h + j] = sigmoid(z[h + j]);
                    gates[2 * h + j] = z[2 * h + j].tanh();
                    gates[3 * h + j] = sigmoid(z[3 * h + j]);
                }
                for j in 0..h {
                    let c = gates[h + j] * c_prev[j] + gates[j] * gates[2 * h + j];
                    c_prev[j] = c;
                    h_prev[j] = gates[3 * h + j] * c.tanh();
                }
                cache.cell[cell * h..(cell + 1) * h].copy_from_slice(&c_prev);
                cache.hid[cell * h..(cell + 1) * h].copy_from_slice(&h_prev);

                let a1 = &mut cache.a1[cell * h..(cell + 1) * h];
                for (r, a) in a1.iter_mut().enumerate() {
                    *a = (b1[r] + dot(&w1[r * h..(r + 1) * h], &h_prev)).tanh();
                }
                let a2 = &mut cache.a2[cell * q..(cell + 1) * q];
                for (r, a) in a2.iter_mut().enumerate() {
                    *a = (b2[r] + dot(&w2[r * h..(r + 1) * h], a1)).tanh();
                }
                let y = b3 + dot(w3, a2);
                cache.out[cell] = y;
                cache.weights.set(k, t, softplus(y));
            }
        }
        if cache.weights.as_slice().iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFiniteStage("network forward"));
        }
        Ok(cache)
    }

    /// Gradient of a scalar loss with respect to every trainable parameter,
    /// given the loss gradient with respect to the output weights.
    pub(crate) fn backward(&self, cache: &ForwardCache, grad_weights: &FrameWeights) -> Vec<f64> {
        let l = &self.layout;
        let (h, q) = (cache.hidden, cache.half);
        let (ns, nf) = (cache.scatterers, cache.frames);
        let th = &self.theta;
        let mut g = vec![0.0; self.theta.len()];
        let (w_hh, w1, w2, w3) = (
            &th[l.w_hh.clone()],
            &th[l.w1.clone()],
            &th[l.w2.clone()],
            &th[l.w3.clone()],
        );

        let mut g_h_out = vec![0.0; nf * h];
        let mut g_z2 = vec![0.0; q];
        let mut g_z1 = vec![0.0; h];
        let mut dz = vec![0.0; 4 * h];
        for k in 0..ns {
            // dense stack, frame by frame
            for t in 0..nf {
                let cell = k * nf + t;
                let gy = grad_weights.get(k, t) * sigmoid(cache.out[cell]);
                let a1 = &cache.a1[cell * h..(cell + 1) * h];
                let a2 = &cache.a2[cell * q..(cell + 1) * q];
                let hid = &cache.hid[cell * h..(cell + 1) * h];
                g[l.b3.start] += gy;
                for r in 0..q {
                    g[l.w3.start + r] += gy * a2[r];
                    g_z2[r] = gy * w3[r] * (1.0 - a2[r] * a2[r]);
                    g[l.b2.start + r] += g_z2[r];
                    for c in 0..h {
                        g[l.w2.start + r * h + c] += g_z2[r] * a1[c];
                    }
                }
                for c in 0..h {
                    let mut ga1 = 0.0;
                    for r in 0..q {
                        ga1 += w2[r * h + c] * g_z2[r];
                    }
                    g_z1[c] = ga1 * (1.0 - a1[c] * a1[c]);
                }
                for r in 0..h {
                    g[l.b1.start + r] += g_z1[r];
                    for c in 0..h {
                        g[l.w1.start + r * h + c] += g_z1[r] * hid[c];
                    }
                }
                let gh = &mut g_h_out[t * h..(t + 1) * h];
                for c in 0..h {
                    gh[c] = (0..h).map(|r| w1[r * h + c] * g_z1[r]).sum();
                }
            }

            // backpropagation through time
            let mut dh_next = vec![0.0; h];
            let mut dc_next = vec![0.0; h];
            for t in (0..nf).rev() {
                let cell = k * nf + t;
                let gates = &cache.gates[cell * 4 * h..(cell + 1) * 4 * h];
                let c = &cache.cell[cell * h..(cell + 1) * h];
                let zeros = vec![0.0; h];
                let (c_prev, h_prev) = if t > 0 {
                    let p = cell - 1;
                    (
                        &cache.cell[p * h..(p + 1) * h],
                        &cache.hid[p * h..(p + 1) * h],
                    )
                } else {
                    (&zeros[..], &zeros[..])
                };
                for j in 0..h {
                    let (i, f, gg, o) =
                        (gates[j], gates[h + j], gates[2 * h + j], gates[3 * h + j]);
                    let tc = c[j].tanh();
                    let dh = g_h_out[t * h + j] + dh_next[j];
                    let dc = dh * o * (1.0 - tc * tc) + dc_next[j];
                    dz[j] = dc * gg * i * (1.0 - i);
                    dz[h + j] = dc * c_prev[j] * f * (1.0 - f);
                    dz[2 * h + j] = dc * i * (1.0 - gg * gg);
                    dz[3 * h + j] = dh * tc * o * (1.0 - o);
                    dc_next[j] = dc * f;
                }
                let xt = cache.x.at(k, t);
                for (r, d) in dz.iter().enumerate() {
                    g[l.b.start + r] += d;
                    for (s, v) in xt.iter().enumerate() {
                        g[l.w_ih.start + r * FEATURE_COUNT + s] += d * v;
                    }
                    for (s, v) in h_prev.iter().enumerate() {
                        g[l.w_hh.start + r * h + s] += d * v;
                    }
                }
                for (s, dn) in dh_next.iter_mut().enumerate() {
                    *dn = dz
                        .iter()
                        .enumerate()
                        .map(|(r, d)| w_hh[r * h + s] * d)
                        .sum();
                }
            }
        }
        g
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(PARAMS_MAGIC);
        out.extend_from_slice(&PARAMS_VERSION.to_le_bytes());
        let mut tensors: Vec<(&str, Vec<usize>, Vec<f64>)> = self
            .layout
            .tensors()
            .into_iter()
            .map(|(name, r, shape)| (name, shape, self.theta[r].to_vec()))
            .collect();
        tensors.push((
            "feature_mean",
            vec![FEATURE_COUNT],
            self.stats.mean.to_vec(),
        ));
        tensors.push(("feature_std", vec![FEATURE_COUNT], self.stats.std.to_vec()));
        let mask = self
            .mask
            .0
            .iter()
            .map(|&m| if m { 1.0 } else { 0.0 })
            .collect();
        tensors.push(("feature_mask", vec![FEATURE_COUNT], mask));
        out.extend_from_slice(&(tensors.len() as u32).to_le_bytes());
        for (name, shape, values) in tensors {
            out.extend_from_slice(&(name.len() as u32).to_le_bytes());
            out.extend_from_slice(name.as_bytes());
            out.extend_from_slice(&(shape.len() as u32).to_le_bytes());
            for d in shape {
                out.extend_from_slice(&(d as u32).to_le_bytes());
            }
            for v in values {
                out.extend_from_slice(&(v as f32).to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], origin: &Path) -> Result<Self> {
        let bad = |m: String| Error::format(origin, m);
        let mut r = Reader { bytes, at: 0 };
        if r.take(4).ok_or_else(|| bad("truncated header".into()))? != PARAMS_MAGIC {
            return Err(bad("not a weight file (bad magic)".into()));
        }
        let version = r.u32().ok_or_else(|| bad("truncated header".into()))?;
        if version != PARAMS_VERSION {
            return Err(bad(format!("unsupported weight file version {version}")));
        }
        let count = r.u32().ok_or_else(|| bad("truncated header".into()))?;
        let mut tensors = Vec::new();
        for _ in 0..count {
            let t = r
                .tensor()
                .ok_or_else(|| bad("truncated tensor table".into()))?;
            tensors.push(t);
        }
        if r.at != bytes.len() {
            return Err(bad("trailing bytes after tensors".into()));
        }
        let find = |name: &str| tensors.iter().find(|t| t.0 == name);
        let w_hh = find("lstm.w_hh").ok_or_else(|| bad("missing lstm.w_hh".into()))?;
        let w_ih = find("lstm.w_ih").ok_or_else(|| bad("missing lstm.w_ih".into()))?;
        let (hidden, input) = match (w_hh.1.as_slice(), w_ih.1.as_slice()) {
            ([_, h], [_, i]) => (*h, *i),
            _ => return Err(bad("LSTM matrices must be 2-D".into())),
        };
        let mut p = Self::zeros_with_input(input, hidden).map_err(|e| bad(e.to_string()))?;
        for (name, range, shape) in p.layout.tensors() {
            let t = find(name).ok_or_else(|| bad(format!("missing tensor {name}")))?;
            if t.1 != shape {
                return Err(bad(format!(
                    "tensor {name} has shape {:?}, expected {shape:?}",
                    t.1
                )));
            }
            p.theta[range].copy_from_slice(&t.2);
        }
        let fixed = |name: &str| -> Result<[f64; FEATURE_COUNT]> {
            let t = find(name).ok_or_else(|| bad(format!("missing tensor {name}")))?;
            t.2.as_slice()
                .try_into()
                .map_err(|_| bad(format!("tensor {name} must have {FEATURE_COUNT} values")))
        };
        p.stats = FeatureStats {
            mean: fixed("feature_mean")?,
            std: fixed("feature_std")?,
        };
        p.mask = FeatureMask(fixed("feature_mask")?.map(|v| v != 0.0));
        if !p.is_finite() || p.stats.std.iter().any(|s| !(*s > 0.0)) {
            return Err(bad("non-finite or invalid parameter values".into()));
        }
        Ok(p)
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
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Option<&'a [u8]> {
        let s = self.bytes.get(self.at..self.at.checked_add(n)?)?;
        self.at += n;
        Some(s)
    }

    fn u32(&mut self) -> Option<u32> {
        Some(u32::from_le_bytes(self.take(4)?.try_into().ok()?))
    }

    fn tensor(&mut self) -> Option<(String, Vec<usize>, Vec<f64>)> {
        let len = self.u32()? as usize;
        let name = String::from_utf8(self.take(len)?.to_vec()).ok()?;
        let ndim = self.u32()? as usize;
        if ndim > 8 {
            return None;
        }
        let shape: Vec<usize> = (0..ndim)
            .map(|_| self.u32().map(|d| d as usize))
            .collect::<Option<_>>()?;
        let n = shape.iter().try_fold(1usize, |a, d| a.checked_mul(*d))?;
        let raw = self.take(n.checked_mul(4)?)?;
        let values = raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
            .collect();
        Some((name, shape, values))
    }
}

/// Activations kept from the forward pass for the backward pass.
#[derive(Debug, Clone)]
pub(crate) struct ForwardCache {
    scatterers: usize,
    frames: usize,
    hidden: usize,
    half: usize,
    x: FeatureTensor,
    /// i, f, g, o activations per cell.
    gates: Vec<f64>,
    cell: Vec<f64>,
    hid: Vec<f64>,
    a1: Vec<f64>,
    a2: Vec<f64>,
    /// Pre-softplus output.
    out: Vec<f64>,
    pub weights: FrameWeights,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn random_features(rng: &mut ChaCha8Rng, ns: usize, nf: usize) -> FeatureTensor {
        FeatureTensor::from_data(
            ns,
            nf,
            (0..ns * nf * FEATURE_COUNT)
                .map(|_| rng.gen_range(-2.0..2.0))
                .collect(),
        )
        .unwrap()
    }

    /// Seeded init with a random output layer, as after some training.
    fn trained_like(hidden: usize, seed: u64) -> WeightNetParams {
        let mut p = WeightNetParams::init(hidden, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xff);
        for v in p.tensor_mut("fc3.w").unwrap() {
            *v = rng.gen_range(-0.5..0.5);
        }
        p
    }

    #[test]
    fn zero_parameters_give_ln_two() {
        let p = WeightNetParams::zeros(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let w = p.forward(&random_features(&mut rng, 3, 5)).unwrap();
        assert!(w
            .as_slice()
            .iter()
            .all(|v| (v - 0.693_147_180_559_945_3).abs() < 1e-15));
    }

    #[test]
    fn unit_bias_gives_unit_weights() {
        let mut p = WeightNetParams::zeros(4).unwrap();
        p.tensor_mut("fc3.b").unwrap()[0] = UNIT_WEIGHT_BIAS;
        let w = p.forward(&FeatureTensor::zeros(2, 3)).unwrap();
        assert!(w.as_slice().iter().all(|v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn single_step_matches_hand_evaluation() {
        // H = 2 (so the second dense layer has one unit), one frame
        let mut p = WeightNetParams::zeros(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for v in p.as_mut_slice() {
            *v = rng.gen_range(-0.8..0.8);
        }
        let x = [0.3, -1.2, 0.5, 2.0, -0.4];
        let feats = FeatureTensor::from_data(1, 1, x.to_vec()).unwrap();
        let got = p.forward(&feats).unwrap().get(0, 0);

        let w_ih = p.tensor("lstm.w_ih").unwrap();
        let b = p.tensor("lstm.b").unwrap();
        let pre = |r: usize| b[r] + (0..5).map(|s| w_ih[r * 5 + s] * x[s]).sum::<f64>();
        let sig = |v: f64| 1.0 / (1.0 + (-v).exp());
        let mut h = [0.0; 2];
        for j in 0..2 {
            let c = sig(pre(j)) * pre(4 + j).tanh();
            h[j] = sig(pre(6 + j)) * c.tanh();
        }
        let (w1, b1) = (p.tensor("fc1.w").unwrap(), p.tensor("fc1.b").unwrap());
        let a1 = [
            (b1[0] + w1[0] * h[0] + w1[1] * h[1]).tanh(),
            (b1[1] + w1[2] * h[0] + w1[3] * h[1]).tanh(),
        ];
        let (w2, b2) = (p.tensor("fc2.w").unwrap(), p.tensor("fc2.b").unwrap());
        let a2 = (b2[0] + w2[0] * a1[0] + w2[1] * a1[1]).tanh();
        let y = p.tensor("fc3.b").unwrap()[0] + p.tensor("fc3.w").unwrap()[0] * a2;
        let expected = (1.0 + y.exp()).ln();
        assert!((got - expected).abs() < 1e-14, "{got} vs {expected}");
    }

    #[test]
    fn untrained_network_outputs_unit_weights() {
        let p = WeightNetParams::init(DEFAULT_HIDDEN, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let w = p.forward(&random_features(&mut rng, 5, 7)).unwrap();
        assert!(w.as_slice().iter().all(|v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn scatterer_permutation_is_equivariant() {
        let p = trained_like(8, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let feats = random_features(&mut rng, 4, 6);
        let order = [2, 0, 3, 1];
        let w = p.forward(&feats).unwrap();
        let wp = p.forward(&feats.permuted(&order)).unwrap();
        for (i, &k) in order.iter().enumerate() {
            assert_eq!(wp.row(i), w.row(k));
        }
    }

    #[test]
    fn backward_matches_finite_differences() {
        let mut p = trained_like(3, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for v in p.as_mut_slice() {
            *v *= 2.0;
        }
        let feats = random_features(&mut rng, 2, 4);
        let coef: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let loss = |p: &WeightNetParams| -> f64 {
            let w = p.forward_cached(&feats).unwrap().weights;
            w.as_slice().iter().zip(&coef).map(|(a, b)| a * b).sum()
        };
        let cache = p.forward_cached(&feats).unwrap();
        let gw = FrameWeights::from_rows(coef.chunks(4).map(|c| c.to_vec()).collect()).unwrap();
        let g = p.backward(&cache, &gw);
        let step = 1e-6;
        for i in 0..p.len() {
            let mut a = p.clone();
            let mut b = p.clone();
            a.as_mut_slice()[i] += step;
            b.as_mut_slice()[i] -= step;
            let fd = (loss(&a) - loss(&b)) / (2.0 * step);
            assert!(
                (fd - g[i]).abs() <= 1e-6 * g[i].abs().max(1e-3),
                "param {i}: {fd} vs {}",
                g[i]
            );
        }
    }

    #[test]
    fn init_is_seeded_and_bounded() {
        let a = WeightNetParams::init(32, 9).unwrap();
        assert_eq!(a, WeightNetParams::init(32, 9).unwrap());
        assert_ne!(a, WeightNetParams::init(32, 10).unwrap());
        let bound = 1.0 / 5f64.sqrt();
        assert!(a
            .tensor("lstm.w_ih")
            .unwrap()
            .iter()
            .all(|v| v.abs() < bound));
        assert!(a
            .tensor("lstm.w_hh")
            .unwrap()
            .iter()
            .all(|v| v.abs() < 1.0 / 32f64.sqrt()));
        assert!(a.tensor("fc3.w").unwrap().iter().all(|&v| v == 0.0));
        assert_eq!(a.tensor("fc3.b").unwrap(), &[UNIT_WEIGHT_BIAS]);
        assert_eq!(
            a.len(),
            4 * 32 * 5 + 4 * 32 * 32 + 128 + 32 * 32 + 32 + 16 * 32 + 16 + 16 + 1
        );
    }

    #[test]
    fn file_round_trip() {
        let mut p = WeightNetParams::init(6, 1).unwrap();
        p.stats.mean = [0.5, 0.1, 2.0, -6.0, 0.3];
        p.stats.std = [0.2, 0.4, 3.0, 1.5, 0.05];
        p.mask = FeatureMask::without(super::super::Feature::Acceleration);
        let back = WeightNetParams::from_bytes(&p.to_bytes(), Path::new("mem")).unwrap();
        assert_eq!(back.hidden(), 6);
        assert_eq!(back.mask, p.mask);
        for (a, b) in back.as_slice().iter().zip(p.as_slice()) {
            assert_eq!(*a, *b as f32 as f64);
        }
        assert_eq!(back.to_bytes(), p.to_bytes());

        let bytes = p.to_bytes();
        assert!(WeightNetParams::from_bytes(&bytes[..bytes.len() - 3], Path::new("x")).is_err());
        assert!(WeightNetParams::from_bytes(b"NOPE", Path::new("x")).is_err());
    }
}
