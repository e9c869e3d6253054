//! Compares the hand-written gradient of the SSIM loss (through STFT, dB,
//! min-max normalization, the dense head and the LSTM) with central finite
//! differences on a tiny two-scatterer problem.

use std::f64::consts::TAU;

use handsynth::dsp::{Spectrogram, StftConfig};
use handsynth::radar_sim::FrameWeights;
use handsynth::weightnet::{FeatureTensor, Objective, ProjectedSignals, TrainingItem, WeightNetParams};
use handsynth::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> handsynth::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let obj = Objective {
        stft: StftConfig {
            target_len: 64,
            ..StftConfig::default()
        },
        ..Objective::default()
    };
    let rows = (0..2)
        .map(|k| {
            let f = rng.gen_range(-0.4..0.4);
            (0..64)
                .map(|n| Complex::from_polar((k + 1) as f64, TAU * f * n as f64))
                .collect()
        })
        .collect();
    let signals = ProjectedSignals::from_rows(16, 3, rows)?;
    let hidden = FrameWeights::from_rows(vec![vec![0.2, 0.4, 0.3, 0.1], vec![3.0, 2.0, 2.5, 1.5]])?;
    let target = Spectrogram::new(64, 1, obj.image(&signals, &hidden)?, 1.0, 1.0)?;
    let features = FeatureTensor::from_data(2, 4, (0..40).map(|_| rng.gen_range(-1.5..1.5)).collect())?;
    let item = TrainingItem::new("fd", features, signals, target)?;

    let mut p = WeightNetParams::init(2, 11)?;
    p.tensor_mut("fc3.w").expect("tensor exists").copy_from_slice(&[0.8]);
    for v in p.as_mut_slice() {
        *v *= 3.0;
    }
    let eval = obj.loss_and_grad(&p, &item)?;
    println!("loss {:.6}, {} parameters", eval.loss, p.len());

    let h = 1e-5;
    let mut offset = 0;
    for name in p.tensor_names() {
        let len = p.tensor(name).expect("tensor exists").len();
        let mut worst: f64 = 0.0;
        for i in offset..offset + len {
            let (mut a, mut b) = (p.clone(), p.clone());
            a.as_mut_slice()[i] += h;
            b.as_mut_slice()[i] -= h;
            let fd = (obj.loss(&a, &item)? - obj.loss(&b, &item)?) / (2.0 * h);
            if eval.grad[i].abs() > 1e-8 {
                worst = worst.max((fd - eval.grad[i]).abs() / eval.grad[i].abs());
            }
        }
        println!("{name:<10} {len:>3} values, worst relative error {worst:.2e}");
        offset += len;
    }
    Ok(())
}
