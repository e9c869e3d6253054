//! Trains the weighting network on a synthetic corpus whose references were
//! rendered with a hidden, RCS-dependent weighting, and compares held-out
//! SSIM before and after training.
//!
//! ```text
//! cargo run --release --example weight_recovery -- [gestures] [seed]
//! ```

use std::time::Instant;

use handsynth::pipeline::{split_indices, synthetic_corpus, CorpusSpec, SynthesisContext};
use handsynth::weightnet::{mean_ssim, train, Objective, TrainSchedule, TrainingItem, WeightNetParams};

fn main() -> handsynth::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>().expect("integer argument"));
    let count = args.next().unwrap_or(50) as usize;
    let seed = args.next().unwrap_or(1);

    let ctx = SynthesisContext::default();
    let spec = CorpusSpec {
        count,
        ..CorpusSpec::default()
    };
    let t0 = Instant::now();
    let items: Vec<TrainingItem> = synthetic_corpus(&spec, &ctx)?
        .into_iter()
        .map(|(_, item)| item)
        .collect();
    println!("hidden rule {:?}", spec.rule);
    println!("{count} gestures synthesized in {:.1} s", t0.elapsed().as_secs_f64());

    let (tr, va, te) = split_indices(items.len(), 0.1, 0.2, seed);
    let pick = |ix: &[usize]| ix.iter().map(|&i| items[i].clone()).collect::<Vec<_>>();
    let (train_set, val_set, test_set) = (pick(&tr), pick(&va), pick(&te));
    let objective = Objective {
        stft: ctx.stft,
        ..Objective::default()
    };

    let t0 = Instant::now();
    let report = train(
        WeightNetParams::init(32, 0)?,
        &train_set,
        &val_set,
        &TrainSchedule::default(),
        &objective,
        |r| {
            if r.epoch % 10 == 9 {
                println!("stage {} epoch {:>2}  train {:.5}  val {:.5}", r.stage, r.epoch + 1, r.train_loss, r.val_loss);
            }
        },
    )?;
    println!("trained in {:.1} s, best validation at {:?}", t0.elapsed().as_secs_f64(), report.best_at);

    let unit = mean_ssim(None, &test_set, &objective)?;
    let learned = mean_ssim(Some(&report.params), &test_set, &objective)?;
    println!("held-out SSIM x100 over {} gestures:", test_set.len());
    println!("  unit weights     {:.3}", 100.0 * unit);
    println!("  learned weights  {:.3}  ({:+.3})", 100.0 * learned, 100.0 * (learned - unit));
    Ok(())
}
