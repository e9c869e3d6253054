//! Retrains the weighting network with each input feature disabled in turn
//! and reports the held-out SSIM change against the full model.
//!
//! Small corpus and a short schedule so it finishes in about a minute.

use handsynth::pipeline::{split_indices, synthetic_corpus, CorpusSpec, SynthesisContext};
use handsynth::weightnet::{feature_ablation, Objective, Stage, TrainSchedule, TrainingItem};

fn main() -> handsynth::Result<()> {
    let ctx = SynthesisContext::default();
    let items: Vec<TrainingItem> = synthetic_corpus(
        &CorpusSpec {
            count: 20,
            ..CorpusSpec::default()
        },
        &ctx,
    )?
    .into_iter()
    .map(|(_, item)| item)
    .collect();
    let (tr, va, te) = split_indices(items.len(), 0.1, 0.25, 3);
    let pick = |ix: &[usize]| ix.iter().map(|&i| items[i].clone()).collect::<Vec<_>>();
    let schedule = TrainSchedule {
        stages: vec![Stage {
            learning_rate: 2e-3,
            batch_size: 8,
            epochs: 15,
        }],
        ..TrainSchedule::default()
    };
    let objective = Objective {
        stft: ctx.stft,
        ..Objective::default()
    };
    let rows = feature_ablation(16, 0, &pick(&tr), &pick(&va), &pick(&te), &schedule, &objective)?;

    println!("{:<16} {:>10} {:>10}", "removed", "SSIM x100", "delta");
    for r in rows {
        let name = r.removed.map_or("(none)", |f| f.name());
        println!("{name:<16} {:>10.3} {:>+10.3}", r.mean_ssim_x100, r.delta_x100);
    }
    Ok(())
}
