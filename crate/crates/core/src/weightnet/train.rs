use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::{Feature, FeatureMask, FeatureStats};
use super::loss::{Objective, TrainingItem};
use super::network::WeightNetParams;
use crate::radar_sim::FrameWeights;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
}

/// Optimizer settings and the list of training stages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainSchedule {
    pub stages: Vec<Stage>,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Seeds the batch shuffling.
    pub seed: u64,
}

impl Default for TrainSchedule {
    fn default() -> Self {
        Self {
            stages: vec![
                Stage {
                    learning_rate: 5e-4,
                    batch_size: 32,
                    epochs: 20,
                },
                Stage {
                    learning_rate: 1e-4,
                    batch_size: 16,
                    epochs: 50,
                },
            ],
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            seed: 0,
        }
    }
}

impl TrainSchedule {
    pub fn validate(&self) -> Result<()> {
        if self.stages.is_empty() {
            return Err(Error::InvalidArgument("schedule has no stages".into()));
        }
        for s in &self.stages {
            if !(s.learning_rate > 0.0 && s.learning_rate.is_finite())
                || s.epochs == 0
                || s.batch_size == 0
            {
                return Err(Error::InvalidArgument(format!("invalid stage {s:?}")));
            }
        }
        if !((0.0..1.0).contains(&self.beta1)
            && (0.0..1.0).contains(&self.beta2)
            && self.epsilon > 0.0)
        {
            return Err(Error::InvalidArgument("invalid Adam constants".into()));
        }
        Ok(())
    }
}

/// Adaptive moment estimation.
#[derive(Debug, Clone)]
pub struct Adam {
    beta1: f64,
    beta2: f64,
    epsilon: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    pub fn new(len: usize, beta1: f64, beta2: f64, epsilon: f64) -> Self {
        Self {
            beta1,
            beta2,
            epsilon,
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
        }
    }

    pub fn step(&mut self, theta: &mut [f64], grad: &[f64], lr: f64) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        for i in 0..theta.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            theta[i] -= lr * (self.m[i] / c1) / ((self.v[i] / c2).sqrt() + self.epsilon);
        }
    }
}

/// One line of the training log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub stage: usize,
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub val_ssim_x100: f64,
}

#[derive(Debug, Clone)]
pub struct TrainReport {
    /// Parameters with the lowest validation loss seen (including the
    /// starting point).
    pub params: WeightNetParams,
    pub best_val_loss: f64,
    /// `(stage, epoch)` of the best parameters; `None` if never improved.
    pub best_at: Option<(usize, usize)>,
    pub history: Vec<EpochRecord>,
}

/// Fits the feature standardization of `params` on a training split.
pub fn fit_feature_stats(params: &mut WeightNetParams, train: &[TrainingItem]) -> Result<()> {
    params.stats = FeatureStats::fit(train.iter().map(|i| &i.features))?;
    Ok(())
}

fn is_numeric_failure(e: &Error) -> bool {
    matches!(e, Error::NonFiniteStage(_) | Error::NonFinite(_))
}

/// Trains with Adam over the schedule's stages. Feature statistics are fitted
/// on `train` first. The validation loss is evaluated after every epoch (on
/// `train` when `val` is empty); `log` sees every epoch record.
pub fn train(
    initial: WeightNetParams,
    train: &[TrainingItem],
    val: &[TrainingItem],
    schedule: &TrainSchedule,
    objective: &Objective,
    mut log: impl FnMut(&EpochRecord),
) -> Result<TrainReport> {
    schedule.validate()?;
    if train.is_empty() {
        return Err(Error::Empty("training set"));
    }
    let mut params = initial;
    fit_feature_stats(&mut params, train)?;
    let val_items: Vec<&TrainingItem> = if val.is_empty() {
        train.iter().collect()
    } else {
        val.iter().collect()
    };

    let start = objective.batch(&params, &val_items, false)?;
    let mut best = (params.clone(), start.loss, None);
    let mut history = Vec::new();
    let mut adam = Adam::new(
        params.len(),
        schedule.beta1,
        schedule.beta2,
        schedule.epsilon,
    );
    let mut rng = ChaCha8Rng::seed_from_u64(schedule.seed);
    let mut order: Vec<usize> = (0..train.len()).collect();

    for (si, stage) in schedule.stages.iter().enumerate() {
        for epoch in 0..stage.epochs {
            let diverged =
                |best: &(WeightNetParams, f64, Option<(usize, usize)>)| Error::Diverged {
                    stage: si,
                    epoch,
                    last_good: Box::new(best.0.clone()),
                };
            order.shuffle(&mut rng);
            let mut loss_sum = 0.0;
            for chunk in order.chunks(stage.batch_size) {
                let batch: Vec<&TrainingItem> = chunk.iter().map(|&i| &train[i]).collect();
                let eval = match objective.batch(&params, &batch, true) {
                    Ok(e) => e,
                    Err(e) if is_numeric_failure(&e) => return Err(diverged(&best)),
                    Err(e) => return Err(e),
                };
                if !eval.loss.is_finite() || eval.grad.iter().any(|g| !g.is_finite()) {
                    return Err(diverged(&best));
                }
                loss_sum += eval.loss * batch.len() as f64;
                adam.step(params.as_mut_slice(), &eval.grad, stage.learning_rate);
                if !params.is_finite() {
                    return Err(diverged(&best));
                }
            }
            let v = match objective.batch(&params, &val_items, false) {
                Ok(v) if v.loss.is_finite() => v,
                Ok(_) => return Err(diverged(&best)),
                Err(e) if is_numeric_failure(&e) => return Err(diverged(&best)),
                Err(e) => return Err(e),
            };
            let record = EpochRecord {
                stage: si,
                epoch,
                train_loss: loss_sum / train.len() as f64,
                val_loss: v.loss,
                val_ssim_x100: 100.0 * v.ssim,
            };
            log::debug!(
                "stage {si} epoch {epoch}: train {:.5} val {:.5}",
                record.train_loss,
                record.val_loss
            );
            log(&record);
            history.push(record);
            if v.loss < best.1 {
                best = (params.clone(), v.loss, Some((si, epoch)));
            }
        }
    }
    Ok(TrainReport {
        params: best.0,
        best_val_loss: best.1,
        best_at: best.2,
        history,
    })
}

/// Mean SSIM of items synthesized with `params`, or with unit weights when
/// `params` is `None`.
pub fn mean_ssim(
    params: Option<&WeightNetParams>,
    items: &[TrainingItem],
    objective: &Objective,
) -> Result<f64> {
    if items.is_empty() {
        return Err(Error::Empty("evaluation set"));
    }
    let mut total = 0.0;
    for item in items {
        total += match params {
            Some(p) => 1.0 - objective.loss(p, item)? / objective.scale,
            None => {
                let w = FrameWeights::ones(item.signals.scatterers(), item.signals.frames());
                objective.ssim_with_weights(item, &w)?
            }
        };
    }
    Ok(total / items.len() as f64)
}

/// One row of a feature ablation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    /// The disabled feature; `None` for the full model.
    pub removed: Option<Feature>,
    pub mean_ssim_x100: f64,
    /// Change against the full model, SSIM ×100.
    pub delta_x100: f64,
}

/// Trains one model with every feature and one per disabled feature, and
/// reports held-out SSIM for each.
pub fn feature_ablation(
    hidden: usize,
    init_seed: u64,
    train_items: &[TrainingItem],
    val: &[TrainingItem],
    test: &[TrainingItem],
    schedule: &TrainSchedule,
    objective: &Objective,
) -> Result<Vec<AblationRow>> {
    let variants = std::iter::once(None).chain(Feature::ALL.into_iter().map(Some));
    let mut rows: Vec<AblationRow> = Vec::new();
    for removed in variants {
        let mut p = WeightNetParams::init(hidden, init_seed)?;
        p.mask = removed.map_or_else(FeatureMask::default, FeatureMask::without);
        let report = train(p, train_items, val, schedule, objective, |_| {})?;
        let score = 100.0 * mean_ssim(Some(&report.params), test, objective)?;
        let full = rows.first().map_or(score, |r| r.mean_ssim_x100);
        rows.push(AblationRow {
            removed,
            mean_ssim_x100: score,
            delta_x100: score - full,
        });
    }
    Ok(rows)
}
