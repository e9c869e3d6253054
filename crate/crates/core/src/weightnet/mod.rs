//! Learned per-scatterer weighting.
//!
//! Motion features of every scatterer ([`extract_features`]) feed a small
//! LSTM + dense network ([`WeightNetParams`]) that outputs one positive
//! weight per scatterer and radar frame. The weighted composite of the
//! untouched per-scatterer IF signals is turned into a spectrogram and the
//! network is trained against reference spectrograms with `1 − SSIM`
//! ([`Objective`], [`train`]).

mod features;
mod loss;
mod network;
mod train;

pub use features::{
    extract_features, Feature, FeatureMask, FeatureStats, FeatureTensor, FEATURE_COUNT,
    RCS_LOG_FLOOR,
};
pub use loss::{pipeline_loss, LossEval, Objective, ProjectedSignals, TrainingItem};
pub use network::{
    WeightNetParams, DEFAULT_HIDDEN, PARAMS_MAGIC, PARAMS_VERSION, UNIT_WEIGHT_BIAS,
};
pub use train::{
    feature_ablation, fit_feature_stats, mean_ssim, train, AblationRow, Adam, EpochRecord, Stage,
    TrainReport, TrainSchedule,
};
