//! Hard/easy separability in feature space.

mod svm;
mod sweep;

pub use svm::{
    predict, train, training_accuracy, Dataset, KernelSpec, SmoOptions, Standardizer,
    SupportVector, SvmModel, TrainingMeta,
};
pub use sweep::{
    build_dataset, combination_sweep, feature_combinations, mean_accuracy, score_cell,
    write_sweep_csv, SweepOptions, SweepRow, DEFAULT_LINEAR_C, DEFAULT_RBF_C, DEFAULT_RBF_GAMMA,
    SWEEP_HEADER,
};
