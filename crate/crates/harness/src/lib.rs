//! Experiment harness: CSV datasets, a small classifier zoo, budget-regime
//! comparisons against surrogate explainers, and report output.

mod config;
mod dataset;
mod error;
pub mod experiment;
mod mi;
pub mod report;
mod synth;
mod zoo;

pub use config::{ExperimentConfig, Method};
pub use dataset::{load_csv, load_csv_reader, Dataset, LoadOptions, Splits, MISSING};
pub use error::HarnessError;
pub use experiment::{feature_sweep, prepare, run_budget_experiment, scale_examples_experiment, Prepared};
pub use mi::{discretize, mutual_info_ranking, mutual_info_topk, mutual_information, quartile_bins};
pub use report::{Report, ScaleReport, Stat, SweepReport};
pub use synth::{adult_like_dataset, adult_like_rows, write_adult_like_csv, write_adult_like_file, HIGH_INCOME, LOW_INCOME};
pub use zoo::{fit, train_classifier, train_model, ClassifierKind, TrainedModel};
