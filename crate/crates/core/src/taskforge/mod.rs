//! Synthetic classification tasks with planted ground-truth explanations.

mod bundle;
mod descriptor;
mod generate;
mod linearize;

use thiserror::Error;

use crate::executor::ExecError;

pub use bundle::{read_bundle, write_bundle, BundleMeta};
pub use descriptor::{ComplexityDescriptor, Conjunction, Negation};
pub use generate::{
    binarize, generate_task, label_examples, sample_examples, sample_explanation, sample_schema,
    SyntheticTask, LABEL_WORDS, MIN_CLASS_FRACTION,
};
pub use linearize::{delinearize, linearize};

#[derive(Debug, Error)]
pub enum TaskError {
    #[error("schema has {available} features, explanation needs {needed}")]
    SchemaTooSmall { needed: usize, available: usize },
    #[error("could not reach the class-balance floor after {rounds} resampling rounds")]
    BalanceUnreachable { rounds: usize },
    #[error("label {0:?} never occurs in the batch")]
    LabelAbsent(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed linearized batch at line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error(transparent)]
    Exec(#[from] ExecError),
    #[error("bundle i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("bundle json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bundle csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("bundle explanation: {0}")]
    Parse(#[from] crate::explang::ParseError),
}
