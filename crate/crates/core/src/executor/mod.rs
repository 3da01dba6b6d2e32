//! Operational semantics of explanations and the evaluation metrics.

mod batch;
mod eval;
mod schema;

use thiserror::Error;

use crate::explang::Comparator;

pub use batch::{complement, negate_label, LabelKind, LabeledBatch, RawBatch};
pub use eval::{
    apply_explanation, clause_holds, condition_holds, coverage_precision, decide, faithfulness,
    simulatability, tally, EvalReport, Tally, Verdict,
};
pub use schema::{Example, FeatureKind, FeatureSchema, FeatureSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExecError {
    #[error("unknown feature {0:?}")]
    UnknownFeature(String),
    #[error("comparator {comparator:?} cannot apply to feature {feature:?}")]
    TypeMismatch { feature: String, comparator: Comparator },
    #[error("explanation label {label:?} does not match label of interest {label_of_interest:?}")]
    LabelMismatch { label: String, label_of_interest: String },
    #[error("empty batch")]
    EmptyBatch,
    #[error("expected {expected:?} labels, found {found:?}")]
    WrongLabelKind { expected: LabelKind, found: LabelKind },
    #[error("{examples} examples but {labels} labels")]
    LengthMismatch { examples: usize, labels: usize },
    #[error("label {0:?} is neither the label of interest nor its negation")]
    NonBinaryLabel(String),
    #[error("invalid schema: {0}")]
    InvalidSchema(String),
    #[error("invalid example: {0}")]
    InvalidExample(String),
}
