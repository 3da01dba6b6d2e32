//! Explanation language: syntax tree, quantifiers, parser and renderers.

mod ast;
mod parser;
mod quantifier;
mod render;

use thiserror::Error;

pub use ast::{ClauseTree, Comparator, Condition, Connective, Explanation, Value, MAX_BINARY_NODES};
pub use parser::{parse, ParseError};
pub use quantifier::{quantifier_confidence, Quantifier};
pub use render::{render, render_with_confidence};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExplangError {
    #[error("unknown quantifier {0:?}")]
    UnknownQuantifier(String),
    #[error("explanation has no quantifier")]
    MissingQuantifier,
    #[error("comparator {comparator:?} needs a numeric value, got {value:?}")]
    NonNumericValue { comparator: Comparator, value: String },
    #[error("empty feature name")]
    EmptyFeature,
    #[error("empty label")]
    EmptyLabel,
    #[error("label {0:?} carries a negation; use label_negated instead")]
    NegatedLabelText(String),
    #[error("clause has {0} binary nodes, at most {MAX_BINARY_NODES} allowed")]
    TooDeep(usize),
}
