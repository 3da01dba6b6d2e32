//! Model-agnostic if-then explanations for tabular classifiers.
//!
//! The crate covers the explanation language ([`explang`]), its execution and
//! scoring ([`executor`]), surface text metrics ([`textmetrics`]), a synthetic
//! task generator with planted explanations ([`taskforge`]), search-based
//! explanation generation ([`explainer`]) and budget-metered baseline
//! explainers ([`baselines`]).

pub mod baselines;
pub mod executor;
pub mod explainer;
pub mod explang;
pub mod rng;
pub mod taskforge;
pub mod textmetrics;
