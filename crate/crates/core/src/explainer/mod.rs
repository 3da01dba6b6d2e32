//! Search for the explanation that best reproduces a batch of predictions.
//!
//! Three strategies share one candidate space (single conditions, both label
//! polarities, optionally a fitted quantifier):
//!
//! - [`Strategy::Top1`] commits greedily to one feature and returns one candidate;
//! - [`Strategy::Beam`] keeps the `beam_width` best clauses and tries AND/OR extensions;
//! - [`Strategy::PerFeature`] returns the best candidate for every feature.
//!
//! Candidates are ranked by faithfulness on the input batch, then coverage,
//! then fewer conditions, then canonical text. The search reads only the
//! given predictions and never calls a classifier.

mod pool;
mod search;

use std::cmp::Ordering;
use std::collections::HashSet;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::executor::{tally, EvalReport, ExecError, LabeledBatch, Tally};
use crate::explang::{render, Explanation};
use crate::rng::{substream, Purpose};

pub use pool::enumerate_conditions;
pub use search::{beam_conjunction_search, fit_quantifier, per_feature_search, top1_search};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("batch contains a single class")]
    DegenerateBatch,
    #[error("clause never fires on the batch")]
    ZeroCoverage,
    #[error("need at least {needed} examples, got {got}")]
    InsufficientExamples { needed: usize, got: usize },
    #[error("invalid search config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Exec(#[from] ExecError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "top1")]
    Top1,
    #[serde(rename = "beam")]
    Beam,
    #[serde(rename = "perfeat")]
    PerFeature,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Top1, Strategy::Beam, Strategy::PerFeature];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Top1 => "top1",
            Strategy::Beam => "beam",
            Strategy::PerFeature => "perfeat",
        }
    }
}

impl FromStr for Strategy {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "top1" | "greedy" => Ok(Strategy::Top1),
            "beam" | "bs" => Ok(Strategy::Beam),
            "perfeat" | "per_feature" | "per-feature" | "pf" => Ok(Strategy::PerFeature),
            other => Err(SearchError::InvalidConfig(format!("unknown strategy {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub strategy: Strategy,
    pub beam_width: usize,
    /// Number of conditions a beam clause may grow to (1 or 2).
    pub max_conjunction_depth: usize,
    pub quantifier_fitting: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            strategy: Strategy::PerFeature,
            beam_width: 20,
            max_conjunction_depth: 1,
            quantifier_fitting: true,
        }
    }
}

impl SearchConfig {
    pub fn with_strategy(strategy: Strategy) -> Self {
        SearchConfig {
            strategy,
            ..SearchConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if self.beam_width == 0 {
            return Err(SearchError::InvalidConfig("beam_width must be at least 1".into()));
        }
        if !(1..=2).contains(&self.max_conjunction_depth) {
            return Err(SearchError::InvalidConfig(format!(
                "max_conjunction_depth must be 1 or 2, got {}",
                self.max_conjunction_depth
            )));
        }
        Ok(())
    }
}

/// A scored explanation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    pub text: String,
    pub explanation: Explanation,
    pub faithfulness: f64,
    pub coverage: f64,
    #[serde(skip)]
    pub tally: Tally,
}

impl Candidate {
    pub fn new(explanation: Explanation, tally: Tally) -> Self {
        Candidate {
            text: render(&explanation),
            faithfulness: tally.match_rate(),
            coverage: tally.coverage(),
            explanation,
            tally,
        }
    }

    /// Scores `explanation` with the executor.
    pub fn score(explanation: Explanation, batch: &LabeledBatch) -> Result<Self, SearchError> {
        let t = tally(&explanation, batch)?;
        Ok(Candidate::new(explanation, t))
    }

    /// Ranking order: more matches, more coverage, fewer conditions, no
    /// quantifier, then text.
    pub fn rank(&self, other: &Candidate) -> Ordering {
        // Cross-multiplied so candidates scored on batches of different sizes compare exactly.
        let lhs = self.tally.matches * other.tally.total.max(1);
        let rhs = other.tally.matches * self.tally.total.max(1);
        rhs.cmp(&lhs)
            .then_with(|| {
                (other.tally.covered * self.tally.total.max(1))
                    .cmp(&(self.tally.covered * other.tally.total.max(1)))
            })
            .then_with(|| {
                self.explanation
                    .clause
                    .num_conditions()
                    .cmp(&other.explanation.clause.num_conditions())
            })
            .then_with(|| self.explanation.quantifier.is_some().cmp(&other.explanation.quantifier.is_some()))
            .then_with(|| self.text.cmp(&other.text))
    }
}

/// Ranked candidates without duplicate renderings.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct CandidateSet {
    pub candidates: Vec<Candidate>,
}

impl CandidateSet {
    pub fn from_candidates(mut candidates: Vec<Candidate>) -> Self {
        candidates.sort_by(Candidate::rank);
        let mut seen = HashSet::new();
        candidates.retain(|c| seen.insert(c.text.clone()));
        CandidateSet { candidates }
    }

    pub fn best(&self) -> Option<&Candidate> {
        self.candidates.first()
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExplainOutput {
    pub best: Candidate,
    pub report: EvalReport,
    pub candidates: CandidateSet,
}

/// Runs the configured strategy and scores the winner on the input batch.
pub fn explain(batch: &LabeledBatch, config: &SearchConfig) -> Result<ExplainOutput, SearchError> {
    config.validate()?;
    let candidates = match config.strategy {
        Strategy::Top1 => top1_search(batch, config)?,
        Strategy::Beam => beam_conjunction_search(batch, config)?,
        Strategy::PerFeature => per_feature_search(batch, config)?,
    };
    let best = candidates
        .best()
        .cloned()
        .ok_or(SearchError::DegenerateBatch)?;
    let t = tally(&best.explanation, batch)?;
    let report = EvalReport {
        faithfulness: t.match_rate(),
        simulatability: None,
        coverage: t.coverage(),
        precision: t.precision(),
    };
    Ok(ExplainOutput {
        best,
        report,
        candidates,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleOutcome {
    /// Winner with the highest match rate over all examples.
    pub best: Candidate,
    /// Each subset's own winner, scored over all examples.
    pub subset_winners: Vec<Candidate>,
    /// Subsets skipped because their predictions were single-class.
    pub skipped_subsets: usize,
}

/// Splits the batch into `n_subsets` disjoint seeded subsets of
/// `subset_size`, explains each, and keeps the subset winner that best
/// matches the predictions on the whole batch.
pub fn ensemble_subsets(
    batch: &LabeledBatch,
    config: &SearchConfig,
    n_subsets: usize,
    subset_size: usize,
    seed: u64,
) -> Result<EnsembleOutcome, SearchError> {
    let needed = n_subsets * subset_size;
    if n_subsets == 0 || subset_size == 0 || batch.len() < needed {
        return Err(SearchError::InsufficientExamples {
            needed: needed.max(1),
            got: batch.len(),
        });
    }
    let mut order: Vec<usize> = (0..batch.len()).collect();
    order.shuffle(&mut substream(seed, Purpose::Partition, 0));
    let mut winners = Vec::new();
    let mut skipped = 0;
    for chunk in order[..needed].chunks(subset_size) {
        let sub = batch.select(chunk);
        match explain(&sub, config) {
            Ok(out) => winners.push(Candidate::score(out.best.explanation, batch)?),
            Err(SearchError::DegenerateBatch) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    let best = winners
        .iter()
        .min_by(|a, b| a.rank(b))
        .cloned()
        .ok_or(SearchError::DegenerateBatch)?;
    Ok(EnsembleOutcome {
        best,
        subset_winners: winners,
        skipped_subsets: skipped,
    })
}

/// The first subset `ensemble_subsets` would draw with the same seed.
pub fn first_subset(batch: &LabeledBatch, subset_size: usize, seed: u64) -> LabeledBatch {
    let mut order: Vec<usize> = (0..batch.len()).collect();
    order.shuffle(&mut substream(seed, Purpose::Partition, 0));
    batch.select(&order[..subset_size.min(order.len())])
}
