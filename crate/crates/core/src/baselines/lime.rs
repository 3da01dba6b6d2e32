use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::seq::IndexedRandom;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{BaselineError, ClassifierHandle};
use crate::executor::{Example, FeatureKind, FeatureSchema, LabeledBatch};
use crate::explang::Value;
use crate::rng::{substream, Purpose};

#[derive(Debug, Clone, PartialEq)]
pub struct LimeConfig {
    pub perturbations_per_example: usize,
    pub seed: u64,
    pub label_of_interest: String,
}

impl LimeConfig {
    pub fn new(label_of_interest: impl Into<String>, seed: u64) -> Self {
        LimeConfig {
            perturbations_per_example: 1,
            seed,
            label_of_interest: label_of_interest.into(),
        }
    }
}

/// A linear vote toward `reference_class`.
///
/// Numeric features enter centred and divided by their schema range, keyed by
/// feature name. Categorical features enter one-hot, keyed `feature=value`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributionExplanation {
    pub weights: BTreeMap<String, f64>,
    pub intercept: f64,
    pub reference_class: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimeOutcome {
    pub explanation: AttributionExplanation,
    /// The least-squares solve failed and correlation weights were used.
    pub fallback: bool,
    pub calls: usize,
}

fn term_key(feature: &str, value: &str) -> String {
    format!("{feature}={value}")
}

/// Column names and encoder for a schema.
fn encode(schema: &FeatureSchema, ex: &Example) -> Vec<(String, f64)> {
    let mut out = Vec::new();
    for spec in schema.features() {
        let v = ex.get(&spec.name);
        match &spec.kind {
            FeatureKind::Numeric { min, max } => {
                let range = if max > min { max - min } else { 1.0 };
                let x = v.and_then(Value::as_num).unwrap_or((min + max) / 2.0);
                out.push((spec.name.clone(), (x - (min + max) / 2.0) / range));
            }
            FeatureKind::Categorical { domain } => {
                for d in domain {
                    let hit = v.map(|v| v.to_string() == *d).unwrap_or(false);
                    out.push((term_key(&spec.name, d), if hit { 1.0 } else { 0.0 }));
                }
            }
        }
    }
    out
}

impl AttributionExplanation {
    pub fn vote(&self, schema: &FeatureSchema, ex: &Example) -> f64 {
        self.intercept
            + encode(schema, ex)
                .iter()
                .map(|(k, x)| self.weights.get(k).copied().unwrap_or(0.0) * x)
                .sum::<f64>()
    }

    /// Predicts `reference_class` iff the vote is positive.
    pub fn predicts_reference(&self, schema: &FeatureSchema, ex: &Example) -> bool {
        self.vote(schema, ex) > 0.0
    }

    /// Share of the batch's labels reproduced by the simulation rule.
    pub fn match_rate(&self, batch: &LabeledBatch) -> f64 {
        if batch.is_empty() {
            return 0.0;
        }
        let flags = batch.flags();
        let reference_is_interest = self.reference_class == batch.label_of_interest();
        let hits = batch
            .examples()
            .iter()
            .zip(&flags)
            .filter(|(ex, &y)| (self.predicts_reference(batch.schema(), ex) == reference_is_interest) == y)
            .count();
        hits as f64 / batch.len() as f64
    }

    /// Per-feature importance: the largest absolute weight among its terms.
    pub fn feature_importance(&self) -> BTreeMap<String, f64> {
        let mut out: BTreeMap<String, f64> = BTreeMap::new();
        for (k, w) in &self.weights {
            let f = k.split_once('=').map_or(k.as_str(), |(f, _)| f);
            let e = out.entry(f.to_string()).or_insert(0.0);
            *e = e.max(w.abs());
        }
        out
    }
}

fn perturb(schema: &FeatureSchema, anchor: &Example, rng: &mut impl rand::Rng) -> Example {
    let mut values = anchor.values.clone();
    for spec in schema.features() {
        let v = match &spec.kind {
            FeatureKind::Categorical { domain } => Value::Cat(domain.choose(rng).expect("non-empty domain").clone()),
            FeatureKind::Numeric { min, max } => {
                let x = anchor.get(&spec.name).and_then(Value::as_num).unwrap_or((min + max) / 2.0);
                let sd = 0.1 * (max - min);
                let noise = if sd > 0.0 {
                    Normal::new(0.0, sd).expect("finite sd").sample(rng)
                } else {
                    0.0
                };
                Value::Num((x + noise).clamp(*min, *max))
            }
        };
        values.insert(spec.name.clone(), v);
    }
    Example { values }
}

fn correlation_weights(x: &DMatrix<f64>, y: &DVector<f64>) -> (Vec<f64>, f64) {
    let n = y.len() as f64;
    let my = y.mean();
    let sy = (y.iter().map(|v| (v - my).powi(2)).sum::<f64>() / n).sqrt();
    let weights = (0..x.ncols())
        .map(|j| {
            let col = x.column(j);
            let mx = col.mean();
            let sx = (col.iter().map(|v| (v - mx).powi(2)).sum::<f64>() / n).sqrt();
            if sx == 0.0 || sy == 0.0 {
                return 0.0;
            }
            col.iter().zip(y.iter()).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / (n * sx * sy)
        })
        .collect();
    (weights, my)
}

/// Fits a linear surrogate to metered predictions on perturbations of `anchors`.
///
/// Targets are +1 for the label of interest and -1 otherwise. The fit is the
/// minimum-norm least-squares solution, so it is defined even with fewer
/// samples than terms.
pub fn lime_budgeted(
    schema: &FeatureSchema,
    anchors: &[Example],
    classifier: &ClassifierHandle,
    config: &LimeConfig,
) -> Result<LimeOutcome, BaselineError> {
    if config.perturbations_per_example == 0 {
        return Err(BaselineError::ZeroPerturbations);
    }
    if anchors.is_empty() {
        return Err(BaselineError::NoAnchors);
    }
    let calls = anchors.len() * config.perturbations_per_example;
    classifier.ensure_remaining(calls)?;

    let mut rng = substream(config.seed, Purpose::Perturbation, 0);
    let mut rows = Vec::with_capacity(calls);
    let mut targets = Vec::with_capacity(calls);
    for anchor in anchors {
        for _ in 0..config.perturbations_per_example {
            let p = perturb(schema, anchor, &mut rng);
            let label = classifier.predict(&p)?;
            targets.push(if label == config.label_of_interest { 1.0 } else { -1.0 });
            rows.push(encode(schema, &p));
        }
    }
    let keys: Vec<String> = rows[0].iter().map(|(k, _)| k.clone()).collect();
    let x = DMatrix::from_fn(rows.len(), keys.len() + 1, |i, j| if j == 0 { 1.0 } else { rows[i][j - 1].1 });
    let y = DVector::from_vec(targets);

    let solved = x
        .clone()
        .svd(true, true)
        .solve(&y, 1e-10)
        .ok()
        .filter(|beta| beta.iter().all(|b| b.is_finite()));
    let (fallback, intercept, weights) = match solved {
        Some(beta) => (false, beta[0], beta.iter().skip(1).copied().collect::<Vec<_>>()),
        None => {
            let (w, b) = correlation_weights(&x.columns(1, keys.len()).into_owned(), &y);
            (true, b, w)
        }
    };
    Ok(LimeOutcome {
        explanation: AttributionExplanation {
            weights: keys.into_iter().zip(weights).collect(),
            intercept,
            reference_class: config.label_of_interest.clone(),
        },
        fallback,
        calls,
    })
}
