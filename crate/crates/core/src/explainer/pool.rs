//! Candidate conditions and vectorised scoring over a fixed batch.

use crate::executor::{clause_holds, ExecError, FeatureKind, FeatureSchema, LabeledBatch, Tally};
use crate::explang::{ClauseTree, Comparator, Condition, Explanation, Quantifier, Value};

/// Single conditions worth trying on `batch`.
///
/// Categorical features get `EQ v` and `NEQ v` for every value in the schema
/// domain plus any value observed only in the batch. Numeric features get
/// `LEQ m` and `GT m` at each midpoint `m` between consecutive distinct
/// observed values; the other ordering comparators induce the same split at a
/// midpoint and are not repeated.
pub fn enumerate_conditions(schema: &FeatureSchema, batch: &LabeledBatch) -> Vec<Condition> {
    let mut out = Vec::new();
    for spec in schema.features() {
        out.extend(conditions_for_feature(&spec.name, &spec.kind, batch));
    }
    out
}

pub(crate) fn conditions_for_feature(
    name: &str,
    kind: &FeatureKind,
    batch: &LabeledBatch,
) -> Vec<Condition> {
    let mut out = Vec::new();
    match kind {
        FeatureKind::Categorical { domain } => {
            let mut values: Vec<String> = domain.clone();
            let mut extra: Vec<String> = batch
                .examples()
                .iter()
                .filter_map(|ex| match ex.get(name) {
                    Some(Value::Cat(s)) if !domain.contains(s) => Some(s.clone()),
                    Some(Value::Num(x)) if !domain.contains(&x.to_string()) => Some(x.to_string()),
                    _ => None,
                })
                .collect();
            extra.sort();
            extra.dedup();
            values.extend(extra);
            for v in values {
                for cmp in [Comparator::Eq, Comparator::Neq] {
                    out.push(Condition {
                        feature: name.to_string(),
                        comparator: cmp,
                        value: Value::Cat(v.clone()),
                    });
                }
            }
        }
        FeatureKind::Numeric { .. } => {
            let mut xs: Vec<f64> = batch
                .examples()
                .iter()
                .filter_map(|ex| ex.get(name).and_then(Value::as_num))
                .collect();
            xs.sort_by(f64::total_cmp);
            xs.dedup();
            for w in xs.windows(2) {
                let m = (w[0] + w[1]) / 2.0;
                for cmp in [Comparator::Leq, Comparator::Gt] {
                    out.push(Condition {
                        feature: name.to_string(),
                        comparator: cmp,
                        value: Value::Num(m),
                    });
                }
            }
        }
    }
    out
}

/// Scores explanations on one batch from clause truth vectors.
pub(crate) struct Scorer<'a> {
    pub batch: &'a LabeledBatch,
    /// `true` where the batch label is the label of interest.
    pub flags: Vec<bool>,
}

impl<'a> Scorer<'a> {
    pub fn new(batch: &'a LabeledBatch) -> Self {
        Scorer {
            flags: batch.flags(),
            batch,
        }
    }

    pub fn truth(&self, clause: &ClauseTree) -> Result<Vec<bool>, ExecError> {
        self.batch
            .examples()
            .iter()
            .map(|ex| clause_holds(clause, ex))
            .collect()
    }

    /// Same counts as `executor::tally` for an explanation whose clause has
    /// truth vector `truth`.
    pub fn tally(&self, truth: &[bool], negated: bool, quantifier: Option<Quantifier>) -> Tally {
        let confidence = quantifier.map_or(1.0, Quantifier::confidence);
        let direction = if confidence >= 0.5 { !negated } else { negated };
        let mut t = Tally {
            total: truth.len(),
            ..Tally::default()
        };
        for (&applies, &y) in truth.iter().zip(&self.flags) {
            let pred = if applies { direction } else { !direction };
            let matched = pred == y;
            t.covered += applies as usize;
            t.matches += matched as usize;
            t.covered_matches += (applies && matched) as usize;
        }
        t
    }

    /// Empirical rate of the stated label where the clause fires, or `None`
    /// when it never fires.
    pub fn stated_rate(&self, truth: &[bool], negated: bool) -> Option<f64> {
        let mut fired = 0usize;
        let mut stated = 0usize;
        for (&applies, &y) in truth.iter().zip(&self.flags) {
            if applies {
                fired += 1;
                stated += (y != negated) as usize;
            }
        }
        (fired > 0).then(|| stated as f64 / fired as f64)
    }

    pub fn label(&self) -> &str {
        self.batch.label_of_interest()
    }

    pub fn explanation(&self, clause: ClauseTree, negated: bool, q: Option<Quantifier>) -> Explanation {
        Explanation {
            clause,
            quantifier: q,
            label: self.label().to_string(),
            label_negated: negated,
            target_name: None,
        }
    }
}
