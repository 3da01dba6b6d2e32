use serde::{Serialize, Serializer};

use super::{complement, negate_label, Example, ExecError, LabelKind, LabeledBatch};
use crate::explang::{ClauseTree, Comparator, Condition, Connective, Explanation, Value};

/// Truth of one condition on one example. `Ngt` behaves as `Leq`, `Nlt` as `Geq`.
pub fn condition_holds(cond: &Condition, ex: &Example) -> Result<bool, ExecError> {
    let actual = ex
        .get(&cond.feature)
        .ok_or_else(|| ExecError::UnknownFeature(cond.feature.clone()))?;
    let mismatch = || ExecError::TypeMismatch {
        feature: cond.feature.clone(),
        comparator: cond.comparator,
    };
    match (actual, &cond.value) {
        (Value::Num(x), Value::Num(v)) => Ok(cond.comparator.eval_num(*x, *v)),
        (Value::Cat(s), v) => {
            let same = match v {
                Value::Cat(t) => s == t,
                // A categorical token such as "3" against a parsed literal 3.
                Value::Num(x) => *s == x.to_string(),
            };
            match cond.comparator {
                Comparator::Eq => Ok(same),
                Comparator::Neq => Ok(!same),
                _ => Err(mismatch()),
            }
        }
        (Value::Num(_), Value::Cat(_)) => Err(mismatch()),
    }
}

pub fn clause_holds(clause: &ClauseTree, ex: &Example) -> Result<bool, ExecError> {
    match clause {
        ClauseTree::Cond(c) => condition_holds(c, ex),
        ClauseTree::Node { op, left, right } => {
            // Both sides are evaluated so that type errors surface regardless
            // of short-circuiting.
            let l = clause_holds(left, ex)?;
            let r = clause_holds(right, ex)?;
            Ok(match op {
                Connective::And => l && r,
                Connective::Or => l || r,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub applies: bool,
    pub predicted_label: String,
}

/// Binary decision of an explanation: whether the clause fires and whether
/// the predicted label is the label of interest.
///
/// The quantifier only sets direction: below 0.5 confidence the stated label
/// is flipped where the clause fires. Non-firing examples get the complement
/// of the firing prediction.
pub fn decide(expl: &Explanation, ex: &Example, label_of_interest: &str) -> Result<(bool, bool), ExecError> {
    if expl.label != label_of_interest {
        return Err(ExecError::LabelMismatch {
            label: expl.label.clone(),
            label_of_interest: label_of_interest.to_string(),
        });
    }
    let applies = clause_holds(&expl.clause, ex)?;
    let stated_is_interest = !expl.label_negated;
    let direction = if expl.confidence() >= 0.5 {
        stated_is_interest
    } else {
        !stated_is_interest
    };
    Ok((applies, if applies { direction } else { !direction }))
}

pub fn apply_explanation(
    expl: &Explanation,
    ex: &Example,
    label_of_interest: &str,
) -> Result<Verdict, ExecError> {
    let (applies, is_interest) = decide(expl, ex, label_of_interest)?;
    let predicted_label = if is_interest {
        label_of_interest.to_string()
    } else {
        negate_label(label_of_interest)
    };
    debug_assert_eq!(
        complement(&complement(&predicted_label, label_of_interest), label_of_interest),
        predicted_label
    );
    Ok(Verdict {
        applies,
        predicted_label,
    })
}

/// Raw counts behind every metric.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub total: usize,
    pub covered: usize,
    pub matches: usize,
    pub covered_matches: usize,
}

impl Tally {
    pub fn match_rate(&self) -> f64 {
        ratio(self.matches, self.total)
    }

    pub fn coverage(&self) -> f64 {
        ratio(self.covered, self.total)
    }

    /// Match rate where the clause fires, 0 when it never fires.
    pub fn precision(&self) -> f64 {
        ratio(self.covered_matches, self.covered)
    }

    pub fn off_coverage_match_rate(&self) -> f64 {
        ratio(self.matches - self.covered_matches, self.total - self.covered)
    }

    pub fn merge(self, other: Tally) -> Tally {
        Tally {
            total: self.total + other.total,
            covered: self.covered + other.covered,
            matches: self.matches + other.matches,
            covered_matches: self.covered_matches + other.covered_matches,
        }
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Counts firing and matching examples of `expl` on `batch`.
pub fn tally(expl: &Explanation, batch: &LabeledBatch) -> Result<Tally, ExecError> {
    let l = batch.label_of_interest();
    let mut t = Tally::default();
    for (ex, label) in batch.examples().iter().zip(batch.labels()) {
        let (applies, is_interest) = decide(expl, ex, l)?;
        let matched = is_interest == (label == l);
        t.total += 1;
        t.covered += applies as usize;
        t.matches += matched as usize;
        t.covered_matches += (applies && matched) as usize;
    }
    Ok(t)
}

fn require(batch: &LabeledBatch, kind: LabelKind) -> Result<(), ExecError> {
    if batch.is_empty() {
        return Err(ExecError::EmptyBatch);
    }
    if batch.label_kind() != kind {
        return Err(ExecError::WrongLabelKind {
            expected: kind,
            found: batch.label_kind(),
        });
    }
    Ok(())
}

/// Agreement with the classifier's own predictions.
pub fn faithfulness(expl: &Explanation, batch: &LabeledBatch) -> Result<f64, ExecError> {
    require(batch, LabelKind::Predicted)?;
    Ok(tally(expl, batch)?.match_rate())
}

/// Agreement with gold labels on held-out examples.
pub fn simulatability(expl: &Explanation, batch: &LabeledBatch) -> Result<f64, ExecError> {
    require(batch, LabelKind::Gold)?;
    Ok(tally(expl, batch)?.match_rate())
}

/// `(coverage, precision)`; precision is 0 when coverage is 0.
pub fn coverage_precision(expl: &Explanation, batch: &LabeledBatch) -> Result<(f64, f64), ExecError> {
    if batch.is_empty() {
        return Err(ExecError::EmptyBatch);
    }
    let t = tally(expl, batch)?;
    Ok((t.coverage(), t.precision()))
}

fn round4<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64((x * 1e4).round() / 1e4)
}

fn round4_opt<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => round4(v, s),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalReport {
    #[serde(serialize_with = "round4")]
    pub faithfulness: f64,
    #[serde(serialize_with = "round4_opt")]
    pub simulatability: Option<f64>,
    #[serde(serialize_with = "round4")]
    pub coverage: f64,
    #[serde(serialize_with = "round4")]
    pub precision: f64,
}

impl EvalReport {
    /// Faithfulness, coverage and precision on `predictions`, plus
    /// simulatability when a gold batch is given.
    pub fn compute(
        expl: &Explanation,
        predictions: &LabeledBatch,
        gold: Option<&LabeledBatch>,
    ) -> Result<EvalReport, ExecError> {
        require(predictions, LabelKind::Predicted)?;
        let t = tally(expl, predictions)?;
        let simulatability = gold.map(|g| simulatability(expl, g)).transpose()?;
        Ok(EvalReport {
            faithfulness: t.match_rate(),
            simulatability,
            coverage: t.coverage(),
            precision: t.precision(),
        })
    }
}
