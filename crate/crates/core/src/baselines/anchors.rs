use serde::Serialize;

use super::{BaselineError, ClassifierHandle};
use crate::executor::{clause_holds, Example, FeatureKind, FeatureSchema};
use crate::explang::{ClauseTree, Comparator, Condition, Connective, Explanation, Value, MAX_BINARY_NODES};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnchorsOutcome {
    pub explanation: Explanation,
    /// Estimated precision of the rule on the labeled pool.
    pub precision: f64,
    /// Fraction of the pool the rule covers.
    pub coverage: f64,
    /// False when growth stopped before `precision_target` was met.
    pub reached_target: bool,
    pub calls: usize,
}

/// A clause that holds on every schema-admitted example.
fn tautology(schema: &FeatureSchema, anchor: &Example) -> Result<ClauseTree, BaselineError> {
    let first = schema.features().first().ok_or(crate::executor::ExecError::InvalidSchema(
        "empty schema".into(),
    ))?;
    if let Some(spec) = schema.features().iter().find(|s| s.is_numeric()) {
        let FeatureKind::Numeric { min, .. } = spec.kind else { unreachable!() };
        return Ok(Condition::new(&spec.name, Comparator::Geq, min)?.into());
    }
    let v = anchor.get(&first.name).cloned().unwrap_or(Value::Cat(String::new()));
    Ok(ClauseTree::from(Condition::new(&first.name, Comparator::Eq, v.clone())?)
        .join(Connective::Or, Condition::new(&first.name, Comparator::Neq, v)?.into()))
}

/// Conditions satisfied by the anchor, one or two per feature.
fn anchor_conditions(schema: &FeatureSchema, anchor: &Example) -> Result<Vec<Condition>, BaselineError> {
    let mut out = Vec::new();
    for spec in schema.features() {
        let Some(v) = anchor.get(&spec.name) else { continue };
        match (&spec.kind, v) {
            (FeatureKind::Numeric { .. }, Value::Num(x)) => {
                out.push(Condition::new(&spec.name, Comparator::Leq, *x)?);
                out.push(Condition::new(&spec.name, Comparator::Geq, *x)?);
            }
            _ => out.push(Condition::new(&spec.name, Comparator::Eq, v.clone())?),
        }
    }
    Ok(out)
}

/// Greedy rule growth around one anchor example.
///
/// The pool is labeled through the metered classifier. The anchor's own
/// prediction is given. Conditions are added one at a time, each time the one
/// with the highest precision on the pool (then coverage, then schema order),
/// until the precision target is met, features run out, or the clause reaches
/// the grammar's size limit. An empty rule is rendered as a tautology.
pub fn anchors_budgeted(
    anchor: &Example,
    anchor_prediction: &str,
    schema: &FeatureSchema,
    pool: &[Example],
    classifier: &ClassifierHandle,
    precision_target: f64,
    label_of_interest: &str,
) -> Result<AnchorsOutcome, BaselineError> {
    classifier.ensure_remaining(pool.len())?;
    let agrees: Vec<bool> = pool
        .iter()
        .map(|e| classifier.predict(e).map(|l| l == anchor_prediction))
        .collect::<Result<_, _>>()?;

    let score = |covered: &[bool]| {
        let n = covered.iter().filter(|&&c| c).count();
        let hits = covered.iter().zip(&agrees).filter(|(&c, &a)| c && a).count();
        let precision = if n == 0 { 0.0 } else { hits as f64 / n as f64 };
        let coverage = if pool.is_empty() { 1.0 } else { n as f64 / pool.len() as f64 };
        (precision, coverage)
    };

    let mut covered = vec![true; pool.len()];
    let (mut precision, mut coverage) = score(&covered);
    let mut chosen: Vec<Condition> = Vec::new();
    let mut candidates = anchor_conditions(schema, anchor)?;
    while precision < precision_target && chosen.len() <= MAX_BINARY_NODES && !candidates.is_empty() {
        let mut best: Option<(usize, Vec<bool>, f64, f64)> = None;
        for (i, cond) in candidates.iter().enumerate() {
            let next: Vec<bool> = pool
                .iter()
                .zip(&covered)
                .map(|(e, &c)| Ok(c && clause_holds(&ClauseTree::Cond(cond.clone()), e)?))
                .collect::<Result<_, BaselineError>>()?;
            let (p, c) = score(&next);
            if best.as_ref().is_none_or(|b| p > b.2 || (p == b.2 && c > b.3)) {
                best = Some((i, next, p, c));
            }
        }
        let (i, next, p, c) = best.expect("non-empty candidates");
        let cond = candidates.remove(i);
        candidates.retain(|c| c.feature != cond.feature);
        chosen.push(cond);
        covered = next;
        precision = p;
        coverage = c;
    }

    let clause = match chosen.split_first() {
        None => tautology(schema, anchor)?,
        Some((first, rest)) => rest.iter().fold(ClauseTree::Cond(first.clone()), |acc, c| {
            acc.join(Connective::And, ClauseTree::Cond(c.clone()))
        }),
    };
    let explanation = Explanation::new(clause, label_of_interest)?.negated(anchor_prediction != label_of_interest);
    Ok(AnchorsOutcome {
        explanation,
        precision,
        coverage,
        reached_target: precision >= precision_target,
        calls: pool.len(),
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::executor::{decide, FeatureSpec};
    use crate::rng::{substream, Purpose};
    use crate::taskforge::sample_examples;

    fn schema() -> FeatureSchema {
        FeatureSchema::new(vec![
            FeatureSpec::categorical("fone", &["a", "b", "c"]),
            FeatureSpec::categorical("ftwo", &["x", "y"]),
            FeatureSpec::numeric("fthr", 0.0, 100.0),
        ])
        .unwrap()
    }

    fn rule() -> ClassifierHandle {
        ClassifierHandle::new(
            Arc::new(|e: &Example| {
                if e.get("fone") == Some(&Value::from("a")) { "pos" } else { "neg" }.to_string()
            }),
            1000,
        )
    }

    #[test]
    fn recovers_single_feature_rule() {
        let mut found = 0;
        for seed in 0..20 {
            let mut rng = substream(seed, Purpose::TrainExamples, 0);
            let mut examples = sample_examples(&schema(), 31, &mut rng);
            let anchor = examples.pop().unwrap();
            let h = rule();
            if !examples.iter().any(|e| h.predict_unmetered(e).unwrap() == "pos") {
                continue;
            }
            let pred = h.predict_unmetered(&anchor).unwrap();
            let out = anchors_budgeted(&anchor, &pred, &schema(), &examples, &h, 1.0, "pos").unwrap();
            assert!(out.reached_target);
            if pred == "pos" {
                assert_eq!(out.explanation.clause.features(), vec!["fone"], "seed {seed}");
                found += 1;
            }
            // The rule covers the anchor and predicts its label.
            let (applies, is_pos) = decide(&out.explanation, &anchor, "pos").unwrap();
            assert!(applies);
            assert_eq!(is_pos, pred == "pos");
        }
        assert!(found >= 3);
    }

    #[test]
    fn zero_target_gives_full_coverage() {
        let mut rng = substream(4, Purpose::TrainExamples, 0);
        let examples = sample_examples(&schema(), 6, &mut rng);
        let h = rule();
        let out = anchors_budgeted(&examples[0], "neg", &schema(), &examples[1..], &h, 0.0, "pos").unwrap();
        assert_eq!(out.coverage, 1.0);
        assert!(out.reached_target);
        for e in &examples {
            assert!(clause_holds(&out.explanation.clause, e).unwrap());
        }
        let cat_only = FeatureSchema::new(vec![FeatureSpec::categorical("fone", &["a", "b"])]).unwrap();
        let anchor = Example::new([("fone", "b")]);
        let out = anchors_budgeted(&anchor, "neg", &cat_only, &[], &h, 0.0, "pos").unwrap();
        assert!(clause_holds(&out.explanation.clause, &Example::new([("fone", "a")])).unwrap());
        assert!(clause_holds(&out.explanation.clause, &anchor).unwrap());
    }

    #[test]
    fn pool_of_five_spends_five() {
        let mut rng = substream(5, Purpose::TrainExamples, 0);
        let examples = sample_examples(&schema(), 6, &mut rng);
        let h = rule().with_budget(15);
        let out = anchors_budgeted(&examples[0], "neg", &schema(), &examples[1..], &h, 0.95, "pos").unwrap();
        assert_eq!(out.calls, 5);
        assert_eq!(h.budget().used, 5);
        assert!(out.explanation.clause.num_conditions() <= MAX_BINARY_NODES + 1);

        let small = rule().with_budget(4);
        assert!(matches!(
            anchors_budgeted(&examples[0], "neg", &schema(), &examples[1..], &small, 0.95, "pos"),
            Err(BaselineError::BudgetExhausted { .. })
        ));
        assert_eq!(small.budget().used, 0);
    }

    #[test]
    fn unreachable_target_is_flagged() {
        // Pool labels disagree with the anchor's prediction on every example.
        let examples: Vec<Example> = (0..5).map(|_| Example::new([("fone", "b")])).collect();
        let s = FeatureSchema::new(vec![FeatureSpec::categorical("fone", &["a", "b"])]).unwrap();
        let anchor = Example::new([("fone", "b")]);
        let out = anchors_budgeted(&anchor, "pos", &s, &examples, &rule(), 0.9, "pos").unwrap();
        assert!(!out.reached_target);
        assert_eq!(out.precision, 0.0);
    }
}
