use std::collections::BTreeMap;

use super::pool::{conditions_for_feature, Scorer};
use super::{Candidate, CandidateSet, SearchConfig, SearchError};
use crate::executor::{FeatureKind, LabeledBatch};
use crate::explang::{ClauseTree, Connective, Explanation, Quantifier, Value};

/// Attaches the quantifier whose confidence is nearest to the empirical rate
/// of the stated label where `clause` fires. A rate of exactly 1 needs no
/// quantifier.
pub fn fit_quantifier(
    clause: &ClauseTree,
    label_negated: bool,
    batch: &LabeledBatch,
) -> Result<Explanation, SearchError> {
    let scorer = Scorer::new(batch);
    let truth = scorer.truth(clause)?;
    let p = scorer
        .stated_rate(&truth, label_negated)
        .ok_or(SearchError::ZeroCoverage)?;
    Ok(scorer.explanation(clause.clone(), label_negated, fitted(p)))
}

fn fitted(p: f64) -> Option<Quantifier> {
    (p < 1.0).then(|| Quantifier::nearest(p))
}

/// Both label polarities of `clause`, each with and (optionally) without a
/// fitted quantifier.
fn variants(scorer: &Scorer<'_>, clause: &ClauseTree, truth: &[bool], fit: bool) -> Vec<Candidate> {
    let mut out = Vec::with_capacity(4);
    for negated in [false, true] {
        let mut quantifiers = vec![None];
        if fit {
            if let Some(q) = scorer.stated_rate(truth, negated).and_then(fitted) {
                quantifiers.push(Some(q));
            }
        }
        for q in quantifiers {
            let tally = scorer.tally(truth, negated, q);
            out.push(Candidate::new(scorer.explanation(clause.clone(), negated, q), tally));
        }
    }
    out
}

pub(crate) fn check_batch(batch: &LabeledBatch) -> Result<(), SearchError> {
    let flags = batch.flags();
    if !flags.iter().any(|&f| f) || !flags.iter().any(|&f| !f) {
        return Err(SearchError::DegenerateBatch);
    }
    Ok(())
}

/// Candidates for one feature, best first.
fn feature_pool(
    scorer: &Scorer<'_>,
    name: &str,
    kind: &FeatureKind,
    config: &SearchConfig,
) -> Result<Vec<Candidate>, SearchError> {
    let mut out = Vec::new();
    for cond in conditions_for_feature(name, kind, scorer.batch) {
        let clause = ClauseTree::Cond(cond);
        let truth = scorer.truth(&clause)?;
        out.extend(variants(scorer, &clause, &truth, config.quantifier_fitting));
    }
    Ok(CandidateSet::from_candidates(out).candidates)
}

/// Best single-condition explanation for every feature.
pub fn per_feature_search(batch: &LabeledBatch, config: &SearchConfig) -> Result<CandidateSet, SearchError> {
    check_batch(batch)?;
    let scorer = Scorer::new(batch);
    let mut winners = Vec::new();
    for spec in batch.schema().features() {
        if let Some(best) = feature_pool(&scorer, &spec.name, &spec.kind, config)?.into_iter().next() {
            winners.push(best);
        }
    }
    Ok(CandidateSet::from_candidates(winners))
}

fn entropy(counts: impl Iterator<Item = usize>, total: usize) -> f64 {
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / total as f64;
            -p * p.ln()
        })
        .sum()
}

/// Label information carried by a feature before any threshold is chosen:
/// raw values for categoricals, a median split for numerics.
fn information_gain(batch: &LabeledBatch, name: &str, kind: &FeatureKind) -> f64 {
    let flags = batch.flags();
    let n = flags.len();
    let pos = flags.iter().filter(|&&f| f).count();
    let h = entropy([pos, n - pos].into_iter(), n);
    let keys: Vec<String> = match kind {
        FeatureKind::Categorical { .. } => batch
            .examples()
            .iter()
            .map(|ex| ex.get(name).map(Value::to_string).unwrap_or_default())
            .collect(),
        FeatureKind::Numeric { .. } => {
            let xs: Vec<f64> = batch
                .examples()
                .iter()
                .map(|ex| ex.get(name).and_then(Value::as_num).unwrap_or(f64::NAN))
                .collect();
            let mut sorted = xs.clone();
            sorted.sort_by(f64::total_cmp);
            let median = sorted[(sorted.len() - 1) / 2];
            xs.iter().map(|&x| (x <= median).to_string()).collect()
        }
    };
    let mut groups: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for (k, &f) in keys.iter().zip(&flags) {
        let g = groups.entry(k.as_str()).or_default();
        g.0 += f as usize;
        g.1 += 1;
    }
    let conditional: f64 = groups
        .values()
        .map(|&(p, m)| m as f64 / n as f64 * entropy([p, m - p].into_iter(), m))
        .sum();
    h - conditional
}

/// Greedy left-to-right construction: commit to the feature with the highest
/// information gain, then take the best condition on that feature.
pub fn top1_search(batch: &LabeledBatch, config: &SearchConfig) -> Result<CandidateSet, SearchError> {
    check_batch(batch)?;
    let scorer = Scorer::new(batch);
    let mut order: Vec<(usize, f64)> = batch
        .schema()
        .features()
        .iter()
        .enumerate()
        .map(|(i, f)| (i, information_gain(batch, &f.name, &f.kind)))
        .collect();
    // Stable sort keeps schema order among equal gains.
    order.sort_by(|a, b| b.1.total_cmp(&a.1));
    for (i, _) in order {
        let spec = &batch.schema().features()[i];
        if let Some(best) = feature_pool(&scorer, &spec.name, &spec.kind, config)?.into_iter().next() {
            return Ok(CandidateSet::from_candidates(vec![best]));
        }
    }
    Ok(CandidateSet::default())
}

/// Beam over clause trees. Level one keeps the `beam_width` best single
/// conditions; level two extends each with AND/OR and a condition on a fresh
/// feature, keeping an extension only when it scores strictly higher than
/// its parent.
pub fn beam_conjunction_search(batch: &LabeledBatch, config: &SearchConfig) -> Result<CandidateSet, SearchError> {
    config.validate()?;
    check_batch(batch)?;
    let scorer = Scorer::new(batch);
    let mut pool = Vec::new();
    let mut truths = Vec::new();
    for spec in batch.schema().features() {
        for cond in conditions_for_feature(&spec.name, &spec.kind, batch) {
            let clause = ClauseTree::Cond(cond);
            let truth = scorer.truth(&clause)?;
            pool.extend(variants(&scorer, &clause, &truth, config.quantifier_fitting));
            truths.push((clause, truth));
        }
    }
    // One beam slot per partition of the batch. A clause, its complement and
    // their quantifier variants extend to De Morgan equivalent children, so
    // keeping more than one of them would only crowd out distinct parents.
    let mut beam: Vec<Candidate> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for c in CandidateSet::from_candidates(pool).candidates {
        if beam.len() == config.beam_width {
            break;
        }
        let mut truth = scorer.truth(&c.explanation.clause)?;
        if truth.first() == Some(&true) {
            truth.iter_mut().for_each(|t| *t = !*t);
        }
        if seen.insert(truth) {
            beam.push(c);
        }
    }
    if config.max_conjunction_depth < 2 {
        return Ok(CandidateSet::from_candidates(beam));
    }

    let mut next = beam.clone();
    for parent in &beam {
        let used = parent.explanation.clause.features();
        let parent_truth = scorer.truth(&parent.explanation.clause)?;
        for (clause, truth) in &truths {
            let ClauseTree::Cond(cond) = clause else { continue };
            if used.contains(&cond.feature.as_str()) {
                continue;
            }
            for op in [Connective::And, Connective::Or] {
                let joined: Vec<bool> = parent_truth
                    .iter()
                    .zip(truth)
                    .map(|(&a, &b)| match op {
                        Connective::And => a && b,
                        Connective::Or => a || b,
                    })
                    .collect();
                let extended = parent.explanation.clause.clone().join(op, clause.clone());
                let negated = parent.explanation.label_negated;
                let mut quantifiers = vec![None];
                if config.quantifier_fitting {
                    if let Some(q) = scorer.stated_rate(&joined, negated).and_then(fitted) {
                        quantifiers.push(Some(q));
                    }
                }
                for q in quantifiers {
                    let tally = scorer.tally(&joined, negated, q);
                    if tally.matches > parent.tally.matches {
                        next.push(Candidate::new(scorer.explanation(extended.clone(), negated, q), tally));
                    }
                }
            }
        }
    }
    let mut set = CandidateSet::from_candidates(next);
    set.candidates.truncate(config.beam_width);
    Ok(set)
}
