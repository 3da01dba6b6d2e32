use rand::seq::{index, IndexedRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ComplexityDescriptor, Conjunction, TaskError};
use crate::executor::{
    complement, decide, negate_label, Example, FeatureKind, FeatureSchema, FeatureSpec, LabelKind,
    LabeledBatch, RawBatch,
};
use crate::explang::{ClauseTree, Comparator, Condition, Connective, Explanation, Quantifier, Value};
use crate::rng::{substream, Purpose};

/// Minimum share of each class in a generated training batch.
pub const MIN_CLASS_FRACTION: f64 = 0.10;

/// Nonsense label words, so that label semantics carry no signal.
pub const LABEL_WORDS: &[&str] = &[
    "blicket", "tupa", "fem", "dax", "wug", "toma", "zorp", "kiki", "bouba", "fep", "glorp",
    "mip", "zib", "lorp", "quax", "vorn", "snib", "taz", "yeb", "plim",
];

const VALUE_WORDS: &[&str] = &[
    "yes", "no", "africas", "antartica", "asias", "europes", "americas", "oceania", "red",
    "blue", "green", "amber", "north", "south", "east", "west", "low", "mid", "high", "alpha",
    "beta", "gamma",
];

/// Four-letter names that would collide with grammar keywords.
const RESERVED_NAMES: &[&str] = &["then", "less", "than"];

/// Quantifiers used for planted explanations. The boundary words (always,
/// never) are excluded since they add no label noise.
const PLANTED_QUANTIFIERS: &[Quantifier] = &[
    Quantifier::Certainly,
    Quantifier::Definitely,
    Quantifier::Usually,
    Quantifier::Generally,
    Quantifier::Likely,
    Quantifier::Often,
    Quantifier::Frequently,
    Quantifier::Sometimes,
    Quantifier::Occasionally,
    Quantifier::Rarely,
    Quantifier::Seldom,
];

const EXPLANATION_ROUNDS: u64 = 8;
const EXAMPLE_ROUNDS_PER_EXPLANATION: u64 = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticTask {
    pub schema: FeatureSchema,
    pub planted: Explanation,
    /// Labels play the role of the classifier's predictions.
    pub train: LabeledBatch,
    /// Held-out gold labels.
    pub test: LabeledBatch,
    pub descriptor: ComplexityDescriptor,
    pub seed: u64,
}

impl SyntheticTask {
    pub fn label_of_interest(&self) -> &str {
        &self.planted.label
    }
}

/// Random schema with four-letter lowercase feature names, roughly half
/// categorical (2-5 values) and half numeric (integer bounds).
pub fn sample_schema(num_features: usize, seed: u64) -> Result<FeatureSchema, TaskError> {
    if num_features == 0 {
        return Err(TaskError::InvalidArgument("num_features must be at least 1".into()));
    }
    let mut rng = substream(seed, Purpose::Schema, 0);
    let mut features: Vec<FeatureSpec> = Vec::with_capacity(num_features);
    while features.len() < num_features {
        let name: String = (0..4)
            .map(|_| char::from(b'a' + rng.random_range(0..26u8)))
            .collect();
        if RESERVED_NAMES.contains(&name.as_str()) || features.iter().any(|f| f.name == name) {
            continue;
        }
        let spec = if rng.random_bool(0.5) {
            let size = rng.random_range(2..=5);
            let domain: Vec<&str> = index::sample(&mut rng, VALUE_WORDS.len(), size)
                .into_iter()
                .map(|i| VALUE_WORDS[i])
                .collect();
            FeatureSpec::categorical(name, &domain)
        } else {
            let min = rng.random_range(0..=50) as f64;
            let span = rng.random_range(20..=2000) as f64;
            FeatureSpec::numeric(name, min, min + span)
        };
        features.push(spec);
    }
    Ok(FeatureSchema::new(features)?)
}

fn sample_condition(spec: &FeatureSpec, negated: bool, rng: &mut ChaCha8Rng) -> Condition {
    match &spec.kind {
        FeatureKind::Categorical { domain } => Condition {
            feature: spec.name.clone(),
            comparator: if negated { Comparator::Neq } else { Comparator::Eq },
            value: Value::Cat(domain.choose(rng).expect("non-empty domain").clone()),
        },
        FeatureKind::Numeric { min, max } => {
            // Central 80% of the range keeps the clause from being vacuous.
            let span = max - min;
            let lo = (min + 0.1 * span).ceil();
            let hi = (max - 0.1 * span).floor();
            let threshold = if lo <= hi {
                rng.random_range(lo as i64..=hi as i64) as f64
            } else {
                (min + max) / 2.0
            };
            let comparator = if negated {
                *[Comparator::Ngt, Comparator::Nlt].choose(rng).unwrap()
            } else {
                *[Comparator::Gt, Comparator::Lt, Comparator::Geq, Comparator::Leq]
                    .choose(rng)
                    .unwrap()
            };
            Condition {
                feature: spec.name.clone(),
                comparator,
                value: Value::Num(threshold),
            }
        }
    }
}

fn sample_explanation_with(
    descriptor: &ComplexityDescriptor,
    schema: &FeatureSchema,
    rng: &mut ChaCha8Rng,
) -> Result<Explanation, TaskError> {
    let arity = descriptor.conjunction.arity();
    if schema.len() < arity {
        return Err(TaskError::SchemaTooSmall {
            needed: arity,
            available: schema.len(),
        });
    }
    let picked = index::sample(rng, schema.len(), arity).into_vec();
    let negated = descriptor.negation.in_clause();
    let conds: Vec<Condition> = picked
        .iter()
        .map(|&i| sample_condition(&schema.features()[i], negated, rng))
        .collect();

    let ops: Vec<Connective> = match descriptor.conjunction {
        Conjunction::None => vec![],
        Conjunction::Simple => vec![*[Connective::And, Connective::Or].choose(rng).unwrap()],
        Conjunction::Nested => {
            if rng.random_bool(0.5) {
                vec![Connective::And, Connective::Or]
            } else {
                vec![Connective::Or, Connective::And]
            }
        }
    };
    let mut conds = conds.into_iter();
    let mut clause = ClauseTree::Cond(conds.next().expect("arity >= 1"));
    for (op, c) in ops.into_iter().zip(conds) {
        clause = clause.join(op, ClauseTree::Cond(c));
    }

    let quantifier = descriptor
        .quantifier
        .then(|| *PLANTED_QUANTIFIERS.choose(rng).unwrap());
    let label = LABEL_WORDS.choose(rng).unwrap().to_string();
    Ok(Explanation {
        clause,
        quantifier,
        label,
        label_negated: descriptor.negation.in_label(),
        target_name: None,
    })
}

/// Planted explanation of the requested complexity over `schema`.
pub fn sample_explanation(
    descriptor: &ComplexityDescriptor,
    schema: &FeatureSchema,
    seed: u64,
) -> Result<Explanation, TaskError> {
    sample_explanation_with(descriptor, schema, &mut substream(seed, Purpose::Explanation, 0))
}

/// Uniform draws over the schema. Numeric features with integer bounds get
/// integer values.
pub fn sample_examples(schema: &FeatureSchema, n: usize, rng: &mut ChaCha8Rng) -> Vec<Example> {
    (0..n)
        .map(|_| {
            Example::new(schema.features().iter().map(|f| {
                let v = match &f.kind {
                    FeatureKind::Categorical { domain } => {
                        Value::Cat(domain.choose(rng).expect("non-empty domain").clone())
                    }
                    FeatureKind::Numeric { min, max } => {
                        if min.fract() == 0.0 && max.fract() == 0.0 {
                            Value::Num(rng.random_range(*min as i64..=*max as i64) as f64)
                        } else {
                            Value::Num(rng.random_range(*min..=*max))
                        }
                    }
                };
                (f.name.clone(), v)
            }))
        })
        .collect()
}

/// Labels examples with the planted explanation.
///
/// Examples where the clause does not fire get the deterministic complement.
/// Where it fires, a quantifier with confidence `c` keeps the decision with
/// probability `max(c, 1 - c)`: exactly `round((1 - max(c, 1 - c)) * n_fired)`
/// uniformly chosen firing examples are flipped.
pub fn label_examples(
    planted: &Explanation,
    examples: &[Example],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<String>, TaskError> {
    let l = planted.label.as_str();
    let mut labels = Vec::with_capacity(examples.len());
    let mut fired = Vec::new();
    for (i, ex) in examples.iter().enumerate() {
        let (applies, is_interest) = decide(planted, ex, l)?;
        if applies {
            fired.push(i);
        }
        labels.push(if is_interest { l.to_string() } else { negate_label(l) });
    }
    if let Some(q) = planted.quantifier {
        let c = q.confidence();
        let keep = c.max(1.0 - c);
        let flips = ((1.0 - keep) * fired.len() as f64).round() as usize;
        for k in index::sample(rng, fired.len(), flips.min(fired.len())) {
            let i = fired[k];
            labels[i] = complement(&labels[i], l);
        }
    }
    Ok(labels)
}

fn balanced(labels: &[String], label: &str) -> bool {
    let pos = labels.iter().filter(|l| *l == label).count();
    let min = pos.min(labels.len() - pos);
    min as f64 >= MIN_CLASS_FRACTION * labels.len() as f64
}

/// Generates a task: schema, planted explanation, training batch that
/// satisfies the class-balance floor, and a held-out test batch.
pub fn generate_task(
    descriptor: ComplexityDescriptor,
    num_features: usize,
    n_train: usize,
    n_test: usize,
    seed: u64,
) -> Result<SyntheticTask, TaskError> {
    if n_train < 10 {
        return Err(TaskError::InvalidArgument(format!("n_train must be at least 10, got {n_train}")));
    }
    let schema = sample_schema(num_features, seed)?;
    let rounds = EXPLANATION_ROUNDS * EXAMPLE_ROUNDS_PER_EXPLANATION;
    for expl_round in 0..EXPLANATION_ROUNDS {
        let planted = sample_explanation_with(
            &descriptor,
            &schema,
            &mut substream(seed, Purpose::Explanation, expl_round),
        )?;
        for ex_round in 0..EXAMPLE_ROUNDS_PER_EXPLANATION {
            let round = expl_round * EXAMPLE_ROUNDS_PER_EXPLANATION + ex_round;
            let train_x = sample_examples(
                &schema,
                n_train,
                &mut substream(seed, Purpose::TrainExamples, round),
            );
            let mut noise = substream(seed, Purpose::Noise, round);
            let train_y = label_examples(&planted, &train_x, &mut noise)?;
            if !balanced(&train_y, &planted.label) {
                continue;
            }
            let test_x =
                sample_examples(&schema, n_test, &mut substream(seed, Purpose::TestExamples, round));
            let test_y = label_examples(&planted, &test_x, &mut noise)?;
            let l = planted.label.clone();
            return Ok(SyntheticTask {
                train: LabeledBatch::new(schema.clone(), train_x, train_y, LabelKind::Predicted, &l)?,
                test: LabeledBatch::new(schema.clone(), test_x, test_y, LabelKind::Gold, &l)?,
                schema,
                planted,
                descriptor,
                seed,
            });
        }
    }
    Err(TaskError::BalanceUnreachable {
        rounds: rounds as usize,
    })
}

/// Re-labels a multi-class batch as `{L, "not L"}`.
pub fn binarize(batch: &RawBatch, label_of_interest: &str) -> Result<LabeledBatch, TaskError> {
    let negated = negate_label(label_of_interest);
    if !batch.labels.iter().any(|l| l == label_of_interest) {
        return Err(TaskError::LabelAbsent(label_of_interest.to_string()));
    }
    let labels = batch
        .labels
        .iter()
        .map(|l| {
            if l == label_of_interest {
                l.clone()
            } else {
                negated.clone()
            }
        })
        .collect();
    Ok(LabeledBatch::new(
        batch.schema.clone(),
        batch.examples.clone(),
        labels,
        batch.label_kind,
        label_of_interest,
    )?)
}
