use super::TaskError;
use crate::executor::{Example, FeatureKind, FeatureSchema, LabelKind, LabeledBatch};
use crate::explang::Value;

const TERMINATOR: &str = "explanation:";

/// One `f1: v1 | f2: v2 | ... | label: y` line per example in schema order,
/// then a final `explanation:` line.
pub fn linearize(batch: &LabeledBatch) -> String {
    let mut out = String::new();
    for (ex, y) in batch.examples().iter().zip(batch.labels()) {
        for name in batch.schema().names() {
            let v = ex.get(name).map(Value::to_string).unwrap_or_default();
            out.push_str(name);
            out.push_str(": ");
            out.push_str(&v);
            out.push_str(" | ");
        }
        out.push_str("label: ");
        out.push_str(y);
        out.push('\n');
    }
    out.push_str(TERMINATOR);
    out
}

/// Inverse of [`linearize`] given the schema the batch was drawn over.
pub fn delinearize(
    text: &str,
    schema: &FeatureSchema,
    label_kind: LabelKind,
    label_of_interest: &str,
) -> Result<LabeledBatch, TaskError> {
    let lines: Vec<&str> = text.lines().collect();
    let malformed = |line: usize, msg: String| TaskError::Malformed { line: line + 1, msg };
    match lines.last() {
        Some(&TERMINATOR) => {}
        _ => return Err(malformed(lines.len().saturating_sub(1), format!("missing {TERMINATOR:?}"))),
    }
    let mut examples = Vec::new();
    let mut labels = Vec::new();
    for (i, line) in lines[..lines.len() - 1].iter().enumerate() {
        let fields: Vec<&str> = line.split(" | ").collect();
        if fields.len() != schema.len() + 1 {
            return Err(malformed(i, format!("expected {} fields, got {}", schema.len() + 1, fields.len())));
        }
        let mut values = Vec::with_capacity(schema.len());
        for (spec, field) in schema.features().iter().zip(&fields) {
            let (name, raw) = field
                .split_once(": ")
                .ok_or_else(|| malformed(i, format!("field {field:?} lacks \": \"")))?;
            if name != spec.name {
                return Err(malformed(i, format!("expected feature {:?}, got {name:?}", spec.name)));
            }
            let v = match spec.kind {
                FeatureKind::Numeric { .. } => Value::Num(
                    raw.parse()
                        .map_err(|_| malformed(i, format!("{raw:?} is not a number")))?,
                ),
                FeatureKind::Categorical { .. } => Value::Cat(raw.to_string()),
            };
            values.push((name.to_string(), v));
        }
        let label = fields[schema.len()]
            .strip_prefix("label: ")
            .ok_or_else(|| malformed(i, "missing label field".into()))?;
        examples.push(Example::new(values));
        labels.push(label.to_string());
    }
    Ok(LabeledBatch::new(
        schema.clone(),
        examples,
        labels,
        label_kind,
        label_of_interest,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::executor::FeatureSpec;
    use crate::taskforge::{generate_task, ComplexityDescriptor};
    use proptest::prelude::*;

    #[test]
    fn line_layout() {
        let schema = FeatureSchema::new(vec![
            FeatureSpec::numeric("pdsu", 0.0, 2000.0),
            FeatureSpec::categorical("hxva", &["africas", "asias"]),
        ])
        .unwrap();
        let ex = Example::new([("pdsu", Value::Num(1014.0)), ("hxva", Value::from("asias"))]);
        let b = LabeledBatch::new(schema, vec![ex], vec!["no".into()], LabelKind::Predicted, "no").unwrap();
        let text = linearize(&b);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines, ["pdsu: 1014 | hxva: asias | label: no", "explanation:"]);
        assert_eq!(lines[0].matches('|').count(), 2);
    }

    #[test]
    fn ten_examples_eleven_lines() {
        let t = generate_task(ComplexityDescriptor::SIMPLE, 5, 10, 0, 4).unwrap();
        assert_eq!(linearize(&t.train).lines().count(), 11);
    }

    #[test]
    fn rejects_garbage() {
        let schema = FeatureSchema::new(vec![FeatureSpec::numeric("x", 0.0, 1.0)]).unwrap();
        assert!(delinearize("x: 1 | label: a", &schema, LabelKind::Gold, "a").is_err());
        assert!(delinearize("x: q | label: a\nexplanation:", &schema, LabelKind::Gold, "a").is_err());
        assert!(delinearize("y: 1 | label: a\nexplanation:", &schema, LabelKind::Gold, "a").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn round_trip(seed in 0u64..10_000, d in 0usize..24, n in 10usize..40) {
            let t = generate_task(ComplexityDescriptor::all()[d], 5, n, 0, seed).unwrap();
            let text = linearize(&t.train);
            let back = delinearize(&text, &t.schema, LabelKind::Predicted, t.label_of_interest()).unwrap();
            prop_assert_eq!(back, t.train);
        }
    }
}
