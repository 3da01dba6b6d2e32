use serde::{Deserialize, Serialize};

use super::{Example, ExecError, FeatureSchema};

/// Where a batch's labels came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum LabelKind {
    /// Outputs of the classifier being explained.
    Predicted,
    /// Ground-truth labels.
    Gold,
}

/// `"not " + label`.
pub fn negate_label(label: &str) -> String {
    format!("not {label}")
}

/// Flips a binary label relative to the label of interest.
pub fn complement(label: &str, label_of_interest: &str) -> String {
    if label == label_of_interest {
        negate_label(label_of_interest)
    } else {
        label_of_interest.to_string()
    }
}

/// Examples with arbitrary (possibly multi-class) labels.
#[derive(Debug, Clone, PartialEq)]
pub struct RawBatch {
    pub schema: FeatureSchema,
    pub examples: Vec<Example>,
    pub labels: Vec<String>,
    pub label_kind: LabelKind,
}

/// Examples with binary labels `{L, "not L"}` for a label of interest `L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledBatch {
    schema: FeatureSchema,
    examples: Vec<Example>,
    labels: Vec<String>,
    label_kind: LabelKind,
    label_of_interest: String,
}

impl LabeledBatch {
    pub fn new(
        schema: FeatureSchema,
        examples: Vec<Example>,
        labels: Vec<String>,
        label_kind: LabelKind,
        label_of_interest: impl Into<String>,
    ) -> Result<Self, ExecError> {
        let label_of_interest = label_of_interest.into();
        if examples.len() != labels.len() {
            return Err(ExecError::LengthMismatch {
                examples: examples.len(),
                labels: labels.len(),
            });
        }
        let negated = negate_label(&label_of_interest);
        if let Some(bad) = labels
            .iter()
            .find(|l| **l != label_of_interest && **l != negated)
        {
            return Err(ExecError::NonBinaryLabel(bad.clone()));
        }
        Ok(LabeledBatch {
            schema,
            examples,
            labels,
            label_kind,
            label_of_interest,
        })
    }

    /// Builds a batch from per-example flags (`true` = label of interest).
    pub fn from_flags(
        schema: FeatureSchema,
        examples: Vec<Example>,
        flags: &[bool],
        label_kind: LabelKind,
        label_of_interest: &str,
    ) -> Result<Self, ExecError> {
        let labels = flags
            .iter()
            .map(|&f| {
                if f {
                    label_of_interest.to_string()
                } else {
                    negate_label(label_of_interest)
                }
            })
            .collect();
        LabeledBatch::new(schema, examples, labels, label_kind, label_of_interest)
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    pub fn examples(&self) -> &[Example] {
        &self.examples
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_kind(&self) -> LabelKind {
        self.label_kind
    }

    pub fn label_of_interest(&self) -> &str {
        &self.label_of_interest
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    /// `true` where the label is the label of interest.
    pub fn flags(&self) -> Vec<bool> {
        self.labels
            .iter()
            .map(|l| *l == self.label_of_interest)
            .collect()
    }

    /// Smaller of the two class fractions.
    pub fn min_class_fraction(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let pos = self.flags().iter().filter(|&&f| f).count();
        let neg = self.len() - pos;
        pos.min(neg) as f64 / self.len() as f64
    }

    pub fn with_kind(mut self, kind: LabelKind) -> Self {
        self.label_kind = kind;
        self
    }

    /// Sub-batch of the given row indices, in that order.
    pub fn select(&self, indices: &[usize]) -> LabeledBatch {
        LabeledBatch {
            schema: self.schema.clone(),
            examples: indices.iter().map(|&i| self.examples[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i].clone()).collect(),
            label_kind: self.label_kind,
            label_of_interest: self.label_of_interest.clone(),
        }
    }

    /// Same examples, new labels.
    pub fn relabel(&self, labels: Vec<String>, kind: LabelKind) -> Result<LabeledBatch, ExecError> {
        LabeledBatch::new(
            self.schema.clone(),
            self.examples.clone(),
            labels,
            kind,
            self.label_of_interest.clone(),
        )
    }

    pub fn into_parts(self) -> (FeatureSchema, Vec<Example>, Vec<String>) {
        (self.schema, self.examples, self.labels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::executor::FeatureSpec;

    #[test]
    fn rejects_non_binary_and_ragged() {
        let s = FeatureSchema::new(vec![FeatureSpec::numeric("x", 0.0, 1.0)]).unwrap();
        let ex = vec![Example::new([("x", 0.5)])];
        assert!(matches!(
            LabeledBatch::new(s.clone(), ex.clone(), vec!["b".into()], LabelKind::Gold, "a"),
            Err(ExecError::NonBinaryLabel(_))
        ));
        assert!(matches!(
            LabeledBatch::new(s.clone(), ex.clone(), vec![], LabelKind::Gold, "a"),
            Err(ExecError::LengthMismatch { .. })
        ));
        let b = LabeledBatch::new(s, ex, vec!["not a".into()], LabelKind::Gold, "a").unwrap();
        assert_eq!(b.flags(), vec![false]);
    }

    #[test]
    fn complement_is_an_involution() {
        assert_eq!(complement("a", "a"), "not a");
        assert_eq!(complement("not a", "a"), "a");
        assert_eq!(complement(&complement("a", "a"), "a"), "a");
    }
}
