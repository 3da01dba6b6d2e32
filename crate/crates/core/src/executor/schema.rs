use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ExecError;
use crate::explang::Value;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FeatureKind {
    Categorical { domain: Vec<String> },
    Numeric { min: f64, max: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: FeatureKind,
}

impl FeatureSpec {
    pub fn categorical(name: impl Into<String>, domain: &[&str]) -> Self {
        FeatureSpec {
            name: name.into(),
            kind: FeatureKind::Categorical {
                domain: domain.iter().map(|s| s.to_string()).collect(),
            },
        }
    }

    pub fn numeric(name: impl Into<String>, min: f64, max: f64) -> Self {
        FeatureSpec {
            name: name.into(),
            kind: FeatureKind::Numeric { min, max },
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self.kind, FeatureKind::Numeric { .. })
    }

    /// Whether `value` lies in this feature's domain or range.
    pub fn admits(&self, value: &Value) -> bool {
        match (&self.kind, value) {
            (FeatureKind::Numeric { min, max }, Value::Num(x)) => x >= min && x <= max,
            (FeatureKind::Categorical { domain }, Value::Cat(s)) => domain.contains(s),
            (FeatureKind::Categorical { domain }, Value::Num(x)) => {
                domain.contains(&x.to_string())
            }
            (FeatureKind::Numeric { .. }, Value::Cat(_)) => false,
        }
    }
}

/// Ordered, typed feature space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<FeatureSpec>", into = "Vec<FeatureSpec>")]
pub struct FeatureSchema {
    features: Vec<FeatureSpec>,
}

impl FeatureSchema {
    pub fn new(features: Vec<FeatureSpec>) -> Result<Self, ExecError> {
        for (i, f) in features.iter().enumerate() {
            if f.name.is_empty() || features[..i].iter().any(|g| g.name == f.name) {
                return Err(ExecError::InvalidSchema(format!(
                    "duplicate or empty feature name {:?}",
                    f.name
                )));
            }
            match &f.kind {
                FeatureKind::Categorical { domain } if domain.is_empty() => {
                    return Err(ExecError::InvalidSchema(format!(
                        "categorical feature {:?} has an empty domain",
                        f.name
                    )))
                }
                FeatureKind::Numeric { min, max } if min.partial_cmp(max) != Some(std::cmp::Ordering::Less) => {
                    return Err(ExecError::InvalidSchema(format!(
                        "numeric feature {:?} needs min < max, got [{min}, {max}]",
                        f.name
                    )))
                }
                _ => {}
            }
        }
        Ok(FeatureSchema { features })
    }

    pub fn features(&self) -> &[FeatureSpec] {
        &self.features
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.features.iter().map(|f| f.name.as_str())
    }

    pub fn get(&self, name: &str) -> Option<&FeatureSpec> {
        self.features.iter().find(|f| f.name == name)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    /// Sub-schema with the named features, kept in this schema's order.
    pub fn project(&self, names: &[&str]) -> Result<FeatureSchema, ExecError> {
        for n in names {
            if self.get(n).is_none() {
                return Err(ExecError::UnknownFeature(n.to_string()));
            }
        }
        FeatureSchema::new(
            self.features
                .iter()
                .filter(|f| names.contains(&f.name.as_str()))
                .cloned()
                .collect(),
        )
    }
}

impl TryFrom<Vec<FeatureSpec>> for FeatureSchema {
    type Error = ExecError;

    fn try_from(v: Vec<FeatureSpec>) -> Result<Self, Self::Error> {
        FeatureSchema::new(v)
    }
}

impl From<FeatureSchema> for Vec<FeatureSpec> {
    fn from(s: FeatureSchema) -> Self {
        s.features
    }
}

/// One row over a schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Example {
    pub values: BTreeMap<String, Value>,
}

impl Example {
    pub fn new<K: Into<String>, V: Into<Value>>(pairs: impl IntoIterator<Item = (K, V)>) -> Self {
        Example {
            values: pairs
                .into_iter()
                .map(|(k, v)| (k.into(), v.into()))
                .collect(),
        }
    }

    pub fn get(&self, feature: &str) -> Option<&Value> {
        self.values.get(feature)
    }

    /// Keys must equal the schema's names and every value must be admissible.
    pub fn validate(&self, schema: &FeatureSchema) -> Result<(), ExecError> {
        if self.values.len() != schema.len() {
            return Err(ExecError::InvalidExample(format!(
                "expected {} features, got {}",
                schema.len(),
                self.values.len()
            )));
        }
        for f in schema.features() {
            let v = self
                .values
                .get(&f.name)
                .ok_or_else(|| ExecError::InvalidExample(format!("missing feature {:?}", f.name)))?;
            if !f.admits(v) {
                return Err(ExecError::InvalidExample(format!(
                    "value {v} outside the domain of {:?}",
                    f.name
                )));
            }
        }
        Ok(())
    }

    /// Copy restricted to the schema's features.
    pub fn project(&self, schema: &FeatureSchema) -> Example {
        Example {
            values: schema
                .names()
                .filter_map(|n| self.values.get(n).map(|v| (n.to_string(), v.clone())))
                .collect(),
        }
    }
}
