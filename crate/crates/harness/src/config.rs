use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use faithex_core::explainer::{SearchConfig, Strategy};
use serde::{Deserialize, Serialize};

use crate::{ClassifierKind, HarnessError};

/// Explanation methods compared by the budget experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Lime,
    Anchors,
    Top1,
    Beam,
    #[serde(rename = "perfeat")]
    PerFeature,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Lime, Method::Anchors, Method::Top1, Method::Beam, Method::PerFeature];

    pub fn strategy(self) -> Option<Strategy> {
        match self {
            Method::Top1 => Some(Strategy::Top1),
            Method::Beam => Some(Strategy::Beam),
            Method::PerFeature => Some(Strategy::PerFeature),
            Method::Lime | Method::Anchors => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Method::Lime => "LIME",
            Method::Anchors => "Anchors",
            Method::Top1 => "TOP1",
            Method::Beam => "BEAM",
            Method::PerFeature => "PF",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lime" => Ok(Method::Lime),
            "anchors" => Ok(Method::Anchors),
            "top1" => Ok(Method::Top1),
            "beam" => Ok(Method::Beam),
            "perfeat" | "pf" | "per_feature" => Ok(Method::PerFeature),
            _ => Err(HarnessError::Config(format!("unknown method {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// CSV file; the built-in synthetic table when absent.
    pub dataset: Option<PathBuf>,
    pub synthetic_rows: usize,
    pub label_column: Option<String>,
    pub label_of_interest: Option<String>,
    pub classifier: ClassifierKind,
    /// Keep only the top features by mutual information; all when absent.
    pub num_features: Option<usize>,
    pub n_subsets: usize,
    pub subset_size: usize,
    pub budget: usize,
    pub methods: Vec<Method>,
    pub lime_perturbations: usize,
    pub anchors_pool: usize,
    pub anchors_precision: f64,
    pub beam_width: usize,
    pub max_conjunction_depth: usize,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let search = SearchConfig::default();
        ExperimentConfig {
            dataset: None,
            synthetic_rows: 3000,
            label_column: None,
            label_of_interest: None,
            classifier: ClassifierKind::default(),
            num_features: Some(5),
            n_subsets: 100,
            subset_size: 10,
            budget: 15,
            methods: Method::ALL.to_vec(),
            lime_perturbations: 1,
            anchors_pool: 5,
            anchors_precision: 0.95,
            beam_width: search.beam_width,
            max_conjunction_depth: search.max_conjunction_depth,
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    /// Reads TOML, or JSON when the file name ends in `.json`.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let config: ExperimentConfig = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text)?
        } else {
            toml::from_str(&text)?
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Config(m.to_string()));
        if self.subset_size < 2 {
            return bad("subset_size must be at least 2");
        }
        if self.n_subsets == 0 {
            return bad("n_subsets must be positive");
        }
        if self.methods.is_empty() {
            return bad("no methods configured");
        }
        if self.num_features == Some(0) {
            return bad("num_features must be positive");
        }
        if !(0.0..=1.0).contains(&self.anchors_precision) {
            return bad("anchors_precision must lie in [0, 1]");
        }
        self.search(Strategy::PerFeature).validate().map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn search(&self, strategy: Strategy) -> SearchConfig {
        SearchConfig {
            strategy,
            beam_width: self.beam_width,
            max_conjunction_depth: self.max_conjunction_depth,
            ..SearchConfig::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_partial_toml() {
        let c: ExperimentConfig = toml::from_str("seed = 7\nmethods = [\"perfeat\", \"lime\"]\n[classifier]\nkind = \"mlp\"\nhidden = 8\n").unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.methods, [Method::PerFeature, Method::Lime]);
        assert_eq!(c.classifier, ClassifierKind::Mlp { hidden: 8 });
        assert_eq!(c.n_subsets, 100);
        assert_eq!(c.budget, 15);
        assert!(toml::from_str::<ExperimentConfig>("sed = 1").is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = ExperimentConfig::default();
        let back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn validation() {
        assert!(ExperimentConfig { subset_size: 1, ..Default::default() }.validate().is_err());
        assert!(ExperimentConfig { methods: vec![], ..Default::default() }.validate().is_err());
        assert!(ExperimentConfig::default().validate().is_ok());
        assert_eq!("PF".parse::<Method>().unwrap(), Method::PerFeature);
    }
}
