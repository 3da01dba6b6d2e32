use serde::{Deserialize, Serialize};

use crate::explang::Explanation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conjunction {
    None,
    /// One AND or OR.
    Simple,
    /// AND-OR or OR-AND over three conditions.
    Nested,
}

impl Conjunction {
    pub fn arity(self) -> usize {
        match self {
            Conjunction::None => 1,
            Conjunction::Simple => 2,
            Conjunction::Nested => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Negation {
    None,
    Clause,
    Label,
    ClauseAndLabel,
}

impl Negation {
    pub fn in_clause(self) -> bool {
        matches!(self, Negation::Clause | Negation::ClauseAndLabel)
    }

    pub fn in_label(self) -> bool {
        matches!(self, Negation::Label | Negation::ClauseAndLabel)
    }
}

/// One of the 2 x 3 x 4 task complexity classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ComplexityDescriptor {
    pub quantifier: bool,
    pub conjunction: Conjunction,
    pub negation: Negation,
}

impl ComplexityDescriptor {
    pub const SIMPLE: ComplexityDescriptor = ComplexityDescriptor {
        quantifier: false,
        conjunction: Conjunction::None,
        negation: Negation::None,
    };

    pub fn all() -> Vec<ComplexityDescriptor> {
        let mut out = Vec::with_capacity(24);
        for quantifier in [false, true] {
            for conjunction in [Conjunction::None, Conjunction::Simple, Conjunction::Nested] {
                for negation in [
                    Negation::None,
                    Negation::Clause,
                    Negation::Label,
                    Negation::ClauseAndLabel,
                ] {
                    out.push(ComplexityDescriptor {
                        quantifier,
                        conjunction,
                        negation,
                    });
                }
            }
        }
        out
    }

    /// Complexity class an explanation belongs to.
    pub fn of(expl: &Explanation) -> ComplexityDescriptor {
        let conjunction = match expl.clause.binary_nodes() {
            0 => Conjunction::None,
            1 => Conjunction::Simple,
            _ => Conjunction::Nested,
        };
        let negation = match (expl.clause.has_clause_negation(), expl.label_negated) {
            (false, false) => Negation::None,
            (true, false) => Negation::Clause,
            (false, true) => Negation::Label,
            (true, true) => Negation::ClauseAndLabel,
        };
        ComplexityDescriptor {
            quantifier: expl.quantifier.is_some(),
            conjunction,
            negation,
        }
    }

    /// Short tag such as `quant+nested+clause_label`.
    pub fn tag(&self) -> String {
        let q = if self.quantifier { "quant" } else { "plain" };
        let c = match self.conjunction {
            Conjunction::None => "single",
            Conjunction::Simple => "simple",
            Conjunction::Nested => "nested",
        };
        let n = match self.negation {
            Negation::None => "noneg",
            Negation::Clause => "clause",
            Negation::Label => "label",
            Negation::ClauseAndLabel => "clause_label",
        };
        format!("{q}+{c}+{n}")
    }

    pub fn from_tag(tag: &str) -> Option<ComplexityDescriptor> {
        ComplexityDescriptor::all().into_iter().find(|d| d.tag() == tag)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn exactly_24_distinct() {
        let all = ComplexityDescriptor::all();
        assert_eq!(all.len(), 24);
        assert_eq!(all.iter().collect::<HashSet<_>>().len(), 24);
        let tags: HashSet<String> = all.iter().map(|d| d.tag()).collect();
        assert_eq!(tags.len(), 24);
        for d in all {
            assert_eq!(ComplexityDescriptor::from_tag(&d.tag()), Some(d));
        }
    }

    #[test]
    fn classify_table_examples() {
        let e = crate::explang::parse("If szoj not equal to 3, then not 5").unwrap();
        let d = ComplexityDescriptor::of(&e);
        assert_eq!(d.negation, Negation::ClauseAndLabel);
        assert_eq!(d.conjunction, Conjunction::None);
        assert!(!d.quantifier);
    }
}
