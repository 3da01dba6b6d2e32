use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ExplangError, Quantifier};

/// Comparison between a feature and a value.
///
/// `Ngt` and `Nlt` evaluate like `Leq` and `Geq` but keep their own surface
/// forms ("not greater than", "not lesser than").
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Comparator {
    Eq,
    Neq,
    Gt,
    Lt,
    Geq,
    Leq,
    Ngt,
    Nlt,
}

impl Comparator {
    pub const ALL: [Comparator; 8] = [
        Comparator::Eq,
        Comparator::Neq,
        Comparator::Gt,
        Comparator::Lt,
        Comparator::Geq,
        Comparator::Leq,
        Comparator::Ngt,
        Comparator::Nlt,
    ];

    /// Canonical surface phrase.
    pub fn phrase(self) -> &'static str {
        match self {
            Comparator::Eq => "equal to",
            Comparator::Neq => "not equal to",
            Comparator::Gt => "greater than",
            Comparator::Lt => "lesser than",
            Comparator::Geq => "greater than or equal to",
            Comparator::Leq => "lesser than or equal to",
            Comparator::Ngt => "not greater than",
            Comparator::Nlt => "not lesser than",
        }
    }

    /// Ordering comparators only make sense against numbers.
    pub fn requires_numeric(self) -> bool {
        !matches!(self, Comparator::Eq | Comparator::Neq)
    }

    /// Comparators that carry a surface negation ("not ...").
    pub fn is_negated(self) -> bool {
        matches!(self, Comparator::Neq | Comparator::Ngt | Comparator::Nlt)
    }

    pub fn eval_num(self, x: f64, v: f64) -> bool {
        match self {
            Comparator::Eq => x == v,
            Comparator::Neq => x != v,
            Comparator::Gt => x > v,
            Comparator::Lt => x < v,
            Comparator::Geq | Comparator::Nlt => x >= v,
            Comparator::Leq | Comparator::Ngt => x <= v,
        }
    }

    /// Comparator with the same truth table and no surface negation.
    pub fn affirmative_form(self) -> Comparator {
        match self {
            Comparator::Ngt => Comparator::Leq,
            Comparator::Nlt => Comparator::Geq,
            c => c,
        }
    }
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.phrase())
    }
}

/// A feature value: a number or a categorical token.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Num(f64),
    Cat(String),
}

impl Value {
    /// Interprets a surface token: plain decimal literals become numbers,
    /// everything else stays categorical text.
    pub fn from_token(token: &str) -> Value {
        if is_numeric_literal(token) {
            if let Ok(x) = token.parse::<f64>() {
                if x.is_finite() {
                    return Value::Num(x);
                }
            }
        }
        Value::Cat(token.to_string())
    }

    pub fn as_num(&self) -> Option<f64> {
        match self {
            Value::Num(x) => Some(*x),
            Value::Cat(_) => None,
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, Value::Num(_))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // f64's Display is the shortest round-tripping form, no trailing zeros.
            Value::Num(x) => write!(f, "{x}"),
            Value::Cat(s) => f.write_str(s),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Cat(s.to_string())
    }
}

/// `[+-]?digits[.digits]?([eE][+-]?digits)?` or `[+-]?.digits...`
pub(crate) fn is_numeric_literal(s: &str) -> bool {
    let b = s.as_bytes();
    let mut i = 0;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    let int_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    let mut digits = i - int_start;
    if i < b.len() && b[i] == b'.' {
        i += 1;
        let frac_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        digits += i - frac_start;
    }
    if digits == 0 {
        return false;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        i += 1;
        if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
            i += 1;
        }
        let exp_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        if i == exp_start {
            return false;
        }
    }
    i == b.len()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub feature: String,
    pub comparator: Comparator,
    pub value: Value,
}

impl Condition {
    pub fn new(
        feature: impl Into<String>,
        comparator: Comparator,
        value: impl Into<Value>,
    ) -> Result<Self, ExplangError> {
        let cond = Condition {
            feature: feature.into(),
            comparator,
            value: value.into(),
        };
        cond.validate()?;
        Ok(cond)
    }

    pub fn validate(&self) -> Result<(), ExplangError> {
        if self.feature.trim().is_empty() {
            return Err(ExplangError::EmptyFeature);
        }
        if self.comparator.requires_numeric() && !self.value.is_numeric() {
            return Err(ExplangError::NonNumericValue {
                comparator: self.comparator,
                value: self.value.to_string(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.feature, self.comparator, self.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Connective {
    And,
    Or,
}

impl Connective {
    pub fn keyword(self) -> &'static str {
        match self {
            Connective::And => "AND",
            Connective::Or => "OR",
        }
    }
}

/// Boolean combination of conditions, at most two binary nodes deep.
///
/// Surface text is read left-associatively, so builders should nest on the
/// left: `((c1 AND c2) OR c3)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ClauseTree {
    Cond(Condition),
    Node {
        op: Connective,
        left: Box<ClauseTree>,
        right: Box<ClauseTree>,
    },
}

/// Maximum number of binary nodes in a clause.
pub const MAX_BINARY_NODES: usize = 2;

impl ClauseTree {
    pub fn join(self, op: Connective, right: ClauseTree) -> ClauseTree {
        ClauseTree::Node {
            op,
            left: Box::new(self),
            right: Box::new(right),
        }
    }

    /// Conditions in left-to-right order.
    pub fn conditions(&self) -> Vec<&Condition> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect<'a>(&'a self, out: &mut Vec<&'a Condition>) {
        match self {
            ClauseTree::Cond(c) => out.push(c),
            ClauseTree::Node { left, right, .. } => {
                left.collect(out);
                right.collect(out);
            }
        }
    }

    pub fn num_conditions(&self) -> usize {
        match self {
            ClauseTree::Cond(_) => 1,
            ClauseTree::Node { left, right, .. } => left.num_conditions() + right.num_conditions(),
        }
    }

    pub fn binary_nodes(&self) -> usize {
        self.num_conditions() - 1
    }

    /// Connectives in surface order.
    pub fn connectives(&self) -> Vec<Connective> {
        let mut out = Vec::new();
        fn walk(t: &ClauseTree, out: &mut Vec<Connective>) {
            if let ClauseTree::Node { op, left, right } = t {
                walk(left, out);
                out.push(*op);
                walk(right, out);
            }
        }
        walk(self, &mut out);
        out
    }

    pub fn has_clause_negation(&self) -> bool {
        self.conditions().iter().any(|c| c.comparator.is_negated())
    }

    pub fn features(&self) -> Vec<&str> {
        self.conditions().iter().map(|c| c.feature.as_str()).collect()
    }

    /// Replaces `Ngt`/`Nlt` by their affirmative twins.
    pub fn affirmative(&self) -> ClauseTree {
        match self {
            ClauseTree::Cond(c) => ClauseTree::Cond(Condition {
                comparator: c.comparator.affirmative_form(),
                ..c.clone()
            }),
            ClauseTree::Node { op, left, right } => ClauseTree::Node {
                op: *op,
                left: Box::new(left.affirmative()),
                right: Box::new(right.affirmative()),
            },
        }
    }

    pub fn validate(&self) -> Result<(), ExplangError> {
        if self.binary_nodes() > MAX_BINARY_NODES {
            return Err(ExplangError::TooDeep(self.binary_nodes()));
        }
        for c in self.conditions() {
            c.validate()?;
        }
        Ok(())
    }
}

impl From<Condition> for ClauseTree {
    fn from(c: Condition) -> Self {
        ClauseTree::Cond(c)
    }
}

impl fmt::Display for ClauseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClauseTree::Cond(c) => write!(f, "{c}"),
            ClauseTree::Node { op, left, right } => {
                write!(f, "{left} {} {right}", op.keyword())
            }
        }
    }
}

/// An if-then explanation of a classifier's behaviour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    pub clause: ClauseTree,
    pub quantifier: Option<Quantifier>,
    pub label: String,
    pub label_negated: bool,
    pub target_name: Option<String>,
}

impl Explanation {
    pub fn new(
        clause: impl Into<ClauseTree>,
        label: impl Into<String>,
    ) -> Result<Self, ExplangError> {
        let e = Explanation {
            clause: clause.into(),
            quantifier: None,
            label: label.into(),
            label_negated: false,
            target_name: None,
        };
        e.validate()?;
        Ok(e)
    }

    pub fn with_quantifier(mut self, q: Option<Quantifier>) -> Self {
        self.quantifier = q;
        self
    }

    pub fn negated(mut self, negated: bool) -> Self {
        self.label_negated = negated;
        self
    }

    pub fn with_target(mut self, target: Option<String>) -> Self {
        self.target_name = target;
        self
    }

    /// Confidence of the quantifier, 1.0 when there is none.
    pub fn confidence(&self) -> f64 {
        self.quantifier.map_or(1.0, Quantifier::confidence)
    }

    pub fn validate(&self) -> Result<(), ExplangError> {
        self.clause.validate()?;
        let label = self.label.trim();
        if label.is_empty() {
            return Err(ExplangError::EmptyLabel);
        }
        if label.len() >= 4 && label[..4].eq_ignore_ascii_case("not ") {
            return Err(ExplangError::NegatedLabelText(self.label.clone()));
        }
        Ok(())
    }
}
