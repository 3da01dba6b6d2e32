//! Small built-in classifiers trained deterministically from a seed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use faithex_core::baselines::{BaselineError, Classifier, ClassifierHandle};
use faithex_core::executor::{Example, FeatureKind, FeatureSchema};
use faithex_core::explang::Value;
use faithex_core::rng::{substream, Purpose};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Dataset, HarnessError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassifierKind {
    Logistic,
    Tree { max_depth: usize },
    Mlp { hidden: usize },
}

impl Default for ClassifierKind {
    fn default() -> Self {
        ClassifierKind::Tree { max_depth: 3 }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassifierKind::Logistic => write!(f, "logistic"),
            ClassifierKind::Tree { max_depth } => write!(f, "tree:{max_depth}"),
            ClassifierKind::Mlp { hidden } => write!(f, "mlp:{hidden}"),
        }
    }
}

/// `logistic`, `tree[:depth]` or `mlp[:hidden]`.
impl FromStr for ClassifierKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let num = |default: usize| -> Result<usize, HarnessError> {
            arg.map_or(Ok(default), |a| a.parse().map_err(|_| HarnessError::UnsupportedKind(s.to_string())))
        };
        match name {
            "logistic" if arg.is_none() => Ok(ClassifierKind::Logistic),
            "tree" => Ok(ClassifierKind::Tree { max_depth: num(3)? }),
            "mlp" => Ok(ClassifierKind::Mlp { hidden: num(16)? }),
            _ => Err(HarnessError::UnsupportedKind(s.to_string())),
        }
    }
}

/// One-hot categoricals and standardized numerics.
#[derive(Debug, Clone)]
struct Encoder {
    columns: Vec<Column>,
}

#[derive(Debug, Clone)]
enum Column {
    Numeric { feature: String, mean: f64, sd: f64 },
    OneHot { feature: String, value: String },
}

impl Encoder {
    fn fit(schema: &FeatureSchema, examples: &[Example]) -> Encoder {
        let mut columns = Vec::new();
        for spec in schema.features() {
            match &spec.kind {
                FeatureKind::Numeric { .. } => {
                    let xs: Vec<f64> = examples
                        .iter()
                        .filter_map(|e| e.get(&spec.name).and_then(Value::as_num))
                        .collect();
                    let n = xs.len().max(1) as f64;
                    let mean = xs.iter().sum::<f64>() / n;
                    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
                    columns.push(Column::Numeric {
                        feature: spec.name.clone(),
                        mean,
                        sd: if var > 0.0 { var.sqrt() } else { 1.0 },
                    });
                }
                FeatureKind::Categorical { domain } => {
                    for v in domain {
                        columns.push(Column::OneHot {
                            feature: spec.name.clone(),
                            value: v.clone(),
                        });
                    }
                }
            }
        }
        Encoder { columns }
    }

    fn width(&self) -> usize {
        self.columns.len()
    }

    fn row(&self, ex: &Example) -> Vec<f64> {
        self.columns
            .iter()
            .map(|c| match c {
                Column::Numeric { feature, mean, sd } => {
                    ex.get(feature).and_then(Value::as_num).map_or(0.0, |x| (x - mean) / sd)
                }
                Column::OneHot { feature, value } => {
                    let hit = ex.get(feature).is_some_and(|v| v.to_string() == *value);
                    f64::from(u8::from(hit))
                }
            })
            .collect()
    }

    fn matrix(&self, examples: &[Example]) -> DMatrix<f64> {
        let rows: Vec<Vec<f64>> = examples.iter().map(|e| self.row(e)).collect();
        DMatrix::from_fn(rows.len(), self.width(), |i, j| rows[i][j])
    }
}

fn softmax_rows(z: &mut DMatrix<f64>) {
    for mut row in z.row_iter_mut() {
        let m = row.max();
        row.apply(|v| *v = (*v - m).exp());
        let s = row.sum();
        row /= s;
    }
}

fn one_hot_targets(labels: &[usize], classes: usize) -> DMatrix<f64> {
    DMatrix::from_fn(labels.len(), classes, |i, j| f64::from(u8::from(labels[i] == j)))
}

fn argmax(row: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (j, v) in row.enumerate() {
        if v > best.1 {
            best = (j, v);
        }
    }
    best.0
}

#[derive(Debug, Clone)]
struct Softmax {
    w: DMatrix<f64>,
    b: DVector<f64>,
}

impl Softmax {
    fn fit(x: &DMatrix<f64>, y: &[usize], classes: usize, epochs: usize, lr: f64) -> Softmax {
        let (n, d) = x.shape();
        let t = one_hot_targets(y, classes);
        let mut w = DMatrix::zeros(d, classes);
        let mut b = DVector::zeros(classes);
        for _ in 0..epochs {
            let mut p = x * &w;
            for mut row in p.row_iter_mut() {
                row += b.transpose();
            }
            softmax_rows(&mut p);
            let g = (p - &t) / n as f64;
            w -= lr * (x.transpose() * &g);
            b -= lr * g.row_sum().transpose();
        }
        Softmax { w, b }
    }

    fn predict(&self, row: &[f64]) -> usize {
        let x = DVector::from_row_slice(row);
        argmax((self.w.transpose() * x + &self.b).iter().copied())
    }
}

#[derive(Debug, Clone)]
struct Mlp {
    w1: DMatrix<f64>,
    b1: DVector<f64>,
    w2: DMatrix<f64>,
    b2: DVector<f64>,
}

impl Mlp {
    fn fit(x: &DMatrix<f64>, y: &[usize], classes: usize, hidden: usize, seed: u64) -> Mlp {
        let (n, d) = x.shape();
        let mut rng = substream(seed, Purpose::ModelInit, 0);
        let s1 = 1.0 / (d.max(1) as f64).sqrt();
        let s2 = 1.0 / (hidden.max(1) as f64).sqrt();
        let mut w1 = DMatrix::from_fn(d, hidden, |_, _| rng.random_range(-s1..s1));
        let mut b1 = DVector::zeros(hidden);
        let mut w2 = DMatrix::from_fn(hidden, classes, |_, _| rng.random_range(-s2..s2));
        let mut b2 = DVector::zeros(classes);
        let t = one_hot_targets(y, classes);
        let lr = 0.5;
        for _ in 0..600 {
            let mut h = x * &w1;
            for mut row in h.row_iter_mut() {
                row += b1.transpose();
            }
            h.apply(|v| *v = v.tanh());
            let mut p = &h * &w2;
            for mut row in p.row_iter_mut() {
                row += b2.transpose();
            }
            softmax_rows(&mut p);
            let g2 = (p - &t) / n as f64;
            let mut gh = &g2 * w2.transpose();
            gh.zip_apply(&h, |g, hv| *g *= 1.0 - hv * hv);
            w2 -= lr * (h.transpose() * &g2);
            b2 -= lr * g2.row_sum().transpose();
            w1 -= lr * (x.transpose() * &gh);
            b1 -= lr * gh.row_sum().transpose();
        }
        Mlp { w1, b1, w2, b2 }
    }

    fn predict(&self, row: &[f64]) -> usize {
        let x = DVector::from_row_slice(row);
        let h = (self.w1.transpose() * x + &self.b1).map(f64::tanh);
        argmax((self.w2.transpose() * h + &self.b2).iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Split {
    Equal { feature: String, value: String },
    AtMost { feature: String, threshold: f64 },
}

impl Split {
    fn goes_left(&self, ex: &Example) -> bool {
        match self {
            Split::Equal { feature, value } => ex.get(feature).is_some_and(|v| v.to_string() == *value),
            Split::AtMost { feature, threshold } => ex.get(feature).and_then(Value::as_num).is_some_and(|x| x <= *threshold),
        }
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf(usize),
    Branch { split: Split, left: Box<Node>, right: Box<Node> },
}

fn gini(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    1.0 - counts.iter().map(|&c| (c as f64 / n as f64).powi(2)).sum::<f64>()
}

fn majority(counts: &[usize]) -> usize {
    // Classes are sorted, so the first maximum is the lexicographically first.
    let mut best = 0;
    for (j, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = j;
        }
    }
    best
}

struct TreeBuilder<'a> {
    schema: &'a FeatureSchema,
    examples: &'a [Example],
    y: &'a [usize],
    classes: usize,
    max_depth: usize,
}

impl TreeBuilder<'_> {
    fn counts(&self, idx: &[usize]) -> Vec<usize> {
        let mut c = vec![0; self.classes];
        for &i in idx {
            c[self.y[i]] += 1;
        }
        c
    }

    /// Weighted child impurity of the best split, if any split separates `idx`.
    fn best_split(&self, idx: &[usize]) -> Option<(f64, Split)> {
        let n = idx.len() as f64;
        let mut best: Option<(f64, Split)> = None;
        let mut consider = |score: f64, split: Split| {
            if best.as_ref().is_none_or(|b| score < b.0 - 1e-12) {
                best = Some((score, split));
            }
        };
        for spec in self.schema.features() {
            match &spec.kind {
                FeatureKind::Categorical { domain } => {
                    for v in domain {
                        let split = Split::Equal {
                            feature: spec.name.clone(),
                            value: v.clone(),
                        };
                        let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| split.goes_left(&self.examples[i]));
                        if l.is_empty() || r.is_empty() {
                            continue;
                        }
                        let s = (l.len() as f64 * gini(&self.counts(&l)) + r.len() as f64 * gini(&self.counts(&r))) / n;
                        consider(s, split);
                    }
                }
                FeatureKind::Numeric { .. } => {
                    let mut xs: Vec<(f64, usize)> = idx
                        .iter()
                        .map(|&i| (self.examples[i].get(&spec.name).and_then(Value::as_num).unwrap_or(f64::NAN), self.y[i]))
                        .collect();
                    xs.sort_by(|a, b| a.0.total_cmp(&b.0));
                    let total = self.counts(idx);
                    let mut left = vec![0; self.classes];
                    for k in 0..xs.len() - 1 {
                        left[xs[k].1] += 1;
                        if xs[k].0 == xs[k + 1].0 {
                            continue;
                        }
                        let right: Vec<usize> = total.iter().zip(&left).map(|(t, l)| t - l).collect();
                        let nl = (k + 1) as f64;
                        let s = (nl * gini(&left) + (n - nl) * gini(&right)) / n;
                        consider(
                            s,
                            Split::AtMost {
                                feature: spec.name.clone(),
                                threshold: (xs[k].0 + xs[k + 1].0) / 2.0,
                            },
                        );
                    }
                }
            }
        }
        best
    }

    fn build(&self, idx: &[usize], depth: usize) -> Node {
        let counts = self.counts(idx);
        let impurity = gini(&counts);
        if depth >= self.max_depth || impurity == 0.0 || idx.len() < 2 {
            return Node::Leaf(majority(&counts));
        }
        match self.best_split(idx) {
            Some((score, split)) if score < impurity - 1e-12 => {
                let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| split.goes_left(&self.examples[i]));
                Node::Branch {
                    left: Box::new(self.build(&l, depth + 1)),
                    right: Box::new(self.build(&r, depth + 1)),
                    split,
                }
            }
            _ => Node::Leaf(majority(&counts)),
        }
    }
}

#[derive(Debug, Clone)]
enum Model {
    Softmax(Encoder, Softmax),
    Mlp(Encoder, Mlp),
    Tree(Node),
}

/// A trained classifier over the dataset's raw class names.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    classes: Vec<String>,
    model: Model,
}

impl TrainedModel {
    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn predict_label(&self, ex: &Example) -> &str {
        let j = match &self.model {
            Model::Softmax(enc, m) => m.predict(&enc.row(ex)),
            Model::Mlp(enc, m) => m.predict(&enc.row(ex)),
            Model::Tree(root) => {
                let mut node = root;
                loop {
                    match node {
                        Node::Leaf(j) => break *j,
                        Node::Branch { split, left, right } => {
                            node = if split.goes_left(ex) { left } else { right };
                        }
                    }
                }
            }
        };
        &self.classes[j]
    }
}

impl Classifier for TrainedModel {
    fn predict(&self, example: &Example) -> Result<String, BaselineError> {
        Ok(self.predict_label(example).to_string())
    }
}

/// Fits a classifier on the given examples.
pub fn fit(
    kind: ClassifierKind,
    schema: &FeatureSchema,
    examples: &[Example],
    labels: &[String],
    seed: u64,
) -> Result<TrainedModel, HarnessError> {
    if examples.is_empty() {
        return Err(HarnessError::EmptyDataset);
    }
    let classes: Vec<String> = labels.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let index: BTreeMap<&str, usize> = classes.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    let y: Vec<usize> = labels.iter().map(|l| index[l.as_str()]).collect();
    let model = match kind {
        ClassifierKind::Logistic => {
            let enc = Encoder::fit(schema, examples);
            let x = enc.matrix(examples);
            let m = Softmax::fit(&x, &y, classes.len(), 1000, 0.5);
            Model::Softmax(enc, m)
        }
        ClassifierKind::Mlp { hidden } => {
            if hidden == 0 {
                return Err(HarnessError::UnsupportedKind(kind.to_string()));
            }
            let enc = Encoder::fit(schema, examples);
            let x = enc.matrix(examples);
            let m = Mlp::fit(&x, &y, classes.len(), hidden, seed);
            Model::Mlp(enc, m)
        }
        ClassifierKind::Tree { max_depth } => {
            let b = TreeBuilder {
                schema,
                examples,
                y: &y,
                classes: classes.len(),
                max_depth,
            };
            let all: Vec<usize> = (0..examples.len()).collect();
            Model::Tree(b.build(&all, 0))
        }
    };
    Ok(TrainedModel { classes, model })
}

/// Trains on the dataset's training split and wraps the model in a handle with
/// an empty budget; callers derive budgeted handles with `with_budget`.
pub fn train_classifier(kind: ClassifierKind, dataset: &Dataset, seed: u64) -> Result<ClassifierHandle, HarnessError> {
    let model = train_model(kind, dataset, seed)?;
    Ok(ClassifierHandle::new(Arc::new(model), 0))
}

pub fn train_model(kind: ClassifierKind, dataset: &Dataset, seed: u64) -> Result<TrainedModel, HarnessError> {
    let idx = &dataset.splits.train;
    let labels: Vec<String> = idx.iter().map(|&i| dataset.labels[i].clone()).collect();
    fit(kind, &dataset.schema, &dataset.select_examples(idx), &labels, seed)
}
