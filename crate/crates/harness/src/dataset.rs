//! CSV ingestion with schema inference and a seeded train/validation/test split.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::Path;

use faithex_core::executor::{negate_label, Example, FeatureSchema, FeatureSpec, LabelKind, LabeledBatch};
use faithex_core::explang::Value;
use faithex_core::rng::{substream, Purpose};
use rand::seq::SliceRandom;

use crate::HarnessError;

/// Cells treated as missing.
pub const MISSING: [&str; 2] = ["", "?"];

#[derive(Debug, Clone, PartialEq)]
pub struct Splits {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

impl Splits {
    /// 70/15/15 split of `0..n` by a seeded shuffle.
    pub fn seeded(n: usize, seed: u64) -> Splits {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut substream(seed, Purpose::Split, 0));
        let n_train = n * 70 / 100;
        let n_val = n * 15 / 100;
        let test = order.split_off(n_train + n_val);
        let validation = order.split_off(n_train);
        Splits {
            train: order,
            validation,
            test,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Label column; the last column when absent.
    pub label_column: Option<String>,
    /// Class treated as the label of interest; the minority class when absent.
    pub label_of_interest: Option<String>,
    pub seed: u64,
}

/// Examples with gold labels, as read from a file.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub schema: FeatureSchema,
    pub examples: Vec<Example>,
    /// Raw class names, possibly more than two.
    pub labels: Vec<String>,
    pub label_name: String,
    pub label_of_interest: String,
    pub splits: Splits,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn classes(&self) -> Vec<String> {
        self.labels.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect()
    }

    /// Maps a raw class onto the label of interest or its negation.
    pub fn binary_label(&self, raw: &str) -> String {
        if raw == self.label_of_interest {
            raw.to_string()
        } else {
            negate_label(&self.label_of_interest)
        }
    }

    fn batch_of(&self, indices: &[usize], raw: &[String], kind: LabelKind) -> Result<LabeledBatch, HarnessError> {
        let examples = indices.iter().map(|&i| self.examples[i].clone()).collect();
        let labels = raw.iter().map(|l| self.binary_label(l)).collect();
        Ok(LabeledBatch::new(
            self.schema.clone(),
            examples,
            labels,
            kind,
            &self.label_of_interest,
        )?)
    }

    /// Gold-labelled batch over `indices`.
    pub fn gold(&self, indices: &[usize]) -> Result<LabeledBatch, HarnessError> {
        let raw: Vec<String> = indices.iter().map(|&i| self.labels[i].clone()).collect();
        self.batch_of(indices, &raw, LabelKind::Gold)
    }

    /// Batch over `indices` labelled with the given raw predictions.
    pub fn predicted(&self, indices: &[usize], predictions: &[String]) -> Result<LabeledBatch, HarnessError> {
        self.batch_of(indices, predictions, LabelKind::Predicted)
    }

    pub fn select_examples(&self, indices: &[usize]) -> Vec<Example> {
        indices.iter().map(|&i| self.examples[i].clone()).collect()
    }

    /// The same dataset restricted to `names`, kept in schema order.
    pub fn project(&self, names: &[&str]) -> Result<Dataset, HarnessError> {
        let schema = self.schema.project(names)?;
        Ok(Dataset {
            examples: self.examples.iter().map(|e| e.project(&schema)).collect(),
            schema,
            ..self.clone()
        })
    }
}

fn is_missing(cell: &str) -> bool {
    MISSING.contains(&cell)
}

fn csv_error(e: csv::Error) -> HarnessError {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    HarnessError::MalformedCsv {
        line,
        msg: e.to_string(),
    }
}

pub fn load_csv(path: impl AsRef<Path>, options: &LoadOptions) -> Result<Dataset, HarnessError> {
    load_csv_reader(std::fs::File::open(path)?, options)
}

/// Reads a headed CSV. A column is numeric iff every non-missing cell is a
/// decimal literal; missing numeric cells take the column median and missing
/// categorical cells become the category `?`.
pub fn load_csv_reader<R: Read>(reader: R, options: &LoadOptions) -> Result<Dataset, HarnessError> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = r.headers().map_err(csv_error)?.iter().map(str::to_string).collect();
    if header.len() < 2 {
        return Err(HarnessError::MalformedCsv {
            line: 1,
            msg: "need at least one feature column and a label column".into(),
        });
    }
    let label_idx = match &options.label_column {
        Some(name) => header.iter().position(|h| h == name).ok_or_else(|| HarnessError::MalformedCsv {
            line: 1,
            msg: format!("no column named {name:?}"),
        })?,
        None => header.len() - 1,
    };

    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut labels = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let label = rec.get(label_idx).unwrap_or_default();
        if is_missing(label) {
            return Err(HarnessError::MalformedCsv {
                line,
                msg: "missing label".into(),
            });
        }
        labels.push(label.to_string());
        rows.push(
            rec.iter()
                .enumerate()
                .filter(|(i, _)| *i != label_idx)
                .map(|(_, c)| c.to_string())
                .collect(),
        );
    }
    if rows.is_empty() {
        return Err(HarnessError::EmptyDataset);
    }

    let names: Vec<&String> = header.iter().enumerate().filter(|(i, _)| *i != label_idx).map(|(_, h)| h).collect();
    let mut specs = Vec::new();
    let mut columns: Vec<Vec<Value>> = Vec::new();
    for (j, name) in names.iter().enumerate() {
        let cells: Vec<&str> = rows.iter().map(|row| row[j].as_str()).collect();
        let present: Vec<&str> = cells.iter().copied().filter(|c| !is_missing(c)).collect();
        let numeric = !present.is_empty() && present.iter().all(|c| Value::from_token(c).is_numeric());
        if numeric {
            let mut xs: Vec<f64> = present.iter().map(|c| Value::from_token(c).as_num().expect("numeric")).collect();
            xs.sort_by(f64::total_cmp);
            let mid = xs.len() / 2;
            let median = if xs.len() % 2 == 1 { xs[mid] } else { (xs[mid - 1] + xs[mid]) / 2.0 };
            let (min, max) = (xs[0], xs[xs.len() - 1]);
            specs.push(FeatureSpec::numeric(name.as_str(), min, if max > min { max } else { min + 1.0 }));
            columns.push(
                cells
                    .iter()
                    .map(|c| Value::Num(if is_missing(c) { median } else { Value::from_token(c).as_num().expect("numeric") }))
                    .collect(),
            );
        } else {
            let col: Vec<String> = cells.iter().map(|c| if is_missing(c) { "?" } else { c }.to_string()).collect();
            let domain: BTreeSet<&str> = col.iter().map(String::as_str).collect();
            specs.push(FeatureSpec::categorical(name.as_str(), &domain.into_iter().collect::<Vec<_>>()));
            columns.push(col.into_iter().map(Value::Cat).collect());
        }
    }
    let schema = FeatureSchema::new(specs)?;
    let examples = (0..rows.len())
        .map(|i| Example {
            values: names
                .iter()
                .zip(&columns)
                .map(|(n, col)| ((*n).clone(), col[i].clone()))
                .collect::<BTreeMap<_, _>>(),
        })
        .collect();

    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for l in &labels {
        *counts.entry(l).or_default() += 1;
    }
    let label_of_interest = match &options.label_of_interest {
        Some(l) if counts.contains_key(l.as_str()) => l.clone(),
        Some(l) => return Err(HarnessError::Config(format!("label {l:?} does not occur in the data"))),
        // Minority class, lexicographically first among ties.
        None => counts
            .iter()
            .min_by(|a, b| a.1.cmp(b.1).then(a.0.cmp(b.0)))
            .map(|(l, _)| l.to_string())
            .expect("non-empty"),
    };

    Ok(Dataset {
        schema,
        examples,
        splits: Splits::seeded(labels.len(), options.seed),
        labels,
        label_name: header[label_idx].clone(),
        label_of_interest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use faithex_core::executor::FeatureKind;

    fn load(text: &str) -> Result<Dataset, HarnessError> {
        load_csv_reader(text.as_bytes(), &LoadOptions::default())
    }

    #[test]
    fn infers_kinds_and_fills_missing() {
        let d = load("age,city,mix,y\n30,rome,1,a\n?,oslo,abc,b\n50,,2,b\n40,rome,3,a\n").unwrap();
        assert!(d.schema.get("age").unwrap().is_numeric());
        assert!(!d.schema.get("mix").unwrap().is_numeric());
        assert_eq!(d.examples[1].get("age"), Some(&Value::Num(40.0)));
        assert_eq!(d.examples[2].get("city"), Some(&Value::from("?")));
        assert_eq!(d.examples[0].get("mix"), Some(&Value::Cat("1".into())));
        let FeatureKind::Categorical { domain } = &d.schema.get("city").unwrap().kind else { panic!() };
        assert_eq!(domain, &["?", "oslo", "rome"]);
        assert_eq!(d.label_name, "y");
        assert_eq!(d.label_of_interest, "a");
    }

    #[test]
    fn empty_and_malformed() {
        assert!(matches!(load("a,b,y\n"), Err(HarnessError::EmptyDataset)));
        assert!(matches!(
            load("a,y\n1,x\n2,y,extra\n"),
            Err(HarnessError::MalformedCsv { line: 3, .. })
        ));
        assert!(matches!(load("a,y\n1,\n"), Err(HarnessError::MalformedCsv { line: 2, .. })));
    }

    #[test]
    fn named_label_column_and_interest() {
        let opts = LoadOptions {
            label_column: Some("y".into()),
            label_of_interest: Some("b".into()),
            seed: 0,
        };
        let d = load_csv_reader("y,a\nb,1\nc,2\nc,3\n".as_bytes(), &opts).unwrap();
        assert_eq!(d.schema.names().collect::<Vec<_>>(), ["a"]);
        assert_eq!(d.binary_label("c"), "not b");
        let g = d.gold(&[0, 1]).unwrap();
        assert_eq!(g.labels(), ["b", "not b"]);
    }

    #[test]
    fn splits_partition_indices() {
        for n in [1, 7, 20, 101] {
            let s = Splits::seeded(n, 3);
            let mut all: Vec<usize> = s.train.iter().chain(&s.validation).chain(&s.test).copied().collect();
            all.sort();
            assert_eq!(all, (0..n).collect::<Vec<_>>());
            assert_eq!(s.train.len(), n * 70 / 100);
            assert_eq!(s.validation.len(), n * 15 / 100);
        }
        assert_eq!(Splits::seeded(50, 1), Splits::seeded(50, 1));
        assert_ne!(Splits::seeded(50, 1), Splits::seeded(50, 2));
    }
}
