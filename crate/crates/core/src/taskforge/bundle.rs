//! On-disk task bundles: `schema.json`, `planted.txt`, `train.csv`,
//! `test.csv` and `meta.json` in one directory.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ComplexityDescriptor, SyntheticTask, TaskError};
use crate::executor::{Example, FeatureKind, FeatureSchema, LabelKind, LabeledBatch};
use crate::explang::{parse, render, Value};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleMeta {
    pub descriptor: ComplexityDescriptor,
    pub seed: u64,
    pub label_of_interest: String,
}

fn write_csv(path: &Path, batch: &LabeledBatch) -> Result<(), TaskError> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<&str> = batch.schema().names().collect();
    header.push("label");
    w.write_record(&header)?;
    for (ex, y) in batch.examples().iter().zip(batch.labels()) {
        let mut row: Vec<String> = batch
            .schema()
            .names()
            .map(|n| ex.get(n).map(Value::to_string).unwrap_or_default())
            .collect();
        row.push(y.clone());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn read_csv(
    path: &Path,
    schema: &FeatureSchema,
    kind: LabelKind,
    label_of_interest: &str,
) -> Result<LabeledBatch, TaskError> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let expected: Vec<&str> = schema.names().chain(["label"]).collect();
    if header != expected {
        return Err(TaskError::Malformed {
            line: 1,
            msg: format!("header {header:?} does not match schema"),
        });
    }
    let mut examples = Vec::new();
    let mut labels = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let mut values = Vec::with_capacity(schema.len());
        for (spec, raw) in schema.features().iter().zip(rec.iter()) {
            let v = match spec.kind {
                FeatureKind::Numeric { .. } => Value::Num(raw.parse().map_err(|_| TaskError::Malformed {
                    line: i + 2,
                    msg: format!("{raw:?} is not a number"),
                })?),
                FeatureKind::Categorical { .. } => Value::Cat(raw.to_string()),
            };
            values.push((spec.name.clone(), v));
        }
        examples.push(Example::new(values));
        labels.push(rec.get(schema.len()).unwrap_or_default().to_string());
    }
    Ok(LabeledBatch::new(
        schema.clone(),
        examples,
        labels,
        kind,
        label_of_interest,
    )?)
}

pub fn write_bundle(task: &SyntheticTask, dir: &Path) -> Result<(), TaskError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("schema.json"), serde_json::to_string_pretty(&task.schema)?)?;
    fs::write(dir.join("planted.txt"), format!("{}\n", render(&task.planted)))?;
    write_csv(&dir.join("train.csv"), &task.train)?;
    write_csv(&dir.join("test.csv"), &task.test)?;
    let meta = BundleMeta {
        descriptor: task.descriptor,
        seed: task.seed,
        label_of_interest: task.label_of_interest().to_string(),
    };
    fs::write(dir.join("meta.json"), serde_json::to_string_pretty(&meta)?)?;
    Ok(())
}

pub fn read_bundle(dir: &Path) -> Result<SyntheticTask, TaskError> {
    let schema: FeatureSchema = serde_json::from_str(&fs::read_to_string(dir.join("schema.json"))?)?;
    let planted = parse(fs::read_to_string(dir.join("planted.txt"))?.trim())?;
    let meta: BundleMeta = serde_json::from_str(&fs::read_to_string(dir.join("meta.json"))?)?;
    let l = &meta.label_of_interest;
    Ok(SyntheticTask {
        train: read_csv(&dir.join("train.csv"), &schema, LabelKind::Predicted, l)?,
        test: read_csv(&dir.join("test.csv"), &schema, LabelKind::Gold, l)?,
        schema,
        planted,
        descriptor: meta.descriptor,
        seed: meta.seed,
    })
}
