//! Mutual-information feature ranking.

use std::collections::BTreeMap;

use faithex_core::explang::Value;

use crate::{Dataset, HarnessError};

/// Quartile bin of each value: the number of quartile cut points strictly below it.
pub fn quartile_bins(xs: &[f64]) -> Vec<usize> {
    if xs.is_empty() {
        return Vec::new();
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let cuts: Vec<f64> = (1..4).map(|k| sorted[((k * n) / 4).min(n - 1)]).collect();
    xs.iter().map(|x| cuts.iter().filter(|c| x > c).count()).collect()
}

/// Empirical mutual information in nats between two discrete sequences.
pub fn mutual_information<A: Ord, B: Ord>(xs: &[A], ys: &[B]) -> f64 {
    assert_eq!(xs.len(), ys.len(), "sequences must have equal length");
    let n = xs.len() as f64;
    if xs.is_empty() {
        return 0.0;
    }
    let mut joint: BTreeMap<(&A, &B), usize> = BTreeMap::new();
    let mut px: BTreeMap<&A, usize> = BTreeMap::new();
    let mut py: BTreeMap<&B, usize> = BTreeMap::new();
    for (x, y) in xs.iter().zip(ys) {
        *joint.entry((x, y)).or_default() += 1;
        *px.entry(x).or_default() += 1;
        *py.entry(y).or_default() += 1;
    }
    joint
        .iter()
        .map(|((x, y), &c)| {
            let pxy = c as f64 / n;
            pxy * (c as f64 * n / (px[x] as f64 * py[y] as f64)).ln()
        })
        .sum::<f64>()
        .max(0.0)
}

/// Discrete codes of one feature column: quartile bins for numerics, raw
/// tokens otherwise.
pub fn discretize(values: &[&Value], numeric: bool) -> Vec<String> {
    if numeric {
        let xs: Vec<f64> = values.iter().map(|v| v.as_num().unwrap_or(f64::NAN)).collect();
        quartile_bins(&xs).into_iter().map(|b| b.to_string()).collect()
    } else {
        values.iter().map(|v| v.to_string()).collect()
    }
}

/// Every feature's mutual information with the label over the training split,
/// highest first, ties broken by name.
pub fn mutual_info_ranking(dataset: &Dataset) -> Vec<(String, f64)> {
    let rows: Vec<usize> = if dataset.splits.train.is_empty() {
        (0..dataset.len()).collect()
    } else {
        dataset.splits.train.clone()
    };
    let ys: Vec<&str> = rows.iter().map(|&i| dataset.labels[i].as_str()).collect();
    let mut scored: Vec<(String, f64)> = dataset
        .schema
        .features()
        .iter()
        .map(|spec| {
            let col: Vec<&Value> = rows
                .iter()
                .map(|&i| dataset.examples[i].get(&spec.name).expect("validated example"))
                .collect();
            let codes = discretize(&col, spec.is_numeric());
            (spec.name.clone(), mutual_information(&codes, &ys))
        })
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    scored
}

/// Names of the `k` most informative features, highest first.
pub fn mutual_info_topk(dataset: &Dataset, k: usize) -> Result<Vec<String>, HarnessError> {
    if k > dataset.schema.len() {
        return Err(HarnessError::Config(format!(
            "asked for {k} features, dataset has {}",
            dataset.schema.len()
        )));
    }
    Ok(mutual_info_ranking(dataset).into_iter().take(k).map(|(n, _)| n).collect())
}
