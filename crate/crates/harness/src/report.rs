use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Duration;

use serde::Serialize;

use crate::Method;

/// Mean and sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

impl Stat {
    pub fn of(xs: &[f64]) -> Stat {
        let n = xs.len();
        if n == 0 {
            return Stat { mean: 0.0, std: 0.0, n };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let std = if n < 2 {
            0.0
        } else {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        };
        Stat { mean, std, n }
    }

    fn cell(&self) -> String {
        format!("{:.3} ± {:.3}", self.mean, self.std)
    }
}

/// One method on one subset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub method: Method,
    pub subset: usize,
    pub explanation: Option<String>,
    pub faithfulness: Option<f64>,
    pub simulatability: Option<f64>,
    pub budget_used: usize,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodRow {
    pub method: Method,
    pub faithfulness: Stat,
    pub simulatability: Stat,
    pub budget_used: usize,
    pub max_budget_used: usize,
    pub failures: usize,
}

impl MethodRow {
    pub fn from_runs(method: Method, runs: &[RunRecord]) -> MethodRow {
        let mine: Vec<&RunRecord> = runs.iter().filter(|r| r.method == method).collect();
        let faith: Vec<f64> = mine.iter().filter_map(|r| r.faithfulness).collect();
        let sim: Vec<f64> = mine.iter().filter_map(|r| r.simulatability).collect();
        MethodRow {
            method,
            faithfulness: Stat::of(&faith),
            simulatability: Stat::of(&sim),
            budget_used: mine.iter().map(|r| r.budget_used).sum(),
            max_budget_used: mine.iter().map(|r| r.budget_used).max().unwrap_or(0),
            failures: mine.iter().filter(|r| r.failure.is_some()).count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMeta {
    pub dataset: String,
    pub classifier: String,
    pub features: Vec<String>,
    pub label_of_interest: String,
    pub n_subsets: usize,
    pub subset_size: usize,
    pub budget: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetLedger {
    /// Sum of per-run usage over all methods.
    pub per_method: BTreeMap<Method, usize>,
    pub reported_total: usize,
    /// Calls counted by the shared metering counter.
    pub metered_total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub meta: ReportMeta,
    pub rows: Vec<MethodRow>,
    pub ledger: BudgetLedger,
    pub resampled_subsets: usize,
    pub runs: Vec<RunRecord>,
    #[serde(skip)]
    pub runtime: Duration,
}

impl Report {
    pub fn row(&self, method: Method) -> Option<&MethodRow> {
        self.rows.iter().find(|r| r.method == method)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RunRecord> {
        self.runs.iter().filter(|r| r.failure.is_some())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_markdown(&self) -> String {
        let header = ["Method", "Faithfulness", "Simulatability", "Budget used", "Failures"];
        let body: Vec<[String; 5]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.method.to_string(),
                    r.faithfulness.cell(),
                    r.simulatability.cell(),
                    r.budget_used.to_string(),
                    r.failures.to_string(),
                ]
            })
            .collect();
        table(&header, &body)
    }
}

/// Aligned markdown table.
pub fn table<const N: usize>(header: &[&str; N], body: &[[String; N]]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in body {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = String::from("|");
        for (c, w) in cells.iter().zip(&widths) {
            let pad = w - c.chars().count();
            let _ = write!(s, " {c}{} |", " ".repeat(pad));
        }
        s.push('\n');
        s
    };
    let mut out = line(header.to_vec());
    out.push('|');
    for w in &widths {
        let _ = write!(out, "{}|", "-".repeat(w + 2));
    }
    out.push('\n');
    for row in body {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub k: usize,
    pub report: Report,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub points: Vec<SweepPoint>,
}

impl SweepReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_markdown(&self) -> String {
        let header = ["k", "Method", "Faithfulness", "Simulatability"];
        let body: Vec<[String; 4]> = self
            .points
            .iter()
            .flat_map(|p| {
                p.report.rows.iter().map(move |r| {
                    [p.k.to_string(), r.method.to_string(), r.faithfulness.cell(), r.simulatability.cell()]
                })
            })
            .collect();
        table(&header, &body)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalePoint {
    pub n: usize,
    pub repetitions: usize,
    pub ensemble_faithfulness: Stat,
    pub single_faithfulness: Stat,
    pub ensemble_simulatability: Stat,
    pub single_simulatability: Stat,
    pub skipped_subsets: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleReport {
    pub points: Vec<ScalePoint>,
}

impl ScaleReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_markdown(&self) -> String {
        let header = ["N", "Ensemble faith", "Single faith", "Ensemble sim", "Single sim"];
        let body: Vec<[String; 5]> = self
            .points
            .iter()
            .map(|p| {
                [
                    p.n.to_string(),
                    p.ensemble_faithfulness.cell(),
                    p.single_faithfulness.cell(),
                    p.ensemble_simulatability.cell(),
                    p.single_simulatability.cell(),
                ]
            })
            .collect();
        table(&header, &body)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stat_values() {
        let s = Stat::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.std - (5.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert_eq!(Stat::of(&[0.7]).std, 0.0);
        assert_eq!(Stat::of(&[]).n, 0);
    }

    #[test]
    fn table_alignment() {
        let t = table(&["a", "bb"], &[["xyz".into(), "1".into()]]);
        assert_eq!(t, "| a   | bb |\n|-----|----|\n| xyz | 1  |\n");
    }
}
