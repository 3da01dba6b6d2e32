//! Budget-regime comparison, feature sweep and subset-ensembling scale runs.

use std::time::Instant;

use faithex_core::baselines::{anchors_budgeted, lime_budgeted, ClassifierHandle, LimeConfig};
use faithex_core::executor::{simulatability, LabeledBatch};
use faithex_core::explainer::{ensemble_subsets, explain, SearchError, Strategy};
use faithex_core::explang::render;
use faithex_core::rng::{substream, Purpose};
use rand::seq::index;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::report::{BudgetLedger, MethodRow, Report, ReportMeta, RunRecord, ScalePoint, ScaleReport, Stat, SweepPoint, SweepReport};
use crate::{adult_like_dataset, load_csv, mutual_info_topk, train_classifier, Dataset, ExperimentConfig, HarnessError, LoadOptions, Method};

/// Attempts at drawing a subset whose predictions contain both classes.
pub const MAX_DRAWS: usize = 100;

/// Dataset, selected features and trained classifier for one configuration.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub config: ExperimentConfig,
    pub dataset: Dataset,
    pub dataset_name: String,
    pub handle: ClassifierHandle,
    pub test: LabeledBatch,
}

pub fn load_dataset(config: &ExperimentConfig) -> Result<(Dataset, String), HarnessError> {
    match &config.dataset {
        Some(path) => {
            let opts = LoadOptions {
                label_column: config.label_column.clone(),
                label_of_interest: config.label_of_interest.clone(),
                seed: config.seed,
            };
            Ok((load_csv(path, &opts)?, path.display().to_string()))
        }
        None => Ok((
            adult_like_dataset(config.synthetic_rows, config.seed)?,
            format!("synthetic-adult:{}", config.synthetic_rows),
        )),
    }
}

pub fn prepare(config: &ExperimentConfig) -> Result<Prepared, HarnessError> {
    config.validate()?;
    let (full, dataset_name) = load_dataset(config)?;
    let dataset = match config.num_features {
        Some(k) => {
            let names = mutual_info_topk(&full, k)?;
            full.project(&names.iter().map(String::as_str).collect::<Vec<_>>())?
        }
        None => full,
    };
    let handle = train_classifier(config.classifier, &dataset, config.seed)?;
    let test = dataset.gold(&dataset.splits.test)?;
    Ok(Prepared {
        config: config.clone(),
        dataset,
        dataset_name,
        handle,
        test,
    })
}

impl Prepared {
    fn predictions(&self, indices: &[usize]) -> Result<Vec<String>, HarnessError> {
        indices
            .iter()
            .map(|&i| Ok(self.handle.predict_unmetered(&self.dataset.examples[i])?))
            .collect()
    }

    /// Draws `size` validation examples whose predictions contain both classes.
    /// Predictions on the drawn examples are given to the explainers and cost
    /// no budget. Returns the batch, its raw predictions, and the number of
    /// rejected draws.
    fn draw_batch(&self, size: usize, rng: &mut ChaCha8Rng) -> Result<(LabeledBatch, Vec<String>, usize), HarnessError> {
        let val = &self.dataset.splits.validation;
        if val.len() < size {
            return Err(HarnessError::Config(format!(
                "validation split has {} examples, {size} requested",
                val.len()
            )));
        }
        for attempt in 0..MAX_DRAWS {
            let idx: Vec<usize> = index::sample(rng, val.len(), size).into_iter().map(|j| val[j]).collect();
            let preds = self.predictions(&idx)?;
            let batch = self.dataset.predicted(&idx, &preds)?;
            if batch.min_class_fraction() > 0.0 {
                return Ok((batch, preds, attempt));
            }
        }
        Err(HarnessError::DegenerateSubsets(MAX_DRAWS))
    }

    fn run_method(&self, method: Method, subset: usize, batch: &LabeledBatch, raw: &[String], pool: &[usize]) -> RunRecord {
        let config = &self.config;
        let budgeted = self.handle.with_budget(config.budget);
        let label = &self.dataset.label_of_interest;
        let outcome: Result<(String, f64, f64), HarnessError> = (|| match method.strategy() {
            Some(strategy) => {
                let out = explain(batch, &config.search(strategy))?;
                let sim = simulatability(&out.best.explanation, &self.test)?;
                Ok((out.best.text, out.best.faithfulness, sim))
            }
            None if method == Method::Lime => {
                let lime = LimeConfig {
                    perturbations_per_example: config.lime_perturbations,
                    seed: config.seed.wrapping_mul(1_000_003).wrapping_add(subset as u64),
                    label_of_interest: label.clone(),
                };
                let out = lime_budgeted(&self.dataset.schema, batch.examples(), &budgeted, &lime)?;
                let e = out.explanation;
                Ok((serde_json::to_string(&e)?, e.match_rate(batch), e.match_rate(&self.test)))
            }
            None => {
                let out = anchors_budgeted(
                    &batch.examples()[0],
                    &raw[0],
                    &self.dataset.schema,
                    &self.dataset.select_examples(pool),
                    &budgeted,
                    config.anchors_precision,
                    label,
                )?;
                let e = &out.explanation;
                let faith = faithex_core::executor::faithfulness(e, batch)?;
                Ok((render(e), faith, simulatability(e, &self.test)?))
            }
        })();
        let budget_used = budgeted.budget().used;
        assert!(budget_used <= config.budget, "budget overrun");
        match outcome {
            Ok((text, faith, sim)) => RunRecord {
                method,
                subset,
                explanation: Some(text),
                faithfulness: Some(faith),
                simulatability: Some(sim),
                budget_used,
                failure: None,
            },
            Err(e) => RunRecord {
                method,
                subset,
                explanation: None,
                faithfulness: None,
                simulatability: None,
                budget_used,
                failure: Some(e.to_string()),
            },
        }
    }

    fn meta(&self) -> ReportMeta {
        let c = &self.config;
        ReportMeta {
            dataset: self.dataset_name.clone(),
            classifier: c.classifier.to_string(),
            features: self.dataset.schema.names().map(str::to_string).collect(),
            label_of_interest: self.dataset.label_of_interest.clone(),
            n_subsets: c.n_subsets,
            subset_size: c.subset_size,
            budget: c.budget,
            seed: c.seed,
        }
    }
}

/// Every configured method on `n_subsets` validation subsets, each under a
/// fresh budget. Search-based explainers score on the subset's predictions;
/// simulatability is always measured on the test split's gold labels.
pub fn run_budget_experiment(config: &ExperimentConfig) -> Result<Report, HarnessError> {
    let start = Instant::now();
    let prep = prepare(config)?;
    run_prepared(&prep, start)
}

fn run_prepared(prep: &Prepared, start: Instant) -> Result<Report, HarnessError> {
    let config = &prep.config;
    let train = &prep.dataset.splits.train;
    let per_subset: Vec<(Vec<RunRecord>, usize)> = (0..config.n_subsets)
        .into_par_iter()
        .map(|s| {
            let mut rng = substream(config.seed, Purpose::Subsets, s as u64);
            let (batch, raw, rejected) = prep.draw_batch(config.subset_size, &mut rng)?;
            let k = config.anchors_pool.min(train.len());
            let pool: Vec<usize> = index::sample(&mut rng, train.len(), k).into_iter().map(|j| train[j]).collect();
            let runs = config
                .methods
                .iter()
                .map(|&m| prep.run_method(m, s, &batch, &raw, &pool))
                .collect();
            Ok((runs, rejected))
        })
        .collect::<Result<_, HarnessError>>()?;

    let resampled_subsets = per_subset.iter().map(|p| p.1).sum();
    let runs: Vec<RunRecord> = per_subset.into_iter().flat_map(|p| p.0).collect();
    let rows: Vec<MethodRow> = config.methods.iter().map(|&m| MethodRow::from_runs(m, &runs)).collect();
    let per_method = rows.iter().map(|r| (r.method, r.budget_used)).collect();
    Ok(Report {
        meta: prep.meta(),
        ledger: BudgetLedger {
            per_method,
            reported_total: rows.iter().map(|r| r.budget_used).sum(),
            metered_total: prep.handle.total_metered(),
        },
        rows,
        resampled_subsets,
        runs,
        runtime: start.elapsed(),
    })
}

/// The budget experiment restricted to the top-k features, for each k.
pub fn feature_sweep(config: &ExperimentConfig, ks: &[usize]) -> Result<SweepReport, HarnessError> {
    let points = ks
        .iter()
        .map(|&k| {
            let c = ExperimentConfig {
                num_features: Some(k),
                ..config.clone()
            };
            Ok(SweepPoint {
                k,
                report: run_budget_experiment(&c)?,
            })
        })
        .collect::<Result<_, HarnessError>>()?;
    Ok(SweepReport { points })
}

/// Subset ensembling against the first subset's winner, for each input size N.
/// Both are scored on all N inputs and on the test split.
pub fn scale_examples_experiment(
    config: &ExperimentConfig,
    ns: &[usize],
    repetitions: usize,
) -> Result<ScaleReport, HarnessError> {
    let prep = prepare(config)?;
    let size = config.subset_size;
    let search = config.search(Strategy::PerFeature);
    let mut points = Vec::new();
    for &n in ns {
        if n == 0 || n % size != 0 {
            return Err(HarnessError::Config(format!("N = {n} is not a positive multiple of subset_size {size}")));
        }
        let reps: Vec<(f64, f64, f64, f64, usize)> = (0..repetitions)
            .into_par_iter()
            .map(|r| {
                let seed = config.seed.wrapping_add((n as u64) << 32);
                let mut rng = substream(seed, Purpose::Subsets, r as u64);
                for _ in 0..MAX_DRAWS {
                    let (batch, _, _) = prep.draw_batch(n, &mut rng)?;
                    match ensemble_subsets(&batch, &search, n / size, size, seed.wrapping_add(r as u64)) {
                        Ok(out) => {
                            let single = &out.subset_winners[0];
                            return Ok((
                                out.best.faithfulness,
                                single.faithfulness,
                                simulatability(&out.best.explanation, &prep.test)?,
                                simulatability(&single.explanation, &prep.test)?,
                                out.skipped_subsets,
                            ));
                        }
                        Err(SearchError::DegenerateBatch) => continue,
                        Err(e) => return Err(e.into()),
                    }
                }
                Err(HarnessError::DegenerateSubsets(MAX_DRAWS))
            })
            .collect::<Result<_, HarnessError>>()?;
        let col = |f: fn(&(f64, f64, f64, f64, usize)) -> f64| Stat::of(&reps.iter().map(f).collect::<Vec<_>>());
        points.push(ScalePoint {
            n,
            repetitions,
            ensemble_faithfulness: col(|r| r.0),
            single_faithfulness: col(|r| r.1),
            ensemble_simulatability: col(|r| r.2),
            single_simulatability: col(|r| r.3),
            skipped_subsets: reps.iter().map(|r| r.4).sum(),
        });
    }
    Ok(ScaleReport { points })
}
