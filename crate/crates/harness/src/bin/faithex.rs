use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use faithex_core::executor::{EvalReport, LabeledBatch};
use faithex_core::explainer::{ensemble_subsets, explain, SearchConfig, Strategy};
use faithex_core::explang::{parse, render, render_with_confidence};
use faithex_core::taskforge::{generate_task, write_bundle, ComplexityDescriptor};
use faithex_harness::{
    feature_sweep, load_csv, run_budget_experiment, scale_examples_experiment, write_adult_like_file, ExperimentConfig,
    HarnessError, LoadOptions,
};

#[derive(Parser)]
#[command(name = "faithex", version, about = "If-then explanations of classifier behaviour from a few examples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic tasks with planted explanations.
    Forge(ForgeArgs),
    /// Search for an explanation of the labels in a CSV.
    Explain(ExplainArgs),
    /// Score an explanation string against a CSV of predictions.
    Evaluate(EvaluateArgs),
    /// Compare explainers under a classifier-call budget.
    Bench(ExperimentArgs),
    /// Repeat the budget comparison over top-k feature subsets.
    SweepFeatures(SweepArgs),
    /// Subset ensembling against single subsets for growing input sizes.
    ScaleExamples(ScaleArgs),
    /// Parse an explanation and print its canonical form.
    Parse(ParseArgs),
    /// Write the synthetic census-like table as CSV.
    Synth(SynthArgs),
}

#[derive(Args)]
struct ForgeArgs {
    /// Complexity tag such as plain+single+noneg or quant+nested+clause_label.
    #[arg(long, default_value = "plain+single+noneg")]
    descriptor: String,
    #[arg(long, default_value_t = 5)]
    features: usize,
    #[arg(long, default_value_t = 10)]
    train: usize,
    #[arg(long, default_value_t = 100)]
    test: usize,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory receiving one bundle per task.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CsvArgs {
    /// CSV with a header row; the label column holds classifier predictions.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    label_column: Option<String>,
}

#[derive(Args)]
struct ExplainArgs {
    #[command(flatten)]
    csv: CsvArgs,
    #[arg(long)]
    label_of_interest: Option<String>,
    #[arg(long, default_value = "perfeat")]
    strategy: Strategy,
    #[arg(long, default_value_t = 20)]
    beam_width: usize,
    #[arg(long, default_value_t = 1)]
    depth: usize,
    /// Split the input into subsets of this size and keep the best subset winner.
    #[arg(long)]
    subset_size: Option<usize>,
    /// Print every ranked candidate as JSON.
    #[arg(long)]
    candidates: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    csv: CsvArgs,
    #[arg(long)]
    explanation: String,
    /// CSV with gold labels for simulatability.
    #[arg(long)]
    gold: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ExperimentArgs {
    /// TOML or JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    subsets: Option<usize>,
    #[arg(long)]
    budget: Option<usize>,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print a markdown table instead of JSON.
    #[arg(long)]
    markdown: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    exp: ExperimentArgs,
    #[arg(long, default_value_t = 5)]
    k_min: usize,
    #[arg(long, default_value_t = 11)]
    k_max: usize,
}

#[derive(Args)]
struct ScaleArgs {
    #[command(flatten)]
    exp: ExperimentArgs,
    /// Comma-separated input sizes.
    #[arg(long, value_delimiter = ',', default_value = "10,20,40,80")]
    n: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    repetitions: usize,
}

#[derive(Args)]
struct ParseArgs {
    text: String,
    /// Also print the "p% of the time" form.
    #[arg(long)]
    confidence: bool,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 3000)]
    rows: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn fail(msg: impl std::fmt::Display, code: u8) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn experiment_config(args: &ExperimentArgs) -> Result<ExperimentConfig, HarnessError> {
    let mut c = match &args.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = args.seed {
        c.seed = s;
    }
    if let Some(n) = args.subsets {
        c.n_subsets = n;
    }
    if let Some(b) = args.budget {
        c.budget = b;
    }
    c.validate()?;
    Ok(c)
}

fn emit(args: &ExperimentArgs, json: String, markdown: String) -> Result<(), HarnessError> {
    let text = if args.markdown { markdown } else { json };
    match &args.out {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn load_batch(csv: &CsvArgs, label_of_interest: Option<String>, seed: u64) -> Result<LabeledBatch, HarnessError> {
    let d = load_csv(
        &csv.input,
        &LoadOptions {
            label_column: csv.label_column.clone(),
            label_of_interest,
            seed,
        },
    )?;
    let all: Vec<usize> = (0..d.len()).collect();
    d.predicted(&all, &d.labels)
}

fn run(cli: Cli) -> Result<ExitCode, HarnessError> {
    match cli.command {
        Command::Forge(a) => {
            let d = ComplexityDescriptor::from_tag(&a.descriptor)
                .ok_or_else(|| HarnessError::Config(format!("unknown descriptor {:?}", a.descriptor)))?;
            for i in 0..a.count {
                let seed = a.seed + i as u64;
                let task = generate_task(d, a.features, a.train, a.test, seed)?;
                println!("{seed}\t{}", render(&task.planted));
                if let Some(out) = &a.out {
                    write_bundle(&task, &out.join(format!("task-{seed}")))?;
                }
            }
        }
        Command::Explain(a) => {
            let batch = load_batch(&a.csv, a.label_of_interest.clone(), a.seed)?;
            let config = SearchConfig {
                strategy: a.strategy,
                beam_width: a.beam_width,
                max_conjunction_depth: a.depth,
                ..SearchConfig::default()
            };
            match a.subset_size {
                Some(size) => {
                    let out = ensemble_subsets(&batch, &config, batch.len() / size.max(1), size, a.seed)?;
                    println!("{}", out.best.text);
                    if a.candidates {
                        println!("{}", serde_json::to_string_pretty(&out.subset_winners)?);
                    }
                }
                None => {
                    let out = explain(&batch, &config)?;
                    println!("{}", out.best.text);
                    println!("{}", serde_json::to_string(&out.report)?);
                    if a.candidates {
                        println!("{}", serde_json::to_string_pretty(&out.candidates)?);
                    }
                }
            }
        }
        Command::Evaluate(a) => {
            let expl = parse(&a.explanation)?;
            let preds = load_batch(&a.csv, Some(expl.label.clone()), a.seed)?;
            let gold = match &a.gold {
                Some(path) => {
                    let args = CsvArgs {
                        input: path.clone(),
                        label_column: a.csv.label_column.clone(),
                    };
                    let b = load_batch(&args, Some(expl.label.clone()), a.seed)?;
                    Some(b.with_kind(faithex_core::executor::LabelKind::Gold))
                }
                None => None,
            };
            let report = EvalReport::compute(&expl, &preds, gold.as_ref())?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Bench(a) => {
            let report = run_budget_experiment(&experiment_config(&a)?)?;
            let failed = report.failures().count();
            emit(&a, report.to_json(), report.to_markdown())?;
            if failed > 0 {
                eprintln!("{failed} runs failed");
                return Ok(ExitCode::from(3));
            }
        }
        Command::SweepFeatures(a) => {
            let ks: Vec<usize> = (a.k_min..=a.k_max).collect();
            let report = feature_sweep(&experiment_config(&a.exp)?, &ks)?;
            emit(&a.exp, report.to_json(), report.to_markdown())?;
        }
        Command::ScaleExamples(a) => {
            let report = scale_examples_experiment(&experiment_config(&a.exp)?, &a.n, a.repetitions)?;
            emit(&a.exp, report.to_json(), report.to_markdown())?;
        }
        Command::Parse(a) => {
            let expl = parse(&a.text)?;
            let canonical = render(&expl);
            if parse(&canonical)? != expl {
                return Ok(fail(format!("canonical form does not reparse identically: {canonical}"), 2));
            }
            println!("{canonical}");
            if a.confidence {
                match render_with_confidence(&expl) {
                    Ok(s) => println!("{s}"),
                    Err(e) => eprintln!("{e}"),
                }
            }
        }
        Command::Synth(a) => write_adult_like_file(&a.out, a.rows, a.seed)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            let code = e.exit_code() as u8;
            fail(e, code)
        }
    }
}
