//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::time::{Duration, Instant};

use faithex_core::executor::{
    apply_explanation, faithfulness, simulatability, tally, Example, FeatureSchema, FeatureSpec, LabelKind, LabeledBatch,
};
use faithex_core::explainer::{ensemble_subsets, explain, SearchConfig, Strategy};
use faithex_core::explang::{
    parse, render, render_with_confidence, ClauseTree, Comparator, Condition, Connective, Explanation, Quantifier, Value,
};
use faithex_core::executor::clause_holds;
use faithex_core::taskforge::{generate_task, ComplexityDescriptor};
use faithex_core::textmetrics::{bleu, lcs_len, rouge_l, rouge_n, TokenSeq};
use faithex_harness::{run_budget_experiment, scale_examples_experiment, ExperimentConfig, Method};
use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------------------
// 1. Explanation corpus round trip

const CORPUS: &[&str] = &[
    "If pdsu lesser than or equal to 1014, then no",
    "If pdsu not greater than 1020, then it is certainly no",
    "If vpgu equal to antartica, then blicket",
    "If vpgu equal to antartica, then it is definitely blicket",
    "If twqk equal to no, then it is seldom fem",
    "If bgbs not equal to 4, then it is certainly 2",
    "If bgbs equal to 4, then it is seldom 2",
    "If aehw equal to no AND hxva equal to africas, then tupa.",
    "If hxva equal to africas, then it is definitely tupa",
    "If kjwx greater than or equal to 18 OR bzjf greater than 1601, then it is definitely 1. ",
    "If kjwx not lesser than 19, then it is likely 1",
    "If bgbs not equal to 4, then 2",
    "If aehw equal to yes, then not tupa.",
    "If szoj not equal to 3, then not 5",
    "If skewness lesser than or equal to 3.049, then it is occasionally Fake.",
    "If kurtosis lesser than or equal to 0.995, then it is often Fake",
    "If kurtosis lesser than 9600, then it is frequently Fake",
    "If SGPT lesser than or equal to 39, then patient is generally No",
    "If age lesser than or equal to 39, then patient is generally No",
    "If middle-middle-square equal to x, then Game over is sometimes positive",
    "If Education not equal to Dropout, then Income is certainly >50K",
];

/// The canonical form drops trailing whitespace and a sentence-final period.
fn canonical(s: &str) -> &str {
    let s = s.trim_end();
    s.strip_suffix('.').unwrap_or(s)
}

fn criterion_1() -> Outcome {
    for s in CORPUS {
        let e = parse(s).map_err(|err| format!("{s:?}: {err}"))?;
        let out = render(&e);
        check(out == canonical(s), || format!("{s:?} rendered as {out:?}"))?;
        check(parse(&out).map_err(|e| e.to_string())? == e, || format!("{s:?} reparse differs"))?;
    }
    let e = parse("If Education not equal to Dropout, then Income is certainly >50K").map_err(|e| e.to_string())?;
    let conf = render_with_confidence(&e).map_err(|e| e.to_string())?;
    let want = "95% of the time, the Income is >50K if Education not equal to Dropout";
    check(conf == want, || format!("confidence form {conf:?}"))?;
    Ok(format!("{} strings round-trip", CORPUS.len()))
}

// ---------------------------------------------------------------------------
// Random small schemas and explanations shared by criteria 2 and 8

const CAT_VALUES: [&str; 3] = ["a", "b", "c"];
const NUM_VALUES: [f64; 3] = [1.0, 2.0, 3.0];

fn random_schema(rng: &mut StdRng) -> FeatureSchema {
    let n = rng.random_range(1..=3);
    let specs = (0..n)
        .map(|i| {
            let name = ["fa", "fb", "fc"][i];
            if rng.random_bool(0.5) {
                let k = rng.random_range(1..=3);
                FeatureSpec::categorical(name, &CAT_VALUES[..k])
            } else {
                FeatureSpec::numeric(name, 1.0, 3.0)
            }
        })
        .collect();
    FeatureSchema::new(specs).unwrap()
}

fn domain_of(spec: &FeatureSpec) -> Vec<Value> {
    match &spec.kind {
        faithex_core::executor::FeatureKind::Categorical { domain } => domain.iter().map(|d| Value::Cat(d.clone())).collect(),
        faithex_core::executor::FeatureKind::Numeric { .. } => NUM_VALUES.iter().map(|&x| Value::Num(x)).collect(),
    }
}

/// Every combination of feature values.
fn all_examples(schema: &FeatureSchema) -> Vec<Example> {
    let mut out = vec![Example::new(Vec::<(String, Value)>::new())];
    for spec in schema.features() {
        out = out
            .into_iter()
            .flat_map(|e| {
                domain_of(spec).into_iter().map(move |v| {
                    let mut e = e.clone();
                    e.values.insert(spec.name.clone(), v);
                    e
                })
            })
            .collect();
    }
    out
}

fn random_condition(schema: &FeatureSchema, rng: &mut StdRng) -> Condition {
    let spec = schema.features().choose(rng).unwrap();
    if spec.is_numeric() {
        let cmp = *Comparator::ALL.choose(rng).unwrap();
        let v = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5].choose(rng).copied().unwrap();
        Condition::new(&spec.name, cmp, v).unwrap()
    } else {
        let cmp = *[Comparator::Eq, Comparator::Neq].choose(rng).unwrap();
        let v = *["a", "b", "c", "d"].choose(rng).unwrap();
        Condition::new(&spec.name, cmp, v).unwrap()
    }
}

fn random_explanation(schema: &FeatureSchema, rng: &mut StdRng) -> Explanation {
    let n = rng.random_range(1..=3);
    let mut clause = ClauseTree::Cond(random_condition(schema, rng));
    for _ in 1..n {
        let op = if rng.random_bool(0.5) { Connective::And } else { Connective::Or };
        clause = clause.join(op, ClauseTree::Cond(random_condition(schema, rng)));
    }
    let q = if rng.random_bool(0.6) { Some(*Quantifier::ALL.choose(rng).unwrap()) } else { None };
    Explanation::new(clause, "yes").unwrap().with_quantifier(q).negated(rng.random_bool(0.5))
}

// ---------------------------------------------------------------------------
// 2. Executor against a brute-force truth-table interpreter

fn oracle_confidence(q: Option<Quantifier>) -> f64 {
    let Some(q) = q else { return 1.0 };
    match q.word() {
        "always" => 1.0,
        "certainly" | "definitely" => 0.95,
        "usually" => 0.9,
        "generally" => 0.85,
        "likely" | "often" => 0.7,
        "frequently" => 0.65,
        "sometimes" => 0.5,
        "occasionally" => 0.4,
        "rarely" => 0.15,
        "seldom" => 0.1,
        "never" => 0.0,
        w => panic!("unexpected quantifier {w}"),
    }
}

fn oracle_condition(c: &Condition, e: &Example) -> bool {
    match (e.get(&c.feature).unwrap(), &c.value) {
        (Value::Num(x), Value::Num(v)) => match c.comparator {
            Comparator::Eq => x == v,
            Comparator::Neq => x != v,
            Comparator::Gt => x > v,
            Comparator::Lt => x < v,
            Comparator::Geq => x >= v,
            Comparator::Leq => x <= v,
            Comparator::Ngt => x <= v,
            Comparator::Nlt => x >= v,
        },
        (Value::Cat(s), Value::Cat(v)) => match c.comparator {
            Comparator::Eq => s == v,
            Comparator::Neq => s != v,
            other => panic!("ordering comparator {other:?} on a category"),
        },
        (a, b) => panic!("mismatched {a:?} / {b:?}"),
    }
}

fn oracle_clause(t: &ClauseTree, e: &Example) -> bool {
    match t {
        ClauseTree::Cond(c) => oracle_condition(c, e),
        ClauseTree::Node { op: Connective::And, left, right } => oracle_clause(left, e) & oracle_clause(right, e),
        ClauseTree::Node { op: Connective::Or, left, right } => oracle_clause(left, e) | oracle_clause(right, e),
    }
}

fn criterion_2() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2);
    let mut checked = 0;
    for i in 0..500 {
        let schema = random_schema(&mut rng);
        let expl = random_explanation(&schema, &mut rng);
        let stated_yes = !expl.label_negated;
        let direction_yes = if oracle_confidence(expl.quantifier) >= 0.5 { stated_yes } else { !stated_yes };
        for ex in all_examples(&schema) {
            let applies = oracle_clause(&expl.clause, &ex);
            let yes = if applies { direction_yes } else { !direction_yes };
            let v = apply_explanation(&expl, &ex, "yes").map_err(|e| format!("#{i}: {e}"))?;
            let want = if yes { "yes" } else { "not yes" };
            check(v.applies == applies && v.predicted_label == want, || {
                format!("#{i} {:?} on {:?}: got {v:?}", render(&expl), ex)
            })?;
            checked += 1;
        }
    }
    Ok(format!("500 explanations, {checked} example evaluations, 0 mismatches"))
}

// ---------------------------------------------------------------------------
// 3. Generator statistics

fn criterion_3() -> Outcome {
    let mut worst_fraction: f64 = 1.0;
    let mut worst_gap: f64 = 0.0;
    for d in ComplexityDescriptor::all() {
        for seed in 0..20 {
            let t = generate_task(d, 5, 10, 100, seed).map_err(|e| format!("{}: {e}", d.tag()))?;
            let frac = t.train.min_class_fraction();
            worst_fraction = worst_fraction.min(frac);
            check(frac >= 0.10, || format!("{} seed {seed}: min class {frac}", d.tag()))?;
            if !d.quantifier {
                let f = faithfulness(&t.planted, &t.train).map_err(|e| e.to_string())?;
                check(f == 1.0, || format!("{} seed {seed}: planted faithfulness {f}", d.tag()))?;
            } else {
                let big = generate_task(d, 5, 2000, 0, seed).map_err(|e| e.to_string())?;
                let stated = big.planted.label.clone();
                let (mut fired, mut hits) = (0usize, 0usize);
                for (ex, y) in big.train.examples().iter().zip(big.train.labels()) {
                    if clause_holds(&big.planted.clause, ex).map_err(|e| e.to_string())? {
                        fired += 1;
                        hits += usize::from((y == &stated) != big.planted.label_negated);
                    }
                }
                let rate = hits as f64 / fired as f64;
                let gap = (rate - big.planted.confidence()).abs();
                worst_gap = worst_gap.max(gap);
                check(gap <= 0.02, || {
                    format!("{} seed {seed}: stated-label rate {rate} vs {}", d.tag(), big.planted.confidence())
                })?;
            }
        }
    }
    Ok(format!(
        "480 tasks; min class fraction {worst_fraction:.3}; worst quantifier gap {worst_gap:.4}"
    ))
}

// ---------------------------------------------------------------------------
// 4. Planted recovery

fn criterion_4() -> Outcome {
    let config = SearchConfig::with_strategy(Strategy::PerFeature);
    let mut perfect = 0;
    let mut sim = 0.0;
    for seed in 0..100 {
        let t = generate_task(ComplexityDescriptor::SIMPLE, 5, 10, 100, seed).map_err(|e| e.to_string())?;
        let out = explain(&t.train, &config).map_err(|e| e.to_string())?;
        perfect += usize::from(out.best.faithfulness == 1.0);
        sim += simulatability(&out.best.explanation, &t.test).map_err(|e| e.to_string())?;
    }
    let mean_sim = sim / 100.0;
    check(perfect >= 95 && mean_sim >= 0.90, || {
        format!("{perfect}/100 perfect, mean simulatability {mean_sim:.4}")
    })?;
    Ok(format!("{perfect}/100 with faithfulness 1.0; mean held-out simulatability {mean_sim:.4}"))
}

// ---------------------------------------------------------------------------
// 5. Strategy ordering

fn mean_faithfulness(config: &SearchConfig) -> Result<f64, String> {
    let all = ComplexityDescriptor::all();
    let mut total = 0.0;
    for seed in 0..200u64 {
        let t = generate_task(all[seed as usize % all.len()], 5, 10, 0, seed).map_err(|e| e.to_string())?;
        total += explain(&t.train, config).map_err(|e| e.to_string())?.best.faithfulness;
    }
    Ok(total / 200.0)
}

fn criterion_5() -> Outcome {
    let pf = mean_faithfulness(&SearchConfig::with_strategy(Strategy::PerFeature))?;
    let beam = mean_faithfulness(&SearchConfig::with_strategy(Strategy::Beam))?;
    let top1 = mean_faithfulness(&SearchConfig::with_strategy(Strategy::Top1))?;
    let deep = mean_faithfulness(&SearchConfig {
        max_conjunction_depth: 2,
        ..SearchConfig::with_strategy(Strategy::Beam)
    })?;
    check(pf >= beam && beam >= top1 && pf - top1 > 0.0, || {
        format!("PF {pf:.4}, BEAM {beam:.4}, TOP1 {top1:.4}")
    })?;
    Ok(format!(
        "PF {pf:.4} >= BEAM {beam:.4} >= TOP1 {top1:.4}; (BEAM at depth 2: {deep:.4})"
    ))
}

// ---------------------------------------------------------------------------
// 6. Budget regime

fn criterion_6() -> Outcome {
    let config = ExperimentConfig::default();
    let report = run_budget_experiment(&config).map_err(|e| e.to_string())?;
    for r in &report.runs {
        assert!(r.budget_used <= 15, "run {:?} used {} calls", r.method, r.budget_used);
    }
    check(report.ledger.reported_total == report.ledger.metered_total, || "budget ledger mismatch".into())?;
    let pf = report.row(Method::PerFeature).ok_or("no PF row")?.faithfulness.mean;
    let lime = report.row(Method::Lime).ok_or("no LIME row")?.faithfulness.mean;
    check(pf > lime, || format!("PF {pf:.4} vs LIME {lime:.4}"))?;
    let max_used = report.rows.iter().map(|r| r.max_budget_used).max().unwrap_or(0);
    Ok(format!(
        "PF {pf:.4} > LIME {lime:.4}; max calls in any run {max_used}; {} runs",
        report.runs.len()
    ))
}

// ---------------------------------------------------------------------------
// 7. Subset ensembling

fn criterion_7() -> Outcome {
    let config = SearchConfig::with_strategy(Strategy::PerFeature);
    let all = ComplexityDescriptor::all();
    let (mut ens_total, mut single_total) = (0.0, 0.0);
    for seed in 0..50u64 {
        let t = generate_task(all[seed as usize % all.len()], 5, 80, 0, seed).map_err(|e| e.to_string())?;
        let out = ensemble_subsets(&t.train, &config, 8, 10, seed).map_err(|e| e.to_string())?;
        for w in &out.subset_winners {
            check(out.best.faithfulness >= w.faithfulness, || {
                format!("seed {seed}: ensemble {} below subset winner {}", out.best.faithfulness, w.faithfulness)
            })?;
        }
        ens_total += out.best.faithfulness;
        single_total += out.subset_winners[0].faithfulness;
    }
    let (ens, single) = (ens_total / 50.0, single_total / 50.0);
    check(ens >= single, || format!("ensemble {ens:.4} < single {single:.4}"))?;
    let scale = scale_examples_experiment(&ExperimentConfig::default(), &[10, 80], 20).map_err(|e| e.to_string())?;
    let p = &scale.points[1];
    Ok(format!(
        "argmax holds on 50 seeds; all-N mean ensemble {ens:.4} >= single {single:.4}; (census N=80: {:.4} vs {:.4})",
        p.ensemble_faithfulness.mean, p.single_faithfulness.mean
    ))
}

// ---------------------------------------------------------------------------
// 8. Metric identities

fn criterion_8() -> Outcome {
    let mut rng = StdRng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let schema = random_schema(&mut rng);
        let expl = random_explanation(&schema, &mut rng);
        let pool = all_examples(&schema);
        let n = rng.random_range(1..=30);
        let examples: Vec<Example> = (0..n).map(|_| pool.choose(&mut rng).unwrap().clone()).collect();
        let flags: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        let batch = LabeledBatch::from_flags(schema, examples, &flags, LabelKind::Predicted, "yes").unwrap();
        let t = tally(&expl, &batch).map_err(|e| e.to_string())?;
        let off_matches = batch
            .examples()
            .iter()
            .zip(&flags)
            .filter(|(e, &y)| {
                let v = apply_explanation(&expl, e, "yes").unwrap();
                !v.applies && (v.predicted_label == "yes") == y
            })
            .count();
        check(t.matches == t.covered_matches + off_matches, || format!("#{i}: count identity {t:?}"))?;
        let f = faithfulness(&expl, &batch).map_err(|e| e.to_string())?;
        let rhs = t.coverage() * t.precision() + (1.0 - t.coverage()) * t.off_coverage_match_rate();
        worst = worst.max((f - rhs).abs());
        check((f - rhs).abs() <= 1e-12, || format!("#{i}: {f} vs {rhs}"))?;
    }

    let tok = TokenSeq::new;
    let same = tok("If a equal to 1, then it is likely yes");
    let r = rouge_n(&same, &same, 1).unwrap();
    check(
        bleu(&same, std::slice::from_ref(&same)).unwrap() == 1.0
            && r.precision == 1.0
            && r.recall == 1.0
            && r.f1 == 1.0
            && rouge_n(&same, &same, 2).unwrap().f1 == 1.0
            && rouge_l(&same, &same).unwrap() == 1.0,
        || "identity inputs do not score 1.0".into(),
    )?;

    let b = bleu(&tok("if a equal to 1 then yes"), &[tok("if a equal to 2 then yes")]).unwrap();
    let b_want = (6.0 / 7.0 * 5.0 / 7.0 * 3.0 / 6.0 * 2.0 / 5.0f64).powf(0.25);
    check((b - b_want).abs() < 1e-9, || format!("BLEU {b} vs {b_want}"))?;
    let r = rouge_n(&tok("p q r s t"), &tok("p w x y"), 1).unwrap();
    let f1_want = 2.0 * 0.2 * 0.25 / 0.45;
    check(
        (r.precision - 0.2).abs() < 1e-9 && (r.recall - 0.25).abs() < 1e-9 && (r.f1 - f1_want).abs() < 1e-9,
        || format!("ROUGE-1 {r:?}"),
    )?;
    // LCS against an exhaustive subsequence oracle on random 10-token pairs.
    for _ in 0..50 {
        let a: Vec<String> = (0..10).map(|_| ["x", "y", "z"].choose(&mut rng).unwrap().to_string()).collect();
        let b: Vec<String> = (0..10).map(|_| ["x", "y", "z"].choose(&mut rng).unwrap().to_string()).collect();
        let mut best = 0;
        for mask in 0u32..1 << 10 {
            let sub: Vec<&String> = (0..10).filter(|i| mask & (1 << i) != 0).map(|i| &a[i]).collect();
            let mut it = b.iter();
            if sub.iter().all(|s| it.any(|t| t == *s)) {
                best = best.max(sub.len());
            }
        }
        check(lcs_len(&a, &b) == best, || format!("LCS {a:?} / {b:?}"))?;
    }
    Ok(format!("1000 pairs, worst float residual {worst:.1e}; BLEU {b:.9}; ROUGE-1 and LCS oracles agree"))
}

// ---------------------------------------------------------------------------
// 9. Determinism

fn criterion_9() -> Outcome {
    let config = ExperimentConfig {
        seed: 9,
        ..ExperimentConfig::default()
    };
    let a = run_budget_experiment(&config).map_err(|e| e.to_string())?.to_json();
    let b = run_budget_experiment(&config).map_err(|e| e.to_string())?.to_json();
    check(a == b, || "reports differ".into())?;
    Ok(format!("two runs, {} identical bytes", a.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 explanation corpus round-trip", criterion_1, Duration::from_secs(1)),
        ("2 executor vs truth-table oracle", criterion_2, Duration::from_secs(10)),
        ("3 generator statistics", criterion_3, Duration::from_secs(30)),
        ("4 planted recovery", criterion_4, Duration::from_secs(30)),
        ("5 strategy ordering", criterion_5, Duration::from_secs(60)),
        ("6 budget regime", criterion_6, Duration::from_secs(300)),
        ("7 subset ensembling", criterion_7, Duration::from_secs(60)),
        ("8 metric identities", criterion_8, Duration::from_secs(10)),
        ("9 determinism", criterion_9, Duration::from_secs(300)),
    ];
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let elapsed = start.elapsed();
        let result = result.and_then(|msg| {
            if elapsed <= limit {
                Ok(msg)
            } else {
                Err(format!("{msg}; took {elapsed:.2?}, limit {limit:?}"))
            }
        });
        match result {
            Ok(msg) => println!("PASS criterion {name}: {msg} [{elapsed:.2?}]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg} [{elapsed:.2?}]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 9 criteria failed");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
