use faithex_core::executor::{
    faithfulness, simulatability, tally, Example, FeatureSchema, FeatureSpec, LabelKind, LabeledBatch,
};
use faithex_core::explainer::{explain, SearchConfig, Strategy as Search};
use faithex_core::explang::{parse, render, ClauseTree, Comparator, Condition, Connective, Explanation, Quantifier};
use faithex_core::taskforge::{generate_task, ComplexityDescriptor};
use faithex_core::textmetrics::{bleu, rouge_l, rouge_n, TokenSeq};
use proptest::prelude::*;

const NUMERIC: [&str; 3] = ["kjwx", "pdsu", "age"];
const CATEGORICAL: [&str; 2] = ["vpgu", "color"];
const CATEGORIES: [&str; 3] = ["red", "green", "blue"];

fn schema() -> FeatureSchema {
    let mut specs: Vec<FeatureSpec> = NUMERIC.iter().map(|n| FeatureSpec::numeric(*n, 0.0, 10.0)).collect();
    specs.extend(CATEGORICAL.iter().map(|n| FeatureSpec::categorical(*n, &CATEGORIES)));
    FeatureSchema::new(specs).unwrap()
}

fn condition() -> impl Strategy<Value = Condition> {
    let numeric = (0..NUMERIC.len(), 0..Comparator::ALL.len(), -40i32..440).prop_map(|(f, c, v)| {
        Condition::new(NUMERIC[f], Comparator::ALL[c], f64::from(v) / 4.0).unwrap()
    });
    let categorical = (0..CATEGORICAL.len(), any::<bool>(), 0..CATEGORIES.len()).prop_map(|(f, eq, v)| {
        let cmp = if eq { Comparator::Eq } else { Comparator::Neq };
        Condition::new(CATEGORICAL[f], cmp, CATEGORIES[v]).unwrap()
    });
    prop_oneof![numeric, categorical]
}

/// Left-nested, as the surface text is read.
fn clause() -> impl Strategy<Value = ClauseTree> {
    (condition(), prop::collection::vec((any::<bool>(), condition()), 0..=2)).prop_map(|(first, rest)| {
        rest.into_iter().fold(ClauseTree::Cond(first), |acc, (and, c)| {
            let op = if and { Connective::And } else { Connective::Or };
            acc.join(op, ClauseTree::Cond(c))
        })
    })
}

fn explanation() -> impl Strategy<Value = Explanation> {
    (
        clause(),
        prop::option::of(0..Quantifier::ALL.len()),
        any::<bool>(),
        prop::sample::select(vec!["yes", "blicket", ">50K", "2"]),
    )
        .prop_map(|(c, q, neg, label)| {
            Explanation::new(c, label)
                .unwrap()
                .with_quantifier(q.map(|i| Quantifier::ALL[i]))
                .negated(neg)
        })
}

fn example() -> impl Strategy<Value = Example> {
    (prop::collection::vec(0u8..=10, NUMERIC.len()), prop::collection::vec(0..CATEGORIES.len(), CATEGORICAL.len()))
        .prop_map(|(nums, cats)| {
            let mut e = Example::new(Vec::<(String, faithex_core::explang::Value)>::new());
            for (n, v) in NUMERIC.iter().zip(nums) {
                e.values.insert(n.to_string(), f64::from(v).into());
            }
            for (n, v) in CATEGORICAL.iter().zip(cats) {
                e.values.insert(n.to_string(), CATEGORIES[v].into());
            }
            e
        })
}

fn batch() -> impl Strategy<Value = Vec<(Example, bool)>> {
    prop::collection::vec((example(), any::<bool>()), 1..40)
}

fn labeled(rows: Vec<(Example, bool)>, label: &str) -> LabeledBatch {
    let (examples, flags): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    LabeledBatch::from_flags(schema(), examples, &flags, LabelKind::Predicted, label).unwrap()
}

proptest! {
    #[test]
    fn render_parse_round_trip(e in explanation()) {
        let text = render(&e);
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &e);
        prop_assert_eq!(render(&back), text);
    }

    #[test]
    fn faithfulness_decomposes_by_coverage(e in explanation(), rows in batch()) {
        let b = labeled(rows, &e.label);
        let t = tally(&e, &b).unwrap();
        prop_assert!(t.covered_matches <= t.covered && t.covered <= t.total && t.matches <= t.total);
        let f = faithfulness(&e, &b).unwrap();
        let rhs = t.coverage() * t.precision() + (1.0 - t.coverage()) * t.off_coverage_match_rate();
        prop_assert!((f - rhs).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&f));
    }

    #[test]
    fn flipping_every_label_flips_every_match(e in explanation(), rows in batch()) {
        let flipped: Vec<_> = rows.iter().map(|(x, y)| (x.clone(), !y)).collect();
        let a = faithfulness(&e, &labeled(rows, &e.label)).unwrap();
        let b = faithfulness(&e, &labeled(flipped, &e.label)).unwrap();
        prop_assert!((a + b - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn rouge_1_ignores_order(words in prop::collection::vec("[a-e]{1,3}", 1..12), seed in any::<u64>()) {
        let mut shuffled = words.clone();
        let k = (seed as usize) % shuffled.len();
        shuffled.rotate_left(k);
        shuffled.reverse();
        let r = TokenSeq::new(&words.join(" "));
        let a = rouge_n(&TokenSeq::new(&shuffled.join(" ")), &r, 1).unwrap();
        prop_assert!((a.f1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn text_scores_are_bounded(a in prop::collection::vec("[a-d]{1,2}", 1..15), b in prop::collection::vec("[a-d]{1,2}", 1..15)) {
        let (a, b) = (TokenSeq::new(&a.join(" ")), TokenSeq::new(&b.join(" ")));
        let scores = [
            bleu(&a, std::slice::from_ref(&b)).unwrap(),
            rouge_n(&a, &b, 1).unwrap().f1,
            rouge_n(&a, &b, 2).unwrap().f1,
            rouge_l(&a, &b).unwrap(),
        ];
        for s in scores {
            prop_assert!((0.0..=1.0).contains(&s), "{s}");
        }
    }
}

#[test]
fn bleu_is_order_sensitive() {
    let r = TokenSeq::new("if a equal to 1 then it is likely yes");
    let shuffled = TokenSeq::new("yes likely is it then 1 to equal a if");
    let same = bleu(&r, std::slice::from_ref(&r)).unwrap();
    let perm = bleu(&shuffled, std::slice::from_ref(&r)).unwrap();
    assert_eq!(same, 1.0);
    assert!(perm < 0.5, "{perm}");
    assert_eq!(rouge_n(&shuffled, &r, 1).unwrap().f1, 1.0);
}

#[test]
fn explained_tasks_score_like_the_executor() {
    let config = SearchConfig::with_strategy(Search::PerFeature);
    for (i, d) in ComplexityDescriptor::all().into_iter().enumerate() {
        let t = generate_task(d, 5, 10, 50, i as u64).unwrap();
        let out = explain(&t.train, &config).unwrap();
        let best = &out.best;
        assert_eq!(best.faithfulness, faithfulness(&best.explanation, &t.train).unwrap());
        assert_eq!(parse(&best.text).unwrap(), best.explanation);
        let s = simulatability(&best.explanation, &t.test).unwrap();
        assert!((0.0..=1.0).contains(&s));
    }
}
