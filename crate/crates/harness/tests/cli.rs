use std::process::Command;

fn faithex(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_faithex")).args(args).output().unwrap()
}

#[test]
fn parse_prints_the_canonical_form() {
    let out = faithex(&["parse", "--confidence", "If Education not equal to Dropout, then Income is certainly >50K."]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("If Education not equal to Dropout, then Income is certainly >50K"));
    assert_eq!(lines.next(), Some("95% of the time, the Income is >50K if Education not equal to Dropout"));
}

#[test]
fn bad_input_exits_with_two() {
    assert_eq!(faithex(&["parse", "If x bigger than 3, then y"]).status.code(), Some(2));
    assert_eq!(faithex(&["bench", "--nonsense"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "subset_size = 0\n").unwrap();
    assert_eq!(faithex(&["bench", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    let csv = dir.path().join("ragged.csv");
    std::fs::write(&csv, "a,b,y\n1,2,p\n1,n\n").unwrap();
    assert_eq!(faithex(&["explain", "--input", csv.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn forge_then_explain_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = faithex(&["forge", "--seed", "7", "--train", "20", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let planted = std::fs::read_to_string(dir.path().join("task-7/planted.txt")).unwrap();
    let train = dir.path().join("task-7/train.csv");
    let out = faithex(&["explain", "--input", train.to_str().unwrap(), "--label-column", "label"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let best = String::from_utf8(out.stdout).unwrap();
    let label = planted.trim().rsplit(' ').next().unwrap();
    assert!(best.lines().next().unwrap().ends_with(label), "{best} vs {planted}");

    let eval = faithex(&["evaluate", "--input", train.to_str().unwrap(), "--label-column", "label", "--explanation", planted.trim()]);
    assert!(eval.status.success(), "{}", String::from_utf8_lossy(&eval.stderr));
    let report: serde_json::Value = serde_json::from_slice(&eval.stdout).unwrap();
    assert_eq!(report["faithfulness"], 1.0);
}

#[test]
fn bench_writes_a_markdown_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    std::fs::write(&cfg, "synthetic_rows = 800\nn_subsets = 4\n").unwrap();
    let out = faithex(&["bench", "--config", cfg.to_str().unwrap(), "--markdown"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("| PF"), "{text}");
}
