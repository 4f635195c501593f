//! End-to-end tests of the command-line interface.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chardep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn train_model(dir: &Path, name: &str, extra: &[&str]) -> PathBuf {
    let out = dir.join(name);
    let cfg = fixture("small.cfg");
    let train = fixture("toy10.conll");
    let mut args = vec![
        "train",
        "--config",
        s(&cfg),
        "--train",
        s(&train),
        "--out",
        s(&out),
    ];
    args.extend_from_slice(extra);
    let o = run(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn evaluate_micro_fixture_matches_hand_counts() {
    let gold = fixture("micro_gold.conll");
    let pred = fixture("micro_pred.conll");
    let o = run(&["evaluate", "--gold", s(&gold), "--pred", s(&pred)]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "sentences: 2\nseg_precision: 0.750000\nseg_recall: 0.857143\nseg_f1: 0.800000\n\
         uf: 0.769231\nlf: 0.769231\nuas: n/a\nlas: n/a\ncomplete_match: 0.500000\n"
    );
    let o = run(&[
        "evaluate",
        "--gold",
        s(&gold),
        "--pred",
        s(&pred),
        "--punct-labels",
        "",
    ]);
    let out = stdout(&o);
    assert!(out.contains("uf: 0.666667\n"), "{}", out);
    assert!(out.contains("complete_match: 0.000000\n"), "{}", out);
}

#[test]
fn self_evaluation_is_perfect() {
    let gold = fixture("micro_gold.conll");
    let o = run(&["evaluate", "--gold", s(&gold), "--pred", s(&gold)]);
    assert_eq!(
        stdout(&o),
        "sentences: 2\nseg_precision: 1.000000\nseg_recall: 1.000000\nseg_f1: 1.000000\n\
         uf: 1.000000\nlf: 1.000000\nuas: 1.000000\nlas: 1.000000\ncomplete_match: 1.000000\n"
    );
}

#[test]
fn evaluate_rejects_count_mismatch() {
    let gold = fixture("micro_gold.conll");
    let toy = fixture("toy10.conll");
    let o = run(&["evaluate", "--gold", s(&gold), "--pred", s(&toy)]);
    assert_eq!(code(&o), 2);
}

#[test]
fn usage_and_data_errors() {
    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["train", "--train", "x"])), 1);
    let toy = fixture("toy10.conll");
    assert_eq!(
        code(&run(&[
            "train",
            "--train",
            s(&toy),
            "--out",
            "/nonexistent/m",
            "--mode",
            "greedy"
        ])),
        1
    );
    assert_eq!(
        code(&run(&[
            "evaluate",
            "--gold",
            "/nonexistent",
            "--pred",
            "/nonexistent"
        ])),
        2
    );
    assert_eq!(code(&run(&["--help"])), 0);
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "mode = greedy\n").unwrap();
    let out = dir.path().join("m.json");
    let o = run(&[
        "train",
        "--config",
        s(&cfg),
        "--train",
        s(&toy),
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
}

#[test]
fn training_is_deterministic_and_reduces_loss() {
    let dir = TempDir::new().unwrap();
    let a = train_model(dir.path(), "a.json", &[]);
    let b = train_model(dir.path(), "b.json", &["--jobs", "1"]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let trace = fs::read_to_string(dir.path().join("a.json.trace.tsv")).unwrap();
    let value = |prefix: &str| -> f64 {
        let line = trace.lines().find(|l| l.starts_with(prefix)).unwrap();
        line.split('\t').nth(1).unwrap().parse().unwrap()
    };
    assert!(value("final\t") < value("0\t"), "{}", trace);
    let c = train_model(dir.path(), "c.json", &["--seed", "4"]);
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn training_prints_dev_scores_per_epoch() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("m.json");
    let cfg = fixture("small.cfg");
    let toy = fixture("toy10.conll");
    let o = run(&[
        "train",
        "--config",
        s(&cfg),
        "--train",
        s(&toy),
        "--dev",
        s(&toy),
        "--out",
        s(&out),
        "--mode",
        "leftward",
    ]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 15);
    assert!(rows
        .iter()
        .all(|r| r.split('\t').count() == 4 && !r.contains('-')));
    assert!(fs::read_to_string(&out)
        .unwrap()
        .contains("\"mode\":\"leftward\""));
}

#[test]
fn parse_reproduces_memorized_corpus() {
    let dir = TempDir::new().unwrap();
    let model = train_model(dir.path(), "m.json", &[]);
    let toy = fixture("toy10.conll");
    let out = dir.path().join("out.conll");
    let o = run(&[
        "parse",
        "--model",
        s(&model),
        "--input",
        s(&toy),
        "--input-format",
        "conll",
        "--output",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        fs::read_to_string(&out).unwrap(),
        fs::read_to_string(&toy).unwrap()
    );
}

#[test]
fn parse_outputs_are_deterministic_and_respect_gold_segmentation() {
    let dir = TempDir::new().unwrap();
    let model = train_model(dir.path(), "m.json", &[]);
    let input = dir.path().join("in.txt");
    // Deliberately unusual segmentations.
    fs::write(&input, "学 生看 工程队。\n\n聪明的城市 发展银行 。\n").unwrap();
    let out1 = dir.path().join("o1.conll");
    let out2 = dir.path().join("o2.conll");
    let chars = dir.path().join("o1.chars");
    for (out, jobs) in [(&out1, "1"), (&out2, "3")] {
        let o = run(&[
            "--jobs",
            jobs,
            "parse",
            "--model",
            s(&model),
            "--input",
            s(&input),
            "--output",
            s(out),
            "--char-output",
            s(&chars),
            "--gold-seg",
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = fs::read_to_string(&out1).unwrap();
    assert_eq!(text, fs::read_to_string(&out2).unwrap());
    let forms: Vec<Vec<&str>> = text
        .split("\n\n")
        .filter(|b| !b.trim().is_empty())
        .map(|b| b.lines().map(|l| l.split('\t').nth(1).unwrap()).collect())
        .collect();
    assert_eq!(
        forms,
        vec![
            vec!["学", "生看", "工程队。"],
            vec!["聪明的城市", "发展银行", "。"]
        ]
    );
    assert_eq!(
        fs::read_to_string(&chars)
            .unwrap()
            .lines()
            .filter(|l| !l.is_empty())
            .count(),
        17
    );
}

#[test]
fn empty_input_gives_empty_output() {
    let dir = TempDir::new().unwrap();
    let model = train_model(dir.path(), "m.json", &[]);
    let input = dir.path().join("empty.txt");
    fs::write(&input, "").unwrap();
    let out = dir.path().join("out.conll");
    let o = run(&[
        "parse",
        "--model",
        s(&model),
        "--input",
        s(&input),
        "--output",
        s(&out),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read_to_string(&out).unwrap(), "");
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{}").unwrap();
    let o = run(&[
        "parse",
        "--model",
        s(&bad),
        "--input",
        s(&input),
        "--output",
        s(&out),
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn analyze_reports_distribution_and_complete_match() {
    let dir = TempDir::new().unwrap();
    let gold = fixture("micro_gold.conll");
    let ann = fixture("micro_annotations.tsv");
    // Two runs of character trees for the gold sentences.
    let run1 = dir.path().join("r1.chars");
    let run2 = dir.path().join("r2.chars");
    fs::write(
        &run1,
        "1\t上\t2\tINTRA\n2\t海\t4\tnsubj\n3\t计\t4\tINTRA\n4\t划\t0\troot\n5\t发\t4\tccomp\n6\t展\t5\tINTRA\n\n\
         1\t他\t2\tnsubj\n2\t来\t0\troot\n3\t了\t2\taux\n4\t。\t2\tpunct\n\n",
    )
    .unwrap();
    fs::write(
        &run2,
        "1\t上\t0\troot\n2\t海\t1\tINTRA\n3\t计\t1\tccomp\n4\t划\t3\tINTRA\n5\t发\t1\tccomp\n6\t展\t5\tINTRA\n\n\
         1\t他\t2\tnsubj\n2\t来\t0\troot\n3\t了\t2\taux\n4\t。\t2\tpunct\n\n",
    )
    .unwrap();
    let o = run(&[
        "analyze",
        "--gold-seg",
        s(&gold),
        "--pred",
        s(&run1),
        "--pred",
        s(&run2),
        "--annotations",
        s(&ann),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    // Run 1 matches all three annotated words, run 2 only 发展.
    assert!(text.contains("annotated_words\t3\n"), "{}", text);
    assert!(text.contains("cm_1to1\t66.67\n"), "{}", text);
    assert!(text.contains("cm_m1\t100.00\n"), "{}", text);
    assert!(text.contains("2\t0,1\t4\t66.67\n"), "{}", text);
    assert!(text.contains("# structure distribution (annotated words)"));

    let model = train_model(dir.path(), "m.json", &[]);
    let toy = fixture("toy10.conll");
    let o = run(&["analyze", "--gold-seg", s(&toy), "--model", s(&model)]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("non_subtree_words\t0\n"), "{}", text);
    assert!(!text.contains("cm_m1"));
    assert_eq!(code(&run(&["analyze", "--gold-seg", s(&toy)])), 1);
}

#[test]
fn selfcheck_passes_and_catches_injected_fault() {
    let o = run(&["selfcheck"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(code(&run(&["selfcheck", "--max-n", "2"])), 0);
    let o = run(&["selfcheck", "--max-n", "4", "--inject-fault", "sign-flip"]);
    assert_eq!(code(&o), 3);
    let text = stdout(&o);
    assert!(text.contains("check: inside"), "{}", text);
    assert!(text.contains("scores:"));
    assert_eq!(code(&run(&["selfcheck", "--max-n", "12"])), 1);
}
