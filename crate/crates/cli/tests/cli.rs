use std::path::Path;
use std::process::{Command, Output};

fn dlearn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dlearn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = dlearn(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_learn_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let ds = dir.path().join("ds.txt");
    let learned = dir.path().join("learned");
    ok(&["generate", "--fixture", "gripper", "--seed", "4", "--out", s(&ds)]);
    let text = std::fs::read_to_string(&ds).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("pos ")).count(), 30);

    ok(&[
        "learn",
        "--fixture",
        "gripper",
        "--dataset",
        s(&ds),
        "--out",
        s(&learned),
    ]);
    for f in ["domain.pddl", "automaton.txt", "trace.jsonl"] {
        assert!(learned.join(f).exists(), "{f}");
    }
    let trace = std::fs::read_to_string(learned.join("trace.jsonl")).unwrap();
    assert!(trace
        .lines()
        .all(|l| serde_json::from_str::<serde_json::Value>(l).is_ok()));

    let metrics = ok(&[
        "evaluate",
        "--fixture",
        "gripper",
        "--learned",
        s(&learned.join("domain.pddl")),
    ]);
    let v: serde_json::Value = serde_json::from_str(&metrics).unwrap();
    assert_eq!(v["e_sigma"], 0.0);
    assert_eq!(v["acc"], 100.0);
}

#[test]
fn learn_prints_domain_without_out() {
    let out = ok(&[
        "--sequential",
        "learn",
        "--fixture",
        "blocksworld",
        "--seed",
        "2",
        "--variant",
        "generation_only",
    ]);
    assert!(out.starts_with("(define (domain blocksworld)"));
    assert_eq!(out.matches("(:action").count(), 4);
}

#[test]
fn learn_from_pddl_files() {
    let dir = tempfile::tempdir().unwrap();
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures");
    let out = ok(&[
        "learn",
        "--domain",
        s(&root.join("neg-elevator-domain.pddl")),
        "--problems",
        s(&root.join("neg-elevator-p1.pddl")),
        s(&root.join("neg-elevator-p2.pddl")),
        "--problem-index",
        "1",
        "--out",
        s(dir.path()),
    ]);
    assert!(out.is_empty());
    assert!(std::fs::read_to_string(dir.path().join("domain.pddl"))
        .unwrap()
        .contains("(not "));
}

#[test]
fn experiment_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rep");
    ok(&[
        "experiment",
        "--fixture",
        "gripper",
        "--seed",
        "1",
        "--noise",
        "0.1",
        "--out",
        s(&out),
    ]);
    let csv = std::fs::read_to_string(out.join("report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3 + 1);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(json["config"]["noise"], 0.1);
    assert_eq!(json["cells"].as_array().unwrap().len(), 3);
    assert!(std::fs::read_to_string(out.join("report.md"))
        .unwrap()
        .contains("| gripper | full |"));
}

#[test]
fn experiment_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "fixture = \"neg-elevator\"\nseeds = [3]\nn_problems = 5\nvariant = \"tabu_alone\"\n",
    )
    .unwrap();
    let md = ok(&["experiment", "--config", s(&cfg)]);
    assert!(md.contains("| neg-elevator | tabu_alone |"));
}

#[test]
fn ablation_table_has_one_row_per_variant() {
    let md = ok(&[
        "ablation",
        "--fixture",
        "gripper",
        "--seed",
        "1",
        "--variant",
        "full",
        "--variant",
        "generation_only",
    ]);
    assert_eq!(md.lines().count(), 4);
    assert!(md.contains("| gripper | generation_only |"));
}

#[test]
fn bad_input_fails_cleanly() {
    let out = dlearn(&["learn", "--fixture", "gripper", "--variant", "bogus"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown variant"));

    let out = dlearn(&["generate", "--fixture", "sokoban"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown fixture"));

    let out = dlearn(&["generate", "--fixture", "gripper", "--noise", "2"]);
    assert!(!out.status.success());

    let out = dlearn(&["experiment", "--fixture", "gripper", "--problem-index", "1"]);
    assert!(!out.status.success());
}
