mod common;

use std::path::Path;
use std::process::{Command, Output};

use bilrank::format::{ReportFile, SubspaceFile};
use bilrank::gf::Field;
use bilrank::spanspace::FormSubspace;
use common::{fixture_files, fixtures};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bilrank")).args(args).env_remove("BILRANK_BUDGET").output().unwrap()
}

fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "bilrank {args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(out: &Output) -> Option<i32> {
    out.status.code()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn construct_writes_the_requested_subspaces() {
    let trace =
        SubspaceFile::parse(&run_ok(&["construct", "--name", "trace-symmetric", "--q", "3", "--ext", "2", "--n", "3"]))
            .unwrap();
    assert_eq!((trace.subspace.n(), trace.subspace.dim()), (3, 2));
    assert!(trace.provenance.is_some());
    let alt = SubspaceFile::parse(&run_ok(&["construct", "--name", "alt-full", "--q", "2", "--n", "3"])).unwrap();
    assert_eq!(alt.subspace.basis().len(), 3);
    let column = SubspaceFile::parse(&run_ok(&[
        "construct",
        "--name",
        "column-family",
        "--q",
        "3",
        "--ext",
        "2",
        "--m",
        "3",
        "--r",
        "1",
    ]))
    .unwrap();
    assert_eq!((column.subspace.n(), column.subspace.dim()), (6, 6));
}

#[test]
fn construct_rejects_bad_parameters() {
    let out = run(&["construct", "--name", "alt-odd", "--q", "3", "--k", "4"]);
    assert_eq!(code(&out), Some(2));
    assert!(stderr(&out).contains("odd"), "{}", stderr(&out));
    let out = run(&["construct", "--name", "no-such-family", "--q", "3"]);
    assert_eq!(code(&out), Some(2));
}

#[test]
fn construct_out_creates_parent_directories() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("a/b/alt.sub");
    run_ok(&["construct", "--name", "alt-full", "--q", "3", "--n", "3", "--out", path(&target)]);
    assert_eq!(SubspaceFile::read(&target).unwrap().subspace.dim(), 3);
}

#[test]
fn analyze_summarizes_alt3() {
    let file = fixtures().join("catalogue/alt-full-q3-n3.sub");
    let text = run_ok(&["analyze", path(&file)]);
    assert!(text.contains(r#"summary = "dim 3, rank(M) = {2}, 13 radicals""#), "{text}");
    let json: serde_json::Value = serde_json::from_str(&run_ok(&["analyze", path(&file), "--json"])).unwrap();
    assert_eq!(json["spectrum"], serde_json::json!([2]));
    assert_eq!(json["left_radicals"], 13);
    assert_eq!(json["dim"], 3);
}

#[test]
fn analyze_reports_the_zero_subspace() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("zero.sub");
    let zero = FormSubspace::zero(Field::of_order(3).unwrap(), 3);
    SubspaceFile::new(zero).write(&file).unwrap();
    let text = run_ok(&["analyze", path(&file)]);
    assert!(text.contains("rank(M)=0"), "{text}");
}

#[test]
fn analyze_names_a_dependent_row() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("dependent.sub");
    let text = r#"format = "bilrank-subspace/1"
n = 2
kind = "general"

[field]
p = 3
k = 1
modulus = [1, 1]

[[basis]]
n = 2
rows = [[1, 0], [0, 0]]

[[basis]]
n = 2
rows = [[0, 1], [0, 0]]

[[basis]]
n = 2
rows = [[1, 2], [0, 0]]
"#;
    std::fs::write(&file, text).unwrap();
    let out = run(&["analyze", path(&file)]);
    assert_eq!(code(&out), Some(2));
    assert!(stderr(&out).contains("basis[2] (line 18)"), "{}", stderr(&out));
}

#[test]
fn analyze_reports_malformed_files() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.sub");
    std::fs::write(&file, "format = \"bilrank-subspace/1\"\nn = \n").unwrap();
    let out = run(&["analyze", path(&file)]);
    assert_eq!(code(&out), Some(2));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
    let out = run(&["analyze", path(&dir.path().join("missing.sub"))]);
    assert_eq!(code(&out), Some(2));
}

#[test]
fn verify_passes_on_every_catalogue_and_search_fixture() {
    for dir in ["catalogue", "search"] {
        for file in fixture_files(dir) {
            let out = run(&["verify", path(&file)]);
            assert_eq!(code(&out), Some(0), "{}: {}", file.display(), stderr(&out));
            let report = ReportFile::parse(&String::from_utf8(out.stdout).unwrap()).unwrap();
            assert!(report.reports.iter().any(|r| r.verdict == bilrank::theoremlab::Verdict::Holds));
        }
    }
}

#[test]
fn verify_runs_a_single_checker() {
    let file = fixtures().join("catalogue/alt-full-q3-n3.sub");
    let report = ReportFile::parse(&run_ok(&["verify", path(&file), "--suite", "counting"])).unwrap();
    assert_eq!(report.reports.len(), 1);
    assert_eq!(report.reports[0].theorem_id, "counting");
    let json = run_ok(&["verify", path(&file), "--suite", "counting,spread", "--json"]);
    assert_eq!(ReportFile::parse(&json).unwrap().reports.len(), 2);
    let out = run(&["verify", path(&file), "--suite", "nonsense"]);
    assert_eq!(code(&out), Some(2));
}

#[test]
fn verify_exits_2_when_the_budget_is_exceeded() {
    let file = fixtures().join("catalogue/alt-full-q3-n3.sub");
    let out = run(&["verify", path(&file), "--budget", "10"]);
    assert_eq!(code(&out), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_bilrank"))
        .args(["verify", path(&file), "--suite", "counting"])
        .env("BILRANK_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(code(&out), Some(2));
    let report = ReportFile::parse(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(report.budget, 10);
    assert_eq!(report.reports[0].verdict, bilrank::theoremlab::Verdict::BudgetExceeded);
}

#[test]
fn verify_and_replay_a_corrupted_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let file = fixtures().join("corrupted/orthogonality.sub");
    let report = dir.path().join("report.toml");
    let out = run(&["verify", path(&file), "--suite", "orthogonality", "--explore", "--out", path(&report)]);
    assert_eq!(code(&out), Some(1), "{}", stderr(&out));
    let text = run_ok(&["replay", path(&file), path(&report)]);
    assert!(text.contains("reproduced") && !text.contains("not reproduced"), "{text}");
    // the same witness against a different subspace is not reproduced
    let other = fixtures().join("catalogue/alt-full-q2-n3.sub");
    let out = run(&["replay", path(&other), path(&report)]);
    assert_eq!(code(&out), Some(2));
}

#[test]
fn search_writes_a_verified_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let found = dir.path().join("found.sub");
    let args = [
        "search",
        "--mode",
        "symmetric-distinct-radicals",
        "--q",
        "3",
        "--n",
        "3",
        "--seed",
        "1",
        "--trials",
        "2000",
        "--out",
        path(&found),
    ];
    let log: toml::Table = toml::from_str(&run_ok(&args)).unwrap();
    assert_eq!(log["fixture"].as_str(), Some(path(&found)));
    let file = SubspaceFile::read(&found).unwrap();
    assert_eq!(file.subspace.dim(), 2);
    assert_eq!(file.claims.unwrap().radicals, Some(4));
    let out = run(&["verify", path(&found)]);
    assert_eq!(code(&out), Some(0));
}

#[test]
fn search_with_zero_trials_logs_nothing() {
    let out = run_ok(&[
        "search",
        "--mode",
        "alternating-spectrum",
        "--q",
        "3",
        "--n",
        "5",
        "--s",
        "2",
        "--seed",
        "0",
        "--trials",
        "0",
    ]);
    assert!(out.contains("log = []"), "{out}");
    assert!(!out.contains("fixture"));
}

#[test]
fn search_requires_a_seed() {
    let out = run(&["search", "--mode", "maximal", "--q", "3", "--n", "3"]);
    assert_eq!(code(&out), Some(2));
    assert!(stderr(&out).contains("--seed"), "{}", stderr(&out));
}

#[test]
fn search_scans_extensions_of_an_input() {
    let input = fixtures().join("catalogue/trace-symmetric-q3-ext2-n3.sub");
    let out = run_ok(&["search", "--mode", "maximal", "--q", "3", "--input", path(&input), "--seed", "0"]);
    assert!(out.contains("input is maximal"), "{out}");
}

fn tree(root: &Path) -> Vec<(String, String)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(root).unwrap().display().to_string();
                out.push((rel, std::fs::read_to_string(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn campaign_paths_and_contents_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        run_ok(&[
            "campaign",
            "--sampler",
            "random",
            "--q",
            "3,5",
            "--n",
            "3",
            "--kind",
            "symmetric,alternating",
            "--d",
            "2",
            "--seed-count",
            "3",
            "--out-dir",
            path(dir.path()),
        ]);
    }
    let (ta, tb) = (tree(a.path()), tree(b.path()));
    assert_eq!(ta, tb);
    let names: Vec<&str> = ta.iter().map(|(p, _)| p.as_str()).collect();
    assert!(names.contains(&"summary.toml"));
    assert!(names.contains(&"random/q3-n3-d2-symmetric-seed0/subspace.toml"));
    assert!(names.contains(&"random/q5-n3-d2-alternating-seed2/report.toml"));
    assert_eq!(names.len(), 1 + 2 * 12);
}

#[test]
fn campaign_reads_a_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let config = dir.path().join("campaign.toml");
    let text = format!(
        "out_dir = {:?}\nsuite = [\"counting\", \"bounds\"]\n\n[[grid]]\nsampler = \"alt-full\"\nq = [2, 3]\nn = [3]\n\n[[grid]]\nsampler = \"trace-symmetric\"\nq = [3]\next = [2]\nn = [2, 3]\n",
        path(&out_dir)
    );
    std::fs::write(&config, text).unwrap();
    run_ok(&["campaign", "--config", path(&config)]);
    let summary: toml::Table = toml::from_str(&std::fs::read_to_string(out_dir.join("summary.toml")).unwrap()).unwrap();
    let points = summary["points"].as_array().unwrap();
    assert_eq!(points.len(), 4);
    assert!(points.iter().all(|p| p["status"].as_str() == Some("ok")));
    let report =
        ReportFile::parse(&std::fs::read_to_string(out_dir.join("trace-symmetric/q3-n3-ext2/report.toml")).unwrap())
            .unwrap();
    assert_eq!(report.reports.len(), 1 + 11);
}

#[test]
fn campaign_random_grids_need_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["campaign", "--q", "3", "--n", "3", "--d", "1", "--out-dir", path(dir.path())]);
    assert_eq!(code(&out), Some(2));
}
