//! End-to-end tests of the compiled binary: exit codes, report files, and
//! the determinism contract of machine-style output.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use robust_spectral::ExperimentReport;
use tempfile::tempdir;

fn run_cli(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_robust-spectral"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary should spawn")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

const DEMO_CONFIG: &str = "dataset.kind = blobs\ndataset.path = 30x3,spread=0.08\n\
                           k_clusters = 3\nk_nn = 6\nm_nodes = 45\nseed = 1\n";

#[test]
fn run_happy_path_writes_a_report_and_prints_the_table() {
    let dir = tempdir().unwrap();
    fs::write(dir.path().join("demo.cfg"), DEMO_CONFIG).unwrap();
    let out = run_cli(
        &["run", "--config", "demo.cfg", "--output", "out"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("baseline"), "{text}");
    assert!(text.contains("robust"), "{text}");
    assert!(text.contains('%'), "labeled dataset must print ACC: {text}");
    let reports: Vec<_> = fs::read_dir(dir.path().join("out"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    assert_eq!(reports.len(), 1, "exactly one report file: {reports:?}");
    ExperimentReport::parse_machine(&fs::read_to_string(&reports[0]).unwrap()).unwrap();
}

#[test]
fn missing_config_file_exits_2() {
    let dir = tempdir().unwrap();
    let out = run_cli(&["run", "--config", "missing.cfg"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("missing.cfg"), "{}", stderr(&out));
}

#[test]
fn invalid_config_exits_2_naming_every_bad_field() {
    let dir = tempdir().unwrap();
    fs::write(
        dir.path().join("bad.cfg"),
        "dataset.kind = tarball\nk_clusters = 0\nm_nodes = none\n",
    )
    .unwrap();
    let out = run_cli(&["run", "--config", "bad.cfg"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    for field in ["dataset.kind", "dataset.path", "k_clusters", "m_nodes"] {
        assert!(err.contains(field), "'{field}' not named in: {err}");
    }
}

#[test]
fn unknown_flags_exit_2() {
    let dir = tempdir().unwrap();
    let out = run_cli(&["run", "--config", "x.cfg", "--wat"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn machine_output_is_stable_apart_from_timing_fields() {
    let dir = tempdir().unwrap();
    fs::write(dir.path().join("demo.cfg"), DEMO_CONFIG).unwrap();
    let args = ["run", "--config", "demo.cfg", "--machine", "--output", "out"];
    let first = run_cli(&args, dir.path());
    let second = run_cli(&args, dir.path());
    assert_eq!(first.status.code(), Some(0), "stderr: {}", stderr(&first));
    assert_eq!(second.status.code(), Some(0));
    let timing = |line: &&str| {
        line.starts_with("stage.") || line.starts_with("eig_time") || line.starts_with("speedup")
    };
    let stable = |out: &Output| -> Vec<String> {
        stdout(out)
            .lines()
            .filter(|l| !timing(l))
            .map(str::to_string)
            .collect()
    };
    assert_eq!(stable(&first), stable(&second), "non-timing lines must be byte-identical");
    let report = ExperimentReport::parse_machine(&stdout(&first)).unwrap();
    assert_eq!(report.seed, 1);
    assert!(report.acc_baseline.is_some());
}

#[test]
fn overrides_replace_config_values() {
    let dir = tempdir().unwrap();
    fs::write(dir.path().join("demo.cfg"), DEMO_CONFIG).unwrap();
    let out = run_cli(
        &[
            "run", "--config", "demo.cfg", "--machine", "--output", "elsewhere",
            "--seed", "7", "--m-nodes", "30", "--k-nn", "5", "--m-eigs", "2",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let report = ExperimentReport::parse_machine(&stdout(&out)).unwrap();
    assert_eq!(
        (report.seed, report.m_nodes, report.k_nn, report.m_eigs),
        (7, 30, 5, 2)
    );
    assert!(dir.path().join("elsewhere").is_dir());
}

#[test]
fn replicate_blobs_demo_runs_self_contained() {
    let dir = tempdir().unwrap();
    let out = run_cli(
        &["replicate", "blobs-demo", "--machine", "--output", "out"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let report = ExperimentReport::parse_machine(&stdout(&out)).unwrap();
    assert_eq!((report.n, report.k_clusters, report.m_nodes), (600, 3, 200));
    assert!(report.acc_robust.is_some());
    assert!(report.speedup > 0.0);
}

#[test]
fn replicate_with_missing_corpus_exits_2() {
    let dir = tempdir().unwrap();
    let out = run_cli(&["replicate", "usps", "--data", "empty"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("usps.csv"), "{}", stderr(&out));
}

#[test]
fn score_writes_node_csv_and_eigenvalues() {
    let dir = tempdir().unwrap();
    let out = run_cli(
        &[
            "score", "40x2,spread=0.1", "--kind", "blobs", "--k-nn", "6",
            "--k-clusters", "2", "--m-eigs", "2", "--output", "scores",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("scores/scores.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("node_id,score,rank"));
    assert_eq!(lines.count(), 80, "one row per node");
    assert!(dir.path().join("scores/eigenvalues.csv").is_file());
}

#[test]
fn bench_eig_prints_one_row_per_size() {
    let dir = tempdir().unwrap();
    let out = run_cli(
        &["bench-eig", "100", "150", "--m-eigs", "3", "--k-nn", "6"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let rows: Vec<_> = text
        .lines()
        .filter(|l| l.trim_start().starts_with(char::is_numeric))
        .collect();
    assert_eq!(rows.len(), 2, "{text}");
    assert!(text.contains("dense"), "{text}");
}
