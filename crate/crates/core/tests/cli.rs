use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_levy-hjm");

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str], workers: Option<&str>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("HJM_WORKERS");
    if let Some(w) = workers {
        cmd.env("HJM_WORKERS", w);
    }
    cmd.output().unwrap()
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

const SOLVE: &str = "\
[measure]
kind = truncated_stable_positive
rho = 0.5
[model]
horizon = 1
grid_n = 30
eps = 1e-3
[seeds]
master_seed = 99
count = 6
[solver]
start = bound
";

#[test]
fn classify_reports_indeterminate_with_success() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.ini",
        "[measure]\nkind = truncated_stable_positive\nrho = 1\n",
    );
    let out = dir.path().join("out");
    let o = run(
        &[
            "classify",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("Indeterminate"));
    let verdict = fs::read_to_string(out.join("verdict.csv")).unwrap();
    assert!(verdict.contains("verdict,Indeterminate"));
    assert!(out.join("manifest.ini").exists());
}

#[test]
fn empty_measure_block_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.ini", "[measure]\n\n[model]\nhorizon = 1\n");
    let o = run(
        &[
            "classify",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
}

#[test]
fn explosion_study_needs_non_existence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.ini", SOLVE);
    let o = run(
        &[
            "explode-study",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn unwritable_output_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.ini", SOLVE);
    let blocker = write_config(dir.path(), "file", "");
    let o = run(
        &[
            "exponent-table",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            blocker.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.ini", SOLVE);
    let cfg = cfg.to_str().unwrap();
    let mut snapshots = Vec::new();
    for (k, workers) in [(0, "1"), (1, "4"), (2, "4")] {
        let out = dir.path().join(format!("run{k}"));
        let o = run(
            &["solve", "--config", cfg, "--out", out.to_str().unwrap()],
            Some(workers),
        );
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        snapshots.push(read_dir_sorted(&out));
    }
    assert_eq!(snapshots[0], snapshots[1]);
    assert_eq!(snapshots[1], snapshots[2]);
    let names: Vec<&str> = snapshots[0].iter().map(|(n, _)| n.as_str()).collect();
    assert!(names.contains(&"solve_summary.csv") && names.contains(&"field_0005.csv"));
}

#[test]
fn flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.ini", SOLVE);
    let out = dir.path().join("o");
    let o = run(
        &[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--seeds",
            "2",
            "--master-seed",
            "5",
            "--workers",
            "2",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let manifest = fs::read_to_string(out.join("manifest.ini")).unwrap();
    assert!(
        manifest.contains("master_seed = 5") && manifest.contains("count = 2"),
        "{manifest}"
    );
    assert!(out.join("path_0001.csv").exists() && !out.join("path_0002.csv").exists());
    let summary = fs::read_to_string(out.join("simulate_summary.csv")).unwrap();
    assert!(summary.starts_with("seed_index,seed,status,jumps,terminal_level,sup_a\n"));
    assert!(!summary.contains('\r'));
}
