use std::path::Path;
use std::process::{Command, Output};

use seqfront::report::{read_csv, CSV_COLUMNS};

fn seqfront(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seqfront"))
        .args(args)
        .current_dir(dir)
        .env_remove("SEQFRONT_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL: &str = r#"
total_antennas = 16
memory = ["fap:4KB"]
num_trials = 2
base_seed = 3

[scenario]
num_subcarriers = 64

[[sweep]]
param = "L"
values = [2, 4, 8]
"#;

#[test]
fn desk_figure_writes_csv_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out = seqfront(
        &[
            "figure", "fig3", "--desk", "--trials", "2", "-q", "-o", "out.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("out.csv")).unwrap();
    assert!(text.starts_with(&CSV_COLUMNS.join(",")));
    let rows = read_csv(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 40);
    assert!(dir.path().join("out.csv.meta.toml").exists());
}

#[test]
fn overrides_narrow_a_config_to_one_point() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("spec.toml"), SMALL).unwrap();
    let out = seqfront(
        &[
            "run",
            "-c",
            "spec.toml",
            "--set",
            "L=4",
            "--set",
            "memory=ft_ea:64KB",
            "-o",
            "one.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = read_csv(std::fs::File::open(dir.path().join("one.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].sweep_value, "4");
    assert_eq!(rows[0].memory.to_string(), "ft_ea:64KB");
    assert_eq!(rows[0].trials, 2);
}

#[test]
fn metadata_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("spec.toml"), SMALL).unwrap();
    let first = seqfront(
        &[
            "run",
            "-c",
            "spec.toml",
            "--set",
            "option=ec",
            "-o",
            "a.csv",
        ],
        dir.path(),
    );
    assert!(first.status.success(), "{}", stderr(&first));
    let again = seqfront(&["run", "-c", "a.csv.meta.toml", "-o", "b.csv"], dir.path());
    assert!(again.status.success(), "{}", stderr(&again));
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn output_directory_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("spec.toml"), SMALL).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_seqfront"))
        .args(["run", "-c", "spec.toml", "--format", "plotdata", "-q"])
        .current_dir(dir.path())
        .env("SEQFRONT_OUTPUT_DIR", "plots")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("plots/experiment.dat")).unwrap();
    assert!(text.contains("# curve:"));
}

#[test]
fn malformed_configs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("bad.toml"),
        "num_trials = 2\nmemory = [\"inf\"\n",
    )
    .unwrap();
    let out = seqfront(&["run", "-c", "bad.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line"), "{}", stderr(&out));

    std::fs::write(dir.path().join("typo.toml"), "num_trails = 2\n").unwrap();
    let out = seqfront(&["run", "-c", "typo.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("num_trails"), "{}", stderr(&out));

    let out = seqfront(&["run", "--set", "colour=blue"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("colour"), "{}", stderr(&out));

    let out = seqfront(&["figure", "fig4"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn infeasible_parameters_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("spec.toml"), SMALL).unwrap();
    let out = seqfront(
        &[
            "run",
            "-c",
            "spec.toml",
            "--set",
            "memory=ft_la:64KB",
            "--set",
            "topology=tree",
            "-o",
            "x.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));

    let out = seqfront(
        &["run", "-c", "spec.toml", "--set", "K=2", "--set", "tau_p=3"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn self_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = seqfront(&["check", "--instances", "50"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.matches("[PASS]").count(), 5, "{stdout}");
}
