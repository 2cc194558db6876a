mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::{fixture_path, CONFIRMED, DEATHS, RECOVERED};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_series-summary"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn data_args() -> Vec<String> {
    vec![
        "--confirmed".into(),
        fixture_path(CONFIRMED).display().to_string(),
        "--recovered".into(),
        fixture_path(RECOVERED).display().to_string(),
    ]
}

fn summarize_into(out: &Path, extra: &[&str]) -> Output {
    bin()
        .arg("summarize")
        .args(data_args())
        .args(["--kmax", "20", "--out"])
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

fn read_plots(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir.join("plots"))
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn stats_prints_accumulated_infections() {
    let o = run(&["stats", "--r0", "2.25", "--serial", "4.25", "--days", "98"]);
    assert!(o.status.success());
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v / 628.4e6 - 1.0).abs() < 5e-4);
    let o = run(&["stats", "--r0", "1", "--days", "50"]);
    assert_eq!(stdout(&o).trim(), "50");
}

#[test]
fn bad_parameters_exit_with_usage_code() {
    assert_eq!(run(&["stats", "--r0", "-1"]).status.code(), Some(1));
    assert_eq!(run(&["stats", "--days", "abc"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    let tmp = tempfile::tempdir().unwrap();
    let o = summarize_into(tmp.path(), &["--smax", "2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn missing_recovered_input_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["summarize", "--confirmed"])
        .arg(fixture_path(CONFIRMED))
        .arg("--out")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn malformed_input_is_a_data_error() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.csv");
    fs::write(&bad, "Province/State,Country/Region,Lat,Long,1/22/20,1/23/20\n,A,0,0,1,x\n").unwrap();
    let o = bin()
        .args(["summarize", "--mode", "daily-deaths", "--deaths"])
        .arg(&bad)
        .arg("--out")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn summarize_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let oa = summarize_into(a.path(), &[]);
    let ob = summarize_into(b.path(), &["--threads", "1"]);
    assert!(oa.status.success(), "{}", String::from_utf8_lossy(&oa.stderr));
    assert!(ob.status.success());
    assert!(stdout(&oa).starts_with("N=249 T=96 "));
    assert_eq!(
        fs::read(a.path().join("summary.json")).unwrap(),
        fs::read(b.path().join("summary.json")).unwrap()
    );
    let plots = read_plots(a.path());
    assert_eq!(plots.len(), 249);
    assert_eq!(plots, read_plots(b.path()));
}

#[test]
fn predict_from_saved_summary_matches_summarize() {
    let a = tempfile::tempdir().unwrap();
    assert!(summarize_into(a.path(), &[]).status.success());
    let b = tempfile::tempdir().unwrap();
    let o = bin()
        .arg("predict")
        .arg("--summary")
        .arg(a.path().join("summary.json"))
        .arg("--out")
        .arg(b.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read_plots(a.path()), read_plots(b.path()));

    let c = tempfile::tempdir().unwrap();
    let o = bin()
        .arg("predict")
        .arg("--summary")
        .arg(a.path().join("summary.json"))
        .args(["--id", "|Sweden", "--out"])
        .arg(c.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    let plots = read_plots(c.path());
    assert_eq!(plots.len(), 1);
    assert!(plots[0].0.ends_with("Sweden.csv"));

    let o = bin()
        .arg("predict")
        .arg("--summary")
        .arg(a.path().join("summary.json"))
        .args(["--id", "Atlantis", "--out"])
        .arg(c.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn daily_deaths_mode() {
    let tmp = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["summarize", "--mode", "daily-deaths", "--kmax", "15", "--deaths"])
        .arg(fixture_path(DEATHS))
        .arg("--out")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("N=264 T=96 "));
}

#[test]
fn help_shows_defaults() {
    let o = run(&["summarize", "--help"]);
    assert!(o.status.success());
    let h = stdout(&o);
    for needle in ["--smax", "[default: 10]", "--dtau-min", "[default: 5]", "[default: 0.01]", "[default: 2020]"] {
        assert!(h.contains(needle), "missing {needle}");
    }
}
