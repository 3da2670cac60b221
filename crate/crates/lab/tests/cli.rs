use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bergkern_lab::report::read_summary;

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bergkern")).args(args).arg("--out").arg(out).env_remove("BERGKERN_CACHE").output().unwrap()
}

#[test]
fn gate_failures_set_the_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["morse"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("FAIL  morse        morse.dimension_gap"));
    assert!(!read_summary(&dir.path().join("summary.json")).unwrap().pass);

    let o = run(&["morse", "--tol-override", "morse.dimension_gap=0.03"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let s = read_summary(&dir.path().join("summary.json")).unwrap();
    assert!(s.pass);
    assert_eq!(s.tolerances["morse.dimension_gap"], 0.03);
}

#[test]
fn bad_input_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["morse", "--weight", "nope"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["morse", "--tol-override", "morse.unknown=1"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["rate", "--k-list", "8,16"], dir.path()).status.code(), Some(2));
}

#[test]
fn k_list_selects_rows() {
    let dir = tempfile::tempdir().unwrap();
    run(&["bm", "--k-list", "8,16,24"], dir.path());
    let mut rd = csv::Reader::from_path(dir.path().join("bm.csv")).unwrap();
    let mut ks: Vec<usize> = rd.records().map(|r| r.unwrap()[3].parse().unwrap()).collect();
    ks.dedup();
    assert_eq!(ks, [8, 16, 24]);
}

#[test]
fn reruns_and_cached_runs_match() {
    let (a, b, c) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let cache = tempfile::tempdir().unwrap();
    let args = ["scale-bd", "--k-list", "8,12,16,24"];
    run(&args, a.path());
    run(&args, b.path());
    let mut cached = args.to_vec();
    cached.extend(["--cache", cache.path().to_str().unwrap()]);
    run(&cached, c.path());
    assert!(fs::read_dir(cache.path()).unwrap().count() >= 4);
    run(&cached, c.path());
    let first = fs::read(a.path().join("scale-bd.csv")).unwrap();
    assert_eq!(first, fs::read(b.path().join("scale-bd.csv")).unwrap());
    assert_eq!(first, fs::read(c.path().join("scale-bd.csv")).unwrap());
}
