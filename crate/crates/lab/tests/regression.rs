//! Frozen CSV tables from a verified run. Set `BERGKERN_BLESS=1` to rewrite
//! them after an intentional change.

use std::path::{Path, PathBuf};

use bergkern_lab::report::write_csv;
use bergkern_lab::{Config, Experiment, Lab};

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.csv"))
}

fn rows(path: &Path) -> Vec<(String, f64)> {
    let mut rd = csv::Reader::from_path(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    rd.records()
        .map(|r| {
            let r = r.unwrap();
            (format!("{}/{}/{}/{}/{}", &r[0], &r[1], &r[2], &r[3], &r[4]), r[5].parse().unwrap())
        })
        .collect()
}

#[test]
fn tables_match_golden_files() {
    let cfg = Config::default_config();
    let rel = cfg.tol("regression.rel").unwrap();
    let lab = Lab::new(cfg, None).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let bless = std::env::var_os("BERGKERN_BLESS").is_some();
    let mut worst = Vec::new();
    for e in Experiment::ALL {
        let r = e.run(&lab).unwrap();
        let fresh = dir.path().join(format!("{}.csv", e.name()));
        write_csv(&fresh, &r).unwrap();
        if bless {
            std::fs::copy(&fresh, golden(e.name())).unwrap();
            continue;
        }
        let (got, want) = (rows(&fresh), rows(&golden(e.name())));
        assert_eq!(got.len(), want.len(), "{}: row count", e.name());
        for ((ka, a), (kb, b)) in got.iter().zip(&want) {
            assert_eq!(ka, kb);
            let err = (a - b).abs() / b.abs().max(1e-300);
            if !(err <= rel || a == b) {
                worst.push(format!("{ka}: {a:e} vs golden {b:e}"));
            }
        }
    }
    assert!(worst.is_empty(), "{} rows drifted:\n{}", worst.len(), worst.join("\n"));
}
