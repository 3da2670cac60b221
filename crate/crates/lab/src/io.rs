//! Two-column CSV files for profiles, measures and atoms.

use std::fs::File;
use std::path::Path;

use anyhow::{bail, Context, Result};
use bergkern::equilibrium::{RadialMeasure, RadialProfile};

/// Reads two numeric columns, skipping a header row if it does not parse.
pub fn read_two_columns(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).comment(Some(b'#')).from_reader(file);
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.with_context(|| format!("{}: row {}", path.display(), i + 1))?;
        if rec.len() != 2 {
            bail!("{}: row {} has {} columns, expected 2", path.display(), i + 1, rec.len());
        }
        match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
            (Ok(x), Ok(y)) => {
                a.push(x);
                b.push(y);
            }
            _ if i == 0 => continue,
            _ => bail!("{}: row {} is not numeric", path.display(), i + 1),
        }
    }
    Ok((a, b))
}

pub fn write_two_columns(path: &Path, header: [&str; 2], a: &[f64], b: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(header)?;
    for (x, y) in a.iter().zip(b) {
        w.write_record([format!("{x:e}"), format!("{y:e}")])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_profile(path: &Path, p: &RadialProfile) -> Result<()> {
    write_two_columns(path, ["s", "value"], &p.grid(), p.values())
}

pub fn read_profile(path: &Path) -> Result<RadialProfile> {
    let (s, v) = read_two_columns(path)?;
    if s.len() < 2 {
        bail!("{}: profile needs at least two rows", path.display());
    }
    Ok(RadialProfile::new(s[0], s[1] - s[0], v)?)
}

/// Density on `<stem>.csv`, atoms on `<stem>_atoms.csv`.
pub fn write_measure(dir: &Path, stem: &str, m: &RadialMeasure) -> Result<()> {
    let s: Vec<f64> = (0..m.density.len()).map(|j| m.s(j)).collect();
    write_two_columns(&dir.join(format!("{stem}.csv")), ["s", "density"], &s, &m.density)?;
    let (loc, mass): (Vec<f64>, Vec<f64>) = m.atoms.iter().copied().unzip();
    write_two_columns(&dir.join(format!("{stem}_atoms.csv")), ["location", "mass"], &loc, &mass)
}

pub fn read_measure(dir: &Path, stem: &str) -> Result<RadialMeasure> {
    let (s, density) = read_two_columns(&dir.join(format!("{stem}.csv")))?;
    let (loc, mass) = read_two_columns(&dir.join(format!("{stem}_atoms.csv")))?;
    if s.len() < 2 {
        bail!("measure {stem}: need at least two cells");
    }
    let h = s[1] - s[0];
    let atoms: Vec<(f64, f64)> = loc.into_iter().zip(mass).collect();
    let total_mass = density.iter().sum::<f64>() * h + atoms.iter().map(|a| a.1).sum::<f64>();
    Ok(RadialMeasure { s0: s[0], h, density, atoms, total_mass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = RadialProfile::from_fn(-12.0, 12.0, 97, |s| (1.0 + s.exp()).ln()).unwrap();
        let path = dir.path().join("u.csv");
        write_profile(&path, &p).unwrap();
        let q = read_profile(&path).unwrap();
        assert_eq!(p.len(), q.len());
        for (a, b) in p.values().iter().zip(q.values()) {
            assert!((a - b).abs() < 1e-14 * a.abs().max(1.0));
        }
    }

    #[test]
    fn measure_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = RadialMeasure::empty(-1.0, 0.5, 5);
        m.density[3] = 0.25;
        m.atoms.push((0.0, 0.125));
        m.total_mass = 0.25;
        write_measure(dir.path(), "mu", &m).unwrap();
        let r = read_measure(dir.path(), "mu").unwrap();
        assert_eq!(r.atoms, m.atoms);
        assert!((r.total_mass - m.total_mass).abs() < 1e-15);
    }

    #[test]
    fn rejects_ragged_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "s,u\n0,1\n1,2,3\n").unwrap();
        assert!(read_two_columns(&path).is_err());
    }
}
