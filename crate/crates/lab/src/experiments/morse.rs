//! Dimension growth against the limit mass `∫_X (dd^cφ)ⁿ/n! + ∫_{∂X} μ`.

use anyhow::{bail, Result};
use bergkern::bergman::dimension;

use super::{limit_pairing, slope_survey, spread, Lab};
use crate::report::{Comparison, Gate, Report};

/// `(interior, boundary)` parts of the limit mass.
pub fn geometry_mass(lab: &Lab) -> Result<(f64, f64)> {
    limit_pairing(lab, &|_| 1.0)
}

/// Slope statistics and gates shared by the Morse and equilibrium runs.
pub(crate) fn slope_gates(lab: &Lab, report: &mut Report) -> Result<f64> {
    let cfg = &lab.cfg;
    let t = slope_survey(lab, cfg.usize("morse.slope_points")?)?;
    let (lo, hi) = spread(&t);
    report.scalar("slope_min", lo);
    report.scalar("slope_max", hi);
    if let Some(want) = cfg.expected("slope")? {
        let dev = t.iter().map(|v| (v - want).abs()).fold(0.0, f64::max);
        report.gate(Gate::new("slope.constant", dev, Comparison::AtMost, cfg.tol("slope.constant")?));
    }
    Ok(hi - lo)
}

pub fn run(lab: &Lab) -> Result<Report> {
    let cfg = &lab.cfg;
    let mut r = lab.report("morse")?;
    let spread = slope_gates(lab, &mut r)?;
    let limit = cfg.f64("morse.compatible_spread")?;
    if spread > limit {
        bail!("slope T is not constant on the boundary of {} (spread {spread:.3e}); Morse equality needs a compatible example", lab.example());
    }
    let (interior, boundary) = geometry_mass(lab)?;
    let total = interior + boundary;
    r.scalar("interior", interior);
    r.scalar("boundary", boundary);
    r.scalar("total", total);
    if let (Some(i), Some(b)) = (cfg.expected("interior")?, cfg.expected("boundary")?) {
        r.gate(Gate::near("morse.interior", interior, i, cfg.tol("morse.interior")?));
        r.gate(Gate::near("morse.boundary", boundary, b, cfg.tol("morse.boundary")?));
        r.gate(Gate::near("morse.total", total, i + b, cfg.tol("morse.total")?));
    }
    let n = lab.n;
    for &k in &lab.ks {
        let dim = dimension(n, k)? as f64;
        let scaled = if k == 0 { dim } else { dim / (k as f64).powi(n as i32) };
        r.push(k, "dimension_scaled", scaled);
        r.push(k, "gap", (scaled - total).abs());
    }
    let last = *lab.ks.last().expect("nonempty k_list");
    let gap = r.value(last, "gap").expect("row");
    r.gate(Gate::new("morse.dimension_gap", gap, Comparison::AtMost, cfg.tol("morse.dimension_gap")?));
    Ok(r)
}
