//! Domination of the scaled boundary diagonal by `C max(1, v²)⁻¹`.

use anyhow::Result;
use bergkern::geometry::adapted_frame;
use rayon::prelude::*;

use super::{boundary_diagonal, linspace, Lab};
use crate::report::{Comparison, Gate, Report};

pub fn run(lab: &Lab) -> Result<Report> {
    let cfg = &lab.cfg;
    let mut r = lab.report("appendix")?;
    let frame = adapted_frame(&lab.weight, &lab.domain, &lab.sigma()?)?;
    let points = cfg.usize("appendix.v_points")?;
    let rows: Vec<(f64, f64)> = lab
        .ks
        .par_iter()
        .map(|&k| {
            let state = lab.state(k)?;
            let mut worst: f64 = 0.0;
            for v in linspace(-0.5 * (k as f64).ln(), 0.0, points) {
                worst = worst.max(boundary_diagonal(&frame, &state, v)? * (v * v).max(1.0));
            }
            Ok((worst, boundary_diagonal(&frame, &state, 0.0)?))
        })
        .collect::<Result<_>>()?;
    for (&k, &(w, z)) in lab.ks.iter().zip(&rows) {
        r.push(k, "max_weighted", w);
        r.push(k, "value_at_zero", z);
    }
    let max = rows.iter().map(|p| p.0).fold(0.0, f64::max);
    r.scalar("max_weighted", max);
    r.gate(Gate::new("appendix.bound", max, Comparison::AtMost, cfg.tol("appendix.bound")?));
    Ok(r)
}
