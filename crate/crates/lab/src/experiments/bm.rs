//! Growth of `sup_X B^k` against `k^{n+1}`.

use anyhow::Result;
use bergkern::quadrature::sphere_samples;
use bergkern::C64;
use rayon::prelude::*;

use super::{linspace, Lab};
use crate::report::{Comparison, Gate, Report};

/// Directions of the rays searched from `∂X` outwards; one suffices under
/// unitary invariance.
fn rays(lab: &Lab) -> Result<Vec<Vec<C64>>> {
    if lab.is_radial() {
        Ok(vec![lab.e1()])
    } else {
        Ok(sphere_samples(lab.n, lab.cfg.usize("bm.directions")?, lab.seed()?))
    }
}

pub fn run(lab: &Lab) -> Result<Report> {
    let cfg = &lab.cfg;
    let mut r = lab.report("bm")?;
    let n = lab.n;
    let offsets = linspace(0.0, cfg.f64("bm.s_span")?, cfg.usize("bm.points")?);
    let interior_min = cfg.f64("bm.interior_s_min")?;
    let dirs = rays(lab)?;
    let rows: Vec<(f64, f64)> = lab
        .ks
        .par_iter()
        .map(|&k| {
            let state = lab.state(k)?;
            let (mut sup, mut inner): (f64, f64) = (0.0, 0.0);
            for xi in &dirs {
                let sb = lab.domain.boundary_s(xi);
                let sb = if sb.is_finite() { sb } else { -cfg.f64("bm.s_span")? };
                for &t in &offsets {
                    let scale = (0.5 * (sb + t)).exp();
                    let z: Vec<C64> = xi.iter().map(|c| c * scale).collect();
                    let b = state.bergman_function(&z)?;
                    sup = sup.max(b);
                    if t >= interior_min {
                        inner = inner.max(b);
                    }
                }
            }
            let kf = k as f64;
            Ok((sup / kf.powi(n as i32 + 1), inner / kf.powi(n as i32)))
        })
        .collect::<Result<_>>()?;
    for (&k, &(s, i)) in lab.ks.iter().zip(&rows) {
        r.push(k, "sup_ratio", s);
        r.push(k, "interior_ratio", i);
    }
    let k_min = cfg.usize("bm.k_min")?;
    let tail: Vec<f64> = r.series("sup_ratio").into_iter().filter(|p| p.0 >= k_min).map(|p| p.1).collect();
    let drift = tail.windows(2).map(|w| (w[1] / w[0] - 1.0).abs()).fold(0.0, f64::max);
    r.scalar("max_drift", drift);
    r.scalar("max_ratio", rows.iter().map(|p| p.0).fold(0.0, f64::max));
    r.gate(Gate::holds("bm.finite", rows.iter().all(|p| p.0.is_finite() && p.1.is_finite())));
    r.gate(Gate::new("bm.drift", drift, Comparison::Below, cfg.tol("bm.drift")?));
    Ok(r)
}
