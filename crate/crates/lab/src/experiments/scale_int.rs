//! `k⁻ⁿ K^k(z/√k, z'/√k)` in normal coordinates against the Bargmann model.

use anyhow::{bail, Result};
use bergkern::bergman::KernelState;
use bergkern::geometry::InteriorFrame;
use bergkern::model::InteriorModel;
use bergkern::C64;
use rayon::prelude::*;

use super::Lab;
use crate::report::{Comparison, Gate, Report};

/// Compact grid of radius `r` in frame coordinates.
pub(crate) fn grid(n: usize, r: f64) -> Vec<Vec<C64>> {
    let zero = vec![C64::new(0.0, 0.0); n];
    let mut pts = vec![zero.clone()];
    let unit = |i: usize, c: C64| {
        let mut v = zero.clone();
        v[i] = c;
        v
    };
    pts.push(unit(0, C64::new(r, 0.0)));
    pts.push(unit(n - 1, C64::new(0.0, r)));
    let d = r / (n as f64).sqrt();
    pts.push(vec![C64::new(d, 0.0); n]);
    let mut mixed = unit(0, C64::new(-0.5 * r, 0.0));
    mixed[n - 1] += C64::new(0.0, 0.5 * r);
    pts.push(mixed);
    pts
}

/// Scaled kernel `k⁻ⁿ K̃(z/√k, z'/√k)` with the trivialization `e^{-k g}`.
pub(crate) fn scaled_kernel(frame: &InteriorFrame, state: &KernelState, z: &[C64], zp: &[C64]) -> C64 {
    let k = state.k() as f64;
    let sk = k.sqrt();
    let a: Vec<C64> = z.iter().map(|c| c / sk).collect();
    let b: Vec<C64> = zp.iter().map(|c| c / sk).collect();
    let kern = state.kernel_scaled(&frame.map(&a), &frame.map(&b));
    let (ga, gb) = (frame.trivialization(&a), frame.trivialization(&b));
    let ln_mod = kern.ln_scale - k * (ga.re + gb.re) - frame.n() as f64 * k.ln();
    let phase = C64::from_polar(1.0, -k * ga.im + k * gb.im);
    kern.value * phase * ln_mod.exp()
}

/// Max over grid pairs of `|K̃ - K⁰| / sqrt(K⁰(z,z) K⁰(z',z'))`.
pub(crate) fn grid_error(frame: &InteriorFrame, model: &InteriorModel, state: &KernelState, pts: &[Vec<C64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for z in pts {
        for zp in pts {
            let want = model.kernel(zp, z);
            let norm = (model.kernel(z, z).re * model.kernel(zp, zp).re).sqrt();
            let got = scaled_kernel(frame, state, z, zp);
            worst = worst.max((got - want).norm() / norm);
        }
    }
    worst
}

pub fn run(lab: &Lab) -> Result<Report> {
    let cfg = &lab.cfg;
    let mut r = lab.report("scale-int")?;
    let n = lab.n;
    let mut center = vec![C64::new(0.0, 0.0); n];
    center[0] = C64::new(cfg.f64("scale_int.center")?, 0.0);
    let margin = cfg.f64("scale_int.margin")?;
    let rho = lab.domain.rho(&center);
    if !(rho < -margin) {
        bail!("center is too close to the boundary: rho = {rho:.3e}, margin {margin}");
    }
    let frame = InteriorFrame::new(&lab.weight, &center)?;
    let model = frame.model()?;
    r.scalar("model_bergman", model.bergman());
    for (i, l) in model.lambda().iter().enumerate() {
        r.scalar(&format!("lambda_{i}"), *l);
    }
    let pts = grid(n, cfg.f64("scale_int.radius")?);
    let rows: Vec<(f64, f64)> = lab
        .ks
        .par_iter()
        .map(|&k| {
            let state = lab.state(k)?;
            let diag = state.bergman_function(&center)? / (k as f64).powi(n as i32);
            Ok((grid_error(&frame, &model, &state, &pts), (diag - model.bergman()).abs() / model.bergman()))
        })
        .collect::<Result<_>>()?;
    for (&k, &(e, d)) in lab.ks.iter().zip(&rows) {
        r.push(k, "max_rel_error", e);
        r.push(k, "diagonal_rel_error", d);
    }
    let k_min = cfg.usize("scale_int.k_min")?;
    let tail: Vec<f64> = r.series("max_rel_error").into_iter().filter(|p| p.0 >= k_min).map(|p| p.1).collect();
    r.gate(Gate::holds("scale_int.decreasing", tail.windows(2).all(|w| w[1] < w[0])));
    let last = *tail.last().unwrap_or(&f64::INFINITY);
    r.gate(Gate::new("scale_int.final", last, Comparison::Below, cfg.tol("scale_int.final")?));
    Ok(r)
}
