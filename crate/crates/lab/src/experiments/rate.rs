//! Rate of `k⁻¹ ln K^k → φ_e` against `ln k / k`.

use anyhow::{bail, Result};
use bergkern::equilibrium::{radial_envelope, RadialProfile};
use rayon::prelude::*;

use super::{fit_through_origin, linspace, ray, Lab};
use crate::report::{Comparison, Fit, Gate, Report};

/// `φ_e` from the radial envelope of the weight profile.
pub(crate) fn equilibrium_profile(lab: &Lab) -> Result<RadialProfile> {
    let cfg = &lab.cfg;
    let u = RadialProfile::from_weight(&lab.weight, cfg.f64("equilibrium.s_min")?, cfg.f64("equilibrium.s_max")?, cfg.usize("equilibrium.points")?)?;
    let region = if lab.domain.has_boundary() { (lab.boundary_s(), f64::INFINITY) } else { (f64::NEG_INFINITY, f64::INFINITY) };
    Ok(radial_envelope(&u, region, cfg.f64("equilibrium.envelope_tol")?)?.profile)
}

pub fn run(lab: &Lab) -> Result<Report> {
    let cfg = &lab.cfg;
    if lab.ks.len() < 4 {
        bail!("rate fit needs at least four degrees, got {:?}", lab.ks);
    }
    if !lab.is_radial() {
        bail!("rate fit needs a unitary-invariant example with a computable equilibrium profile");
    }
    let mut r = lab.report("rate")?;
    let phi_e = equilibrium_profile(lab)?;
    let s = linspace(cfg.f64("rate.s_min")?, cfg.f64("rate.s_max")?, cfg.usize("rate.points")?);
    let interior_min = cfg.f64("rate.interior_s_min")?;
    let n = lab.n;
    let rows: Vec<(f64, f64)> = lab
        .ks
        .par_iter()
        .map(|&k| {
            let state = lab.state(k)?;
            let (mut all, mut inner): (f64, f64) = (0.0, 0.0);
            for &x in &s {
                let e = (state.log_kernel_metric(&ray(n, x)) - phi_e.value_at(x)).abs();
                all = all.max(e);
                if x >= interior_min {
                    inner = inner.max(e);
                }
            }
            Ok((all, inner))
        })
        .collect::<Result<_>>()?;
    for (&k, &(a, i)) in lab.ks.iter().zip(&rows) {
        r.push(k, "sup_error", a);
        r.push(k, "interior_sup_error", i);
        r.push(k, "ln_k_over_k", (k as f64).ln() / k as f64);
    }
    let x: Vec<f64> = lab.ks.iter().map(|&k| (k as f64).ln() / k as f64).collect();
    let y: Vec<f64> = rows.iter().map(|p| p.0).collect();
    let (c, se) = fit_through_origin(&x, &y);
    r.fit = Some(Fit { model: "c ln k / k".into(), coefficient: c, std_error: se });
    r.scalar("coefficient", c);
    r.scalar("coefficient_std_error", se);
    r.scalar("dimension_rate", (n + 1) as f64);
    r.gate(Gate::new("rate.coef_min", c, Comparison::AtLeast, cfg.tol("rate.coef_min")?));
    r.gate(Gate::new("rate.coef_max", c, Comparison::AtMost, cfg.tol("rate.coef_max")?));
    let (&k_last, &e_last) = (lab.ks.last().expect("k"), y.last().expect("k"));
    let bound = cfg.tol("rate.bound_factor")? * (n + 1) as f64 * (k_last as f64).ln() / k_last as f64;
    r.gate(Gate::new("rate.final_bound", e_last, Comparison::AtMost, bound));
    r.gate(Gate::holds("rate.decreasing", y.windows(2).all(|w| w[1] < w[0])));
    let i_last = rows.last().expect("k").1;
    r.gate(Gate::holds("rate.interior_faster", i_last < e_last));
    Ok(r)
}
