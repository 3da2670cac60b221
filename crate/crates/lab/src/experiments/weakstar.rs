//! Pairings of `k⁻ⁿ B^k ω_n` and `(Ω_k/k)ⁿ/n!` with radial test functions.

use anyhow::Result;
use bergkern::bergman::KernelState;
use bergkern::geometry::{Domain, InteriorRule, RuleSpec, VolumeForm};
use rayon::prelude::*;

use super::{boundary_mu_pairing, geometry_mass, interior_curvature_pairing, ln_norm_sqr, radial_integral, ray, rule_integral, Lab};
use crate::report::{Comparison, Gate, Report};

/// `(∫_X f (dd^cφ)ⁿ/n!, ∫_{∂X} f μ)` for `f` a function of `ln|ζ|²`.
pub fn limit_pairing(lab: &Lab, f: &dyn Fn(f64) -> f64) -> Result<(f64, f64)> {
    Ok((interior_curvature_pairing(lab, f)?, boundary_mu_pairing(lab, f)?))
}

/// `∫_X f k⁻ⁿ B^k ω_n` and `∫_Y f (Ω_k/k)ⁿ/n!`; the metric side lives on
/// the whole chart.
fn bergman_pairings(lab: &Lab, state: &KernelState, f: &dyn Fn(f64) -> f64) -> Result<(f64, f64)> {
    let n = lab.n;
    let kn = (state.k() as f64).powi(n as i32);
    let chart = Domain::chart(n);
    if lab.is_radial() {
        let b = radial_integral(&lab.domain, VolumeForm::FubiniStudy, |s| {
            let v = f(s);
            Ok(if v == 0.0 { 0.0 } else { v * state.bergman_function(&ray(n, s))? / kn })
        })?;
        let m = radial_integral(&chart, VolumeForm::Lebesgue, |s| {
            let v = f(s);
            Ok(if v == 0.0 { 0.0 } else { v * state.bergman_volume_density(&ray(n, s))? })
        })?;
        return Ok((b, m));
    }
    let spec = RuleSpec::for_degree(n, state.k()).refined();
    let fs = InteriorRule::new(&lab.domain, VolumeForm::FubiniStudy, spec);
    let leb = InteriorRule::new(&chart, VolumeForm::Lebesgue, spec);
    let b = rule_integral(&fs, |z| Ok(f(ln_norm_sqr(z)) * state.bergman_function(z)? / kn))?;
    let m = rule_integral(&leb, |z| Ok(f(ln_norm_sqr(z)) * state.bergman_volume_density(z)?))?;
    Ok((b, m))
}

/// Smooth bump supported on `(lo, hi)`.
fn bump(lo: f64, hi: f64) -> impl Fn(f64) -> f64 {
    move |s| {
        let t = (2.0 * s - lo - hi) / (hi - lo);
        if t.abs() >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - t * t)).exp()
        }
    }
}

/// Smooth collar around `c`: `1` for `|s - c| ≤ a`, `0` for `|s - c| ≥ b`.
fn collar(c: f64, a: f64, b: f64) -> impl Fn(f64) -> f64 {
    let g = |t: f64| if t <= 0.0 { 0.0 } else { (-1.0 / t).exp() };
    move |s| {
        let t = ((s - c).abs() - a) / (b - a);
        g(1.0 - t) / (g(1.0 - t) + g(t))
    }
}

pub fn run(lab: &Lab) -> Result<Report> {
    let cfg = &lab.cfg;
    let mut r = lab.report("weakstar")?;
    let sb = if lab.domain.has_boundary() { lab.boundary_s() } else { 0.0 };
    let one = |_: f64| 1.0;
    let inner = bump(sb + cfg.f64("weakstar.bump_lo")?, sb + cfg.f64("weakstar.bump_hi")?);
    let edge = collar(sb, cfg.f64("weakstar.collar_flat")?, cfg.f64("weakstar.collar_end")?);
    let tests: [(&str, &(dyn Fn(f64) -> f64 + Sync)); 3] = [("one", &one), ("interior", &inner), ("collar", &edge)];

    let mut limits = Vec::new();
    for (name, f) in tests {
        let (i, b) = limit_pairing(lab, f)?;
        r.scalar(&format!("limit_{name}"), i + b);
        r.scalar(&format!("limit_{name}_boundary"), b);
        limits.push(i + b);
    }
    let (mi, mb) = geometry_mass(lab)?;
    r.gate(Gate::new("weakstar.shared", (limits[0] - (mi + mb)).abs(), Comparison::AtMost, cfg.tol("weakstar.shared")?));

    let pairs: Vec<Vec<(f64, f64)>> = lab
        .ks
        .par_iter()
        .map(|&k| {
            let state = lab.state(k)?;
            tests.iter().map(|(_, f)| bergman_pairings(lab, &state, *f)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    for (&k, row) in lab.ks.iter().zip(&pairs) {
        for (((name, _), &(b, m)), &l) in tests.iter().zip(row).zip(&limits) {
            r.push(k, &format!("bergman_{name}"), b);
            r.push(k, &format!("bergman_{name}_error"), (b - l).abs() / l.abs());
            r.push(k, &format!("metric_{name}_error"), (m - l).abs() / l.abs());
        }
    }
    let last = *lab.ks.last().expect("nonempty k_list");
    let at = |d: &str| r.value(last, d).expect("row");
    let (ei, ec) = (at("bergman_interior_error"), at("bergman_collar_error"));
    r.gate(Gate::new("weakstar.interior", ei, Comparison::AtMost, cfg.tol("weakstar.interior")?));
    r.gate(Gate::new("weakstar.collar", ec, Comparison::AtMost, cfg.tol("weakstar.collar")?));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_functions() {
        let b = bump(1.0, 3.0);
        assert_eq!(b(1.0), 0.0);
        assert!((b(2.0) - 1.0).abs() < 1e-15);
        let c = collar(1.0, 0.1, 0.3);
        assert_eq!(c(1.0), 1.0);
        assert_eq!(c(0.7), 0.0);
        assert_eq!(c(1.3), 0.0);
        assert!((c(1.2) - 0.5).abs() < 1e-15);
    }
}
