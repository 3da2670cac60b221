//! Equilibrium measures: envelope Monge–Ampère against `corollary_measure`,
//! refusal on non-constant slope, and envelopes read off the
//! kernel.

use anyhow::Result;
use bergkern::equilibrium::{
    compare_measures, corollary_measure, envelope_from_kernel, radial_envelope, radial_monge_ampere, RadialMeasure, RadialProfile,
};
use bergkern::geometry::{ma_density, mu_density, BoundaryRule, InteriorRule, RuleSpec, VolumeForm};
use bergkern::quadrature::{gauss_legendre_on, sphere_area};
use bergkern::Error;
use rayon::prelude::*;

use super::morse::slope_gates;
use super::rate::equilibrium_profile;
use super::{ln_norm_sqr, ray, spread, Lab};
use crate::report::{Comparison, Gate, Report};

fn profile_grid(lab: &Lab) -> Result<RadialProfile> {
    let cfg = &lab.cfg;
    Ok(RadialProfile::from_weight(&lab.weight, cfg.f64("equilibrium.s_min")?, cfg.f64("equilibrium.s_max")?, cfg.usize("equilibrium.points")?)?)
}

/// `W1(MA(χ_e), corollary_measure)` for a compatible radial example.
fn compatible(lab: &Lab, r: &mut Report) -> Result<()> {
    let cfg = &lab.cfg;
    let ex = lab.example();
    let u = profile_grid(lab)?;
    let env = radial_envelope(&u, (lab.boundary_s(), f64::INFINITY), cfg.f64("equilibrium.envelope_tol")?)?;
    r.gate(Gate::holds(format!("equilibrium.envelope_valid[{ex}]"), env.is_valid(&u)));
    let ma = radial_monge_ampere(&env, lab.n, cfg.f64("equilibrium.atom_threshold")?);
    let cor = corollary_measure(&lab.weight, &lab.domain, &u, &lab.boundary_rule()?, cfg.f64("equilibrium.slope_tol")?)?;
    let cmp = compare_measures(&ma, &cor);
    r.scalar(&format!("w1[{ex}]"), cmp.w1);
    r.scalar(&format!("mass_delta[{ex}]"), cmp.total_delta);
    r.scalar(&format!("envelope_mass[{ex}]"), ma.total_mass);
    for (i, (loc, a, b)) in cmp.atoms.iter().enumerate() {
        r.note(format!("{ex} atom {i} at s = {loc:.6}: envelope {a:.9}, predicted {b:.9}"));
    }
    r.gate(Gate::new(format!("equilibrium.w1[{ex}]"), cmp.w1, Comparison::Below, cfg.tol("equilibrium.w1")?));
    Ok(())
}

/// `corollary_measure` must refuse a domain with non-constant slope.
fn counterexample(lab: &Lab, r: &mut Report) -> Result<()> {
    let cfg = &lab.cfg;
    let ex = lab.example();
    let t = super::slope_survey(lab, cfg.usize("morse.slope_points")?)?;
    let (lo, hi) = spread(&t);
    r.scalar(&format!("slope_spread[{ex}]"), hi - lo);
    r.gate(Gate::new(format!("slope.spread[{ex}]"), hi - lo, Comparison::Above, cfg.tol("equilibrium.spread_min")?));
    let refused = match corollary_measure(&lab.weight, &lab.domain, &profile_grid(lab)?, &lab.boundary_rule()?, cfg.f64("equilibrium.slope_tol")?) {
        Err(Error::NonConstantSlope { spread, .. }) => {
            r.scalar(&format!("refusal_spread[{ex}]"), spread);
            true
        }
        Err(e) => return Err(e.into()),
        Ok(_) => false,
    };
    r.gate(Gate::holds(format!("equilibrium.refuses[{ex}]"), refused));
    Ok(())
}

/// Pushforward of `k⁻ⁿ B^k 1_X ω_n` to the `s` line on the cells of `grid`.
fn bergman_measure(lab: &Lab, k: usize, grid: &RadialProfile) -> Result<RadialMeasure> {
    let state = lab.state(k)?;
    let n = lab.n;
    let kn = (k as f64).powi(n as i32);
    let h = grid.step();
    let mut m = RadialMeasure::empty(grid.s(0), h, grid.len());
    if lab.is_radial() {
        let sb = lab.boundary_s();
        for j in 0..grid.len() {
            let (lo, hi) = ((grid.s(j) - 0.5 * h).max(sb), grid.s(j) + 0.5 * h);
            if hi <= lo {
                continue;
            }
            let (xs, ws) = gauss_legendre_on(8, lo, hi);
            let mut acc = 0.0;
            for (&s, &w) in xs.iter().zip(&ws) {
                let z = ray(n, s);
                acc += w * state.bergman_function(&z)? / kn * VolumeForm::FubiniStudy.density(&z) * sphere_area(n) * (n as f64 * s).exp() * 0.5;
            }
            m.density[j] = acc / h;
        }
    } else {
        let rule = InteriorRule::new(&lab.domain, VolumeForm::FubiniStudy, RuleSpec::for_degree(n, k));
        for (z, &w) in rule.nodes.iter().zip(&rule.weights) {
            if let Some(j) = cell(grid, ln_norm_sqr(z)) {
                m.density[j] += w * state.bergman_function(z)? / kn / h;
            }
        }
    }
    m.total_mass = m.smooth_mass();
    Ok(m)
}

fn cell(grid: &RadialProfile, s: f64) -> Option<usize> {
    let j = ((s - grid.s(0)) / grid.step()).round();
    (j >= 0.0 && (j as usize) < grid.len()).then_some(j as usize)
}

/// `1_X (dd^cφ)ⁿ/n! + [∂X] ∧ μ` pushed to the `s` line without the
/// constant-slope requirement.
fn predicted_measure(lab: &Lab, grid: &RadialProfile, rule: &BoundaryRule) -> Result<RadialMeasure> {
    if lab.domain.is_radial() {
        return Ok(corollary_measure(&lab.weight, &lab.domain, grid, rule, f64::INFINITY)?);
    }
    let h = grid.step();
    let mut m = RadialMeasure::empty(grid.s(0), h, grid.len());
    let spec = RuleSpec { simplex_points: 24, angles: 24, radial_points: 48, radial_panels: 4 };
    let interior = InteriorRule::new(&lab.domain, VolumeForm::Lebesgue, spec);
    for (z, &w) in interior.nodes.iter().zip(&interior.weights) {
        if let Some(j) = cell(grid, ln_norm_sqr(z)) {
            m.density[j] += w * ma_density(&lab.weight, z)? / h;
        }
    }
    for (z, &w) in rule.nodes.iter().zip(&rule.weights) {
        if let Some(j) = cell(grid, ln_norm_sqr(z)) {
            m.density[j] += w * mu_density(&lab.weight, &lab.domain, z)? / h;
        }
    }
    m.total_mass = m.smooth_mass();
    Ok(m)
}

/// Scaled to unit mass, so `W1` compares shapes only.
fn normalized(m: &RadialMeasure) -> RadialMeasure {
    let c = 1.0 / m.total_mass;
    RadialMeasure {
        density: m.density.iter().map(|d| d * c).collect(),
        atoms: m.atoms.iter().map(|&(s, a)| (s, a * c)).collect(),
        total_mass: 1.0,
        ..m.clone()
    }
}

pub fn run(lab: &Lab) -> Result<Report> {
    let cfg = &lab.cfg;
    let mut r = lab.report("equilibrium")?;
    for ex in cfg.str_list("equilibrium.examples")? {
        compatible(&lab.for_example(&ex)?, &mut r)?;
    }
    counterexample(&lab.for_example(cfg.str("equilibrium.counterexample")?)?, &mut r)?;
    if lab.is_radial() {
        slope_gates(lab, &mut r)?;
    }

    if lab.weight.profile(0.0).is_some() {
        let phi_e = equilibrium_profile(lab)?;
        let states = lab.states_for(&lab.ks)?;
        let (s0, s1) = (cfg.f64("equilibrium.s_min")?, cfg.f64("equilibrium.s_max")?);
        let count = cfg.usize("equilibrium.kernel_points")?;
        let ke = envelope_from_kernel(&states, s0, s1, count)?;
        r.scalar("kernel_error_estimate", ke.error_estimate);
        r.scalar("kernel_monotone", if ke.monotone { 1.0 } else { 0.0 });
        let step = (s1 - s0) / (count - 1) as f64;
        for st in &states {
            let worst = (0..count)
                .map(|j| {
                    let s = s0 + step * j as f64;
                    (st.log_kernel_metric(&ray(lab.n, s)) - phi_e.value_at(s)).abs()
                })
                .fold(0.0, f64::max);
            r.push(st.k(), "kernel_envelope_error", worst);
        }
    } else {
        r.note("weight has no radial profile; kernel envelope skipped");
    }

    if lab.conjecture {
        let grid = RadialProfile::from_fn(cfg.f64("equilibrium.s_min")?, cfg.f64("equilibrium.s_max")?, cfg.usize("equilibrium.points")?, |_| 0.0)?;
        let predicted = predicted_measure(lab, &grid, &lab.boundary_rule()?)?;
        let target = normalized(&predicted);
        let rows: Vec<(f64, f64)> = lab
            .ks
            .par_iter()
            .map(|&k| {
                let b = bergman_measure(lab, k, &grid)?;
                Ok((compare_measures(&normalized(&b), &target).w1, b.total_mass - predicted.total_mass))
            })
            .collect::<Result<_>>()?;
        for (&k, &(w, d)) in lab.ks.iter().zip(&rows) {
            r.push(k, "conjecture_w1", w);
            r.push(k, "conjecture_mass_delta", d);
        }
        r.note("conjecture mode: Bergman measure against the predicted measure, no gates");
    }
    Ok(r)
}
