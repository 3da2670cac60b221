//! Radial equilibrium metrics and their Monge–Ampère measures on the line
//! `s = ln|ζ|²`.
//!
//! For a unitary-invariant weight `φ = u(s)` the class of competitors reduces
//! to convex functions of `s` with slopes in `[0, 1]`, so the equilibrium
//! profile is the largest such function below `u` on the `s`-image of `X`.

use alloc::vec;
use alloc::vec::Vec;

use crate::bergman::KernelState;
use crate::geometry::{integrate_boundary, ma_density, slope_T, Against, BoundaryRule, Domain, Weight};
use crate::quadrature::{gauss_legendre_on, sphere_area};
use crate::real::{exp, factorial, powi, sqrt};
use crate::{Error, Result, C64};

/// Half-width every profile grid must cover.
pub const MIN_SPAN: f64 = 12.0;

const SLOPE_TOL: f64 = 1e-10;

/// Samples `u(s_j)` on a uniform grid `s_j = s0 + j h`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    s0: f64,
    h: f64,
    values: Vec<f64>,
}

impl RadialProfile {
    pub fn new(s0: f64, h: f64, values: Vec<f64>) -> Result<Self> {
        if !(h > 0.0) || values.len() < 3 {
            return Err(Error::Invalid("profile grid needs h > 0 and at least three nodes".into()));
        }
        let s1 = s0 + h * (values.len() - 1) as f64;
        if s0 > -MIN_SPAN + 1e-9 || s1 < MIN_SPAN - 1e-9 {
            return Err(Error::Invalid(alloc::format!("profile grid [{s0}, {s1}] does not cover [-12, 12]")));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "profile value", at: s0 + h * j as f64 });
        }
        Ok(Self { s0, h, values })
    }

    /// `count` nodes from `s_min` to `s_max` inclusive.
    pub fn from_fn(s_min: f64, s_max: f64, count: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let h = (s_max - s_min) / (count.max(2) - 1) as f64;
        Self::new(s_min, h, (0..count).map(|j| f(s_min + h * j as f64)).collect())
    }

    /// Profile `u` of a unitary-invariant weight.
    pub fn from_weight(weight: &Weight, s_min: f64, s_max: f64, count: usize) -> Result<Self> {
        if weight.profile(0.0).is_none() {
            return Err(Error::Invalid("weight is not unitary invariant".into()));
        }
        Self::from_fn(s_min, s_max, count, |s| weight.profile(s).map_or(f64::NAN, |p| p.u))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn s(&self, j: usize) -> f64 {
        self.s0 + self.h * j as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.s(j)).collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Forward differences `(u_{j+1} - u_j)/h`.
    pub fn slopes(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| (w[1] - w[0]) / self.h).collect()
    }

    /// Piecewise-linear interpolation, clamped to the grid.
    pub fn value_at(&self, s: f64) -> f64 {
        let t = ((s - self.s0) / self.h).clamp(0.0, (self.len() - 1) as f64);
        let j = (t as usize).min(self.len() - 2);
        let f = t - j as f64;
        self.values[j] * (1.0 - f) + self.values[j + 1] * f
    }

    fn with_values(&self, values: Vec<f64>) -> Self {
        Self { s0: self.s0, h: self.h, values }
    }
}

/// Equilibrium profile `χ_e` with the constraint mask it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    pub profile: RadialProfile,
    pub constraint: Vec<bool>,
    pub iterations: usize,
}

impl Envelope {
    /// Checks convexity, slope bounds `[0, 1]` and `χ ≤ u` on the constraint
    /// set for arbitrary grid values.
    pub fn admissible(values: &[f64], u: &RadialProfile, constraint: &[bool], tol: f64) -> bool {
        let h = u.step();
        let convex = values.windows(3).all(|w| w[2] - 2.0 * w[1] + w[0] >= -tol);
        let slopes = values.windows(2).all(|w| {
            let d = (w[1] - w[0]) / h;
            (-tol..=1.0 + tol).contains(&d)
        });
        let below = values.iter().zip(u.values()).zip(constraint).all(|((c, u), &m)| !m || *c <= u + tol);
        convex && slopes && below
    }

    pub fn is_valid(&self, u: &RadialProfile) -> bool {
        Self::admissible(self.profile.values(), u, &self.constraint, SLOPE_TOL)
    }
}

/// Largest convex grid function with slopes in `[0, 1]` lying below `u` on
/// nodes with `s` in `region`.
///
/// Each pass computes the exact minorant `max_a (a s + min_C (u - a s))` over
/// the candidate slopes `0`, `1` and the lower-hull edge slopes; passes repeat
/// on `min(χ, u)` until the sup change drops below `tol`.
pub fn radial_envelope(u: &RadialProfile, region: (f64, f64), tol: f64) -> Result<Envelope> {
    let constraint: Vec<bool> = (0..u.len()).map(|j| (region.0..=region.1).contains(&u.s(j))).collect();
    if !constraint.iter().any(|&m| m) {
        return Err(Error::Invalid("constraint region contains no grid node".into()));
    }
    let mut current = u.values().to_vec();
    let cap = 50;
    let mut change = f64::INFINITY;
    for it in 1..=cap {
        let target: Vec<f64> = current.iter().zip(u.values()).map(|(c, v)| c.min(*v)).collect();
        let next = minorant(u, &target, &constraint);
        change = next.iter().zip(&current).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        current = next;
        if change < tol {
            return Ok(Envelope { profile: u.with_values(current), constraint, iterations: it });
        }
    }
    Err(Error::NoConvergence { residual: change })
}

fn minorant(grid: &RadialProfile, values: &[f64], constraint: &[bool]) -> Vec<f64> {
    let pts: Vec<(f64, f64)> = (0..grid.len()).filter(|&j| constraint[j]).map(|j| (grid.s(j), values[j])).collect();
    let hull = lower_hull(&pts);
    let mut slopes = vec![0.0, 1.0];
    for w in hull.windows(2) {
        let a = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
        if a > 0.0 && a < 1.0 {
            slopes.push(a);
        }
    }
    let lines: Vec<(f64, f64)> = slopes.iter().map(|&a| (a, hull.iter().map(|&(s, v)| v - a * s).fold(f64::INFINITY, f64::min))).collect();
    (0..grid.len())
        .map(|j| {
            let s = grid.s(j);
            lines.iter().map(|&(a, b)| a * s + b).fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

fn lower_hull(pts: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for &p in pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// Measure on the `s`-line: a density on the cells `[s_j - h/2, s_j + h/2]`
/// plus atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialMeasure {
    pub s0: f64,
    pub h: f64,
    /// Density per unit `s` on each cell.
    pub density: Vec<f64>,
    /// `(location, mass)`, sorted by location.
    pub atoms: Vec<(f64, f64)>,
    pub total_mass: f64,
}

impl RadialMeasure {
    pub fn empty(s0: f64, h: f64, len: usize) -> Self {
        Self { s0, h, density: vec![0.0; len], atoms: Vec::new(), total_mass: 0.0 }
    }

    pub fn s(&self, j: usize) -> f64 {
        self.s0 + self.h * j as f64
    }

    pub fn smooth_mass(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.h
    }

    pub fn atom_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    /// Mass of the smooth part on `s < s_cut`, counting partial cells.
    pub fn smooth_mass_below(&self, s_cut: f64) -> f64 {
        (0..self.density.len())
            .map(|j| {
                let lo = self.s(j) - 0.5 * self.h;
                self.density[j] * (s_cut - lo).clamp(0.0, self.h)
            })
            .sum()
    }

    /// `μ((-∞, t])`.
    pub fn cdf(&self, t: f64) -> f64 {
        self.smooth_mass_below(t) + self.atoms.iter().filter(|a| a.0 <= t).map(|a| a.1).sum::<f64>()
    }

    fn atom_at(&self, t: f64) -> f64 {
        self.atoms.iter().filter(|a| a.0 == t).map(|a| a.1).sum()
    }

    fn breakpoints(&self) -> impl Iterator<Item = f64> + '_ {
        let cells = (0..=self.density.len()).map(|j| self.s0 + self.h * (j as f64 - 0.5));
        cells.chain(self.atoms.iter().map(|a| a.0))
    }
}

/// `d(χ')ⁿ/n!` of an envelope. Slope jumps standing out of their
/// neighbourhood by the given threshold become atoms; the rest is spread
/// uniformly over the node cells.
pub fn radial_monge_ampere(env: &Envelope, n: usize, atom_threshold: f64) -> RadialMeasure {
    let p = &env.profile;
    let h = p.step();
    let slopes = p.slopes();
    let nf = factorial(n);
    let len = p.len();
    let mut node = vec![0.0; len];
    for j in 1..len - 1 {
        let (l, r) = (slopes[j - 1].clamp(0.0, 1.0), slopes[j].clamp(0.0, 1.0));
        if r - l > SLOPE_TOL {
            node[j] = (powi(r, n as i32) - powi(l, n as i32)) / nf;
        }
    }
    let window = 10usize;
    let is_atom: Vec<bool> = (0..len)
        .map(|j| {
            let mut around: Vec<f64> =
                (j.saturating_sub(window)..(j + window + 1).min(len)).filter(|&i| i + 1 < j || i > j + 1).map(|i| node[i]).collect();
            around.sort_by(f64::total_cmp);
            let median = if around.is_empty() { 0.0 } else { around[around.len() / 2] };
            node[j] > atom_threshold + 8.0 * median
        })
        .collect();
    let mut measure = RadialMeasure::empty(p.s(0), h, len);
    let mut j = 0;
    while j < len {
        if is_atom[j] {
            let (mut m, mut ms) = (0.0, 0.0);
            while j < len && is_atom[j] {
                m += node[j];
                ms += node[j] * p.s(j);
                j += 1;
            }
            measure.atoms.push((ms / m, m));
        } else {
            measure.density[j] = node[j] / h;
            j += 1;
        }
    }
    measure.total_mass = node.iter().sum();
    measure
}

/// Wasserstein-1 distance and matched atom masses.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureComparison {
    pub w1: f64,
    pub total_delta: f64,
    /// `(location, mass in a, mass in b)`; atoms within one cell are paired.
    pub atoms: Vec<(f64, f64, f64)>,
}

/// `W1 = ∫ |F_a - F_b| ds`, exact for piecewise-linear distribution
/// functions with jumps.
pub fn compare_measures(a: &RadialMeasure, b: &RadialMeasure) -> MeasureComparison {
    let mut t: Vec<f64> = a.breakpoints().chain(b.breakpoints()).collect();
    t.sort_by(f64::total_cmp);
    t.dedup();
    let mut w1 = 0.0;
    for w in t.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let d0 = a.cdf(lo) - b.cdf(lo);
        let d1 = (a.cdf(hi) - a.atom_at(hi)) - (b.cdf(hi) - b.atom_at(hi));
        w1 += abs_linear_integral(d0, d1, hi - lo);
    }
    let tol = a.h.max(b.h);
    let mut atoms: Vec<(f64, f64, f64)> = a.atoms.iter().map(|&(s, m)| (s, m, 0.0)).collect();
    for &(s, m) in &b.atoms {
        match atoms.iter_mut().find(|e| (e.0 - s).abs() <= tol && e.2 == 0.0) {
            Some(e) => e.2 = m,
            None => atoms.push((s, 0.0, m)),
        }
    }
    atoms.sort_by(|x, y| x.0.total_cmp(&y.0));
    MeasureComparison { w1, total_delta: a.total_mass - b.total_mass, atoms }
}

/// `∫_0^w |d0 + (d1 - d0) x/w| dx`.
fn abs_linear_integral(d0: f64, d1: f64, w: f64) -> f64 {
    if d0 * d1 >= 0.0 {
        0.5 * w * (d0.abs() + d1.abs())
    } else {
        0.5 * w * (d0 * d0 + d1 * d1) / (d0.abs() + d1.abs())
    }
}

/// `1_X (dd^cφ)ⁿ/n! + [∂X] ∧ μ` pushed forward to the `s`-line on the cells
/// of the given grid. Refuses when `T` is not constant on `∂X`.
pub fn corollary_measure(weight: &Weight, domain: &Domain, grid: &RadialProfile, rule: &BoundaryRule, slope_tol: f64) -> Result<RadialMeasure> {
    let mut t_min = f64::INFINITY;
    let mut t_max = f64::NEG_INFINITY;
    for z in &rule.nodes {
        let t = slope_T(weight, domain, z)?;
        t_min = t_min.min(t);
        t_max = t_max.max(t);
    }
    if t_max - t_min > slope_tol {
        return Err(Error::NonConstantSlope { spread: t_max - t_min, min: t_min, max: t_max });
    }
    if !domain.is_radial() {
        return Err(Error::Invalid("radial pushforward needs a unitary-invariant domain".into()));
    }
    let n = domain.n();
    let mut e1 = vec![C64::new(0.0, 0.0); n];
    e1[0] = C64::new(1.0, 0.0);
    let s_b = domain.boundary_s(&e1);
    let area = sphere_area(n);
    let h = grid.step();
    let mut measure = RadialMeasure::empty(grid.s(0), h, grid.len());
    let mut smooth = 0.0;
    for j in 0..grid.len() {
        let lo = (grid.s(j) - 0.5 * h).max(s_b);
        let hi = grid.s(j) + 0.5 * h;
        if hi <= lo {
            continue;
        }
        let (xs, ws) = gauss_legendre_on(8, lo, hi);
        let mut m = 0.0;
        for (&s, &w) in xs.iter().zip(&ws) {
            let mut z = vec![C64::new(0.0, 0.0); n];
            z[0] = C64::new(sqrt(exp(s)), 0.0);
            m += w * ma_density(weight, &z)? * area * exp(n as f64 * s) * 0.5;
        }
        measure.density[j] = m / h;
        smooth += m;
    }
    let atom = if domain.has_boundary() { integrate_boundary(|_| 1.0, domain, rule, Against::Mu(weight))? } else { 0.0 };
    if atom > 0.0 {
        measure.atoms.push((s_b, atom));
    }
    measure.total_mass = smooth + atom;
    Ok(measure)
}

/// `k⁻¹ ln K^k` along `ζ = e^{s/2} e_1` at the largest `k`, with the
/// sup-differences between successive `k` as an error trace.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelEnvelope {
    pub profile: RadialProfile,
    pub ks: Vec<usize>,
    /// `sup_s |f_{k_{i+1}} - f_{k_i}|`.
    pub differences: Vec<f64>,
    pub error_estimate: f64,
    pub monotone: bool,
}

pub fn envelope_from_kernel(states: &[KernelState], s_min: f64, s_max: f64, count: usize) -> Result<KernelEnvelope> {
    if states.len() < 2 {
        return Err(Error::Invalid("envelope_from_kernel needs at least two degrees".into()));
    }
    let n = states[0].n();
    let sample = |state: &KernelState| -> Result<RadialProfile> {
        RadialProfile::from_fn(s_min, s_max, count, |s| {
            let mut z = vec![C64::new(0.0, 0.0); n];
            z[0] = C64::new(sqrt(exp(s)), 0.0);
            state.log_kernel_metric(&z)
        })
    };
    let profiles: Vec<RadialProfile> = states.iter().map(sample).collect::<Result<_>>()?;
    let differences: Vec<f64> =
        profiles.windows(2).map(|w| w[0].values().iter().zip(w[1].values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)).collect();
    let monotone = differences.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));
    if !monotone {
        log::warn!("successive-k differences of k^-1 ln K^k are not decreasing: {differences:?}");
    }
    Ok(KernelEnvelope {
        error_estimate: *differences.last().expect("two profiles"),
        profile: profiles.into_iter().last().expect("two profiles"),
        ks: states.iter().map(KernelState::k).collect(),
        differences,
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::{ln, ln_1p_exp};

    fn grid(f: impl Fn(f64) -> f64) -> RadialProfile {
        RadialProfile::from_fn(-12.0, 12.0, 2401, f).unwrap()
    }

    #[test]
    fn log_modulus_envelope() {
        let u = grid(|s| s);
        let env = radial_envelope(&u, (0.0, f64::INFINITY), 1e-8).unwrap();
        for (j, v) in env.profile.values().iter().enumerate() {
            assert!((v - u.s(j).max(0.0)).abs() < 1e-12);
        }
        let m = radial_monge_ampere(&env, 2, 1e-6);
        assert_eq!(m.atoms.len(), 1);
        assert!(m.atoms[0].0.abs() < 1e-12 && (m.atoms[0].1 - 0.5).abs() < 1e-12);
        assert!(m.smooth_mass() < 1e-12);
    }

    #[test]
    fn fubini_study_envelope() {
        let u = grid(ln_1p_exp);
        let env = radial_envelope(&u, (0.0, f64::INFINITY), 1e-8).unwrap();
        assert!(env.is_valid(&u));
        for (j, v) in env.profile.values().iter().enumerate() {
            let s = u.s(j);
            let want = if s <= 0.0 { ln(2.0) } else { ln_1p_exp(s) };
            assert!((v - want).abs() < 1e-4, "{s}: {v} vs {want}");
        }
        let m = radial_monge_ampere(&env, 2, 1e-6);
        assert_eq!(m.atoms.len(), 1);
        assert!((m.atoms[0].1 - 0.125).abs() < 2e-3);
        let slopes = env.profile.slopes();
        let total = (powi(*slopes.last().unwrap(), 2) - powi(slopes[0], 2)) / 2.0;
        assert!((m.total_mass - total).abs() < 1e-12);
        assert!(m.smooth_mass_below(-0.01) < 1e-8);
    }

    #[test]
    fn admissible_profile_is_its_own_envelope() {
        let u = grid(|s| 0.5 * ln_1p_exp(s) + 0.25 * s);
        let env = radial_envelope(&u, (f64::NEG_INFINITY, f64::INFINITY), 1e-8).unwrap();
        for (a, b) in env.profile.values().iter().zip(u.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        let again = radial_envelope(&env.profile, (0.0, f64::INFINITY), 1e-8).unwrap();
        let again2 = radial_envelope(&again.profile, (0.0, f64::INFINITY), 1e-8).unwrap();
        for (a, b) in again.profile.values().iter().zip(again2.profile.values()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn linear_profile_has_no_measure() {
        let u = grid(|s| 0.3 * s + 1.0);
        let env = radial_envelope(&u, (f64::NEG_INFINITY, f64::INFINITY), 1e-8).unwrap();
        let m = radial_monge_ampere(&env, 2, 1e-6);
        assert!(m.total_mass.abs() < 1e-12 && m.atoms.is_empty());
    }

    #[test]
    fn w1_of_shifted_atom() {
        let mut a = RadialMeasure::empty(-12.0, 0.01, 2401);
        a.atoms.push((0.0, 0.5));
        a.total_mass = 0.5;
        let mut b = a.clone();
        b.atoms[0].0 = 0.3;
        assert!(compare_measures(&a, &a).w1 == 0.0);
        assert!((compare_measures(&a, &b).w1 - 0.15).abs() < 1e-12);
        let mut c = RadialMeasure::empty(-12.0, 0.01, 2401);
        c.density[1200] = 0.5 / 0.01;
        c.total_mass = 0.5;
        assert!((compare_measures(&a, &c).w1 - 0.5 * 0.0025).abs() < 1e-12);
    }

    #[test]
    fn short_grid_is_rejected() {
        assert!(RadialProfile::from_fn(-5.0, 5.0, 11, |s| s).is_err());
    }
}
