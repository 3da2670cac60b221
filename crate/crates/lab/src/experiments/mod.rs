//! Experiment runners. Each takes a [`Lab`] and returns one [`Report`].

mod appendix;
mod bm;
mod equilibrium;
mod morse;
mod rate;
mod scale_bd;
mod scale_int;
mod weakstar;

use std::cell::Cell;
use std::str::FromStr;

use anyhow::{anyhow, bail, Result};
use bergkern::bergman::KernelState;
use bergkern::geometry::{
    integrate_boundary, integrate_interior, integrate_interior_radial, ma_density, slope_T, Against, BoundaryFrame, BoundaryRule, Domain,
    InteriorRule, RuleSpec, VolumeForm, Weight,
};
use bergkern::quadrature::sphere_samples;
use bergkern::C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cache::Cache;
use crate::config::Config;
use crate::report::Report;

pub use morse::geometry_mass;
pub use weakstar::limit_pairing;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Morse,
    ScaleInt,
    ScaleBd,
    Weakstar,
    Rate,
    Bm,
    Appendix,
    Equilibrium,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::Morse,
        Experiment::ScaleInt,
        Experiment::ScaleBd,
        Experiment::Weakstar,
        Experiment::Rate,
        Experiment::Bm,
        Experiment::Appendix,
        Experiment::Equilibrium,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Morse => "morse",
            Experiment::ScaleInt => "scale-int",
            Experiment::ScaleBd => "scale-bd",
            Experiment::Weakstar => "weakstar",
            Experiment::Rate => "rate",
            Experiment::Bm => "bm",
            Experiment::Appendix => "appendix",
            Experiment::Equilibrium => "equilibrium",
        }
    }

    pub fn run(&self, lab: &Lab) -> Result<Report> {
        let report = match self {
            Experiment::Morse => morse::run(lab),
            Experiment::ScaleInt => scale_int::run(lab),
            Experiment::ScaleBd => scale_bd::run(lab),
            Experiment::Weakstar => weakstar::run(lab),
            Experiment::Rate => rate::run(lab),
            Experiment::Bm => bm::run(lab),
            Experiment::Appendix => appendix::run(lab),
            Experiment::Equilibrium => equilibrium::run(lab),
        }?;
        for g in report.gates.iter().filter(|g| !g.pass) {
            log::warn!("{}: gate {} failed ({:e} vs {:e})", report.experiment, g.name, g.value, g.bound);
        }
        Ok(report)
    }
}

impl FromStr for Experiment {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| anyhow!("unknown experiment {s:?}"))
    }
}

/// Configuration, the example it names and an optional state cache.
#[derive(Debug, Clone)]
pub struct Lab {
    pub cfg: Config,
    pub weight: Weight,
    pub domain: Domain,
    pub n: usize,
    pub ks: Vec<usize>,
    pub cache: Option<Cache>,
    /// Ungated comparison of Bergman and predicted measures in `equilibrium`.
    pub conjecture: bool,
}

impl Lab {
    pub fn new(cfg: Config, cache: Option<Cache>) -> Result<Self> {
        let weight = cfg.weight()?;
        let domain = cfg.domain()?;
        let ks = cfg.k_list()?;
        if ks.is_empty() {
            bail!("k_list is empty");
        }
        Ok(Self { n: cfg.n()?, weight, domain, ks, cfg, cache, conjecture: false })
    }

    /// Same settings for `weight@domain`.
    pub fn for_example(&self, example: &str) -> Result<Self> {
        let (w, d) = example.split_once('@').ok_or_else(|| anyhow!("example {example:?} is not weight@domain"))?;
        let mut cfg = self.cfg.clone();
        cfg.set("weight", toml::Value::String(w.into()));
        cfg.set("domain", toml::Value::String(d.into()));
        Ok(Self { conjecture: self.conjecture, ..Self::new(cfg, self.cache.clone())? })
    }

    pub fn example(&self) -> String {
        format!("{}@{}", self.cfg.weight_spec().unwrap_or("?"), self.cfg.domain_spec().unwrap_or("?"))
    }

    pub fn state(&self, k: usize) -> Result<KernelState> {
        match &self.cache {
            Some(c) => c.get_or_build(&self.weight, &self.domain, k),
            None => Ok(KernelState::build(&self.weight, &self.domain, k)?),
        }
    }

    /// States for `ks`, built in parallel, in order.
    pub fn states_for(&self, ks: &[usize]) -> Result<Vec<KernelState>> {
        ks.par_iter().map(|&k| self.state(k)).collect()
    }

    pub fn report(&self, name: &str) -> Result<Report> {
        let mut r = Report::new(name, &self.cfg)?;
        r.k_list = self.ks.clone();
        Ok(r)
    }

    pub fn boundary_rule(&self) -> Result<BoundaryRule> {
        Ok(BoundaryRule::new(&self.domain, self.cfg.usize("quadrature.boundary_simplex")?, self.cfg.usize("quadrature.boundary_angles")?))
    }

    pub fn seed(&self) -> Result<u64> {
        self.cfg.u64("seed")
    }

    pub fn rng(&self, stream: u64) -> Result<ChaCha8Rng> {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed()?);
        r.set_stream(stream);
        Ok(r)
    }

    /// Unit vector `e_1`.
    pub fn e1(&self) -> Vec<C64> {
        e1(self.n)
    }

    /// `ln|ζ|²` of `∂X` on the `e_1` ray.
    pub fn boundary_s(&self) -> f64 {
        self.domain.boundary_s(&self.e1())
    }

    /// Boundary point on the `e_1` ray.
    pub fn sigma(&self) -> Result<Vec<C64>> {
        self.domain.boundary_point(&self.e1()).ok_or_else(|| anyhow!("domain {} has no boundary", self.domain.id()))
    }

    /// Radial fast path available for integrals in `s`.
    pub fn is_radial(&self) -> bool {
        self.weight.is_radial() && self.domain.is_radial()
    }
}

pub(crate) fn e1(n: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); n];
    v[0] = C64::new(1.0, 0.0);
    v
}

/// `e^{s/2} e_1`.
pub(crate) fn ray(n: usize, s: f64) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); n];
    v[0] = C64::new((0.5 * s).exp(), 0.0);
    v
}

pub(crate) fn ln_norm_sqr(z: &[C64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().ln()
}

/// `count` uniform nodes on `[a, b]`.
pub(crate) fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![a];
    }
    let h = (b - a) / (count - 1) as f64;
    (0..count).map(|j| a + h * j as f64).collect()
}

/// `∫_X g(ln|ζ|²) dV` over a unitary-invariant domain with a fallible
/// integrand.
pub(crate) fn radial_integral(domain: &Domain, form: VolumeForm, g: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let err: Cell<Option<anyhow::Error>> = Cell::new(None);
    let v = integrate_interior_radial(
        |s| match g(s) {
            Ok(v) => v,
            Err(e) => {
                err.set(Some(e));
                0.0
            }
        },
        domain,
        form,
    )?;
    match err.into_inner() {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// `∫_X f dV` on a product rule with a fallible integrand.
pub(crate) fn rule_integral(rule: &InteriorRule, f: impl Fn(&[C64]) -> Result<f64>) -> Result<f64> {
    let err: Cell<Option<anyhow::Error>> = Cell::new(None);
    let v = integrate_interior(
        |z| match f(z) {
            Ok(v) => v,
            Err(e) => {
                err.set(Some(e));
                0.0
            }
        },
        rule,
    )?;
    match err.into_inner() {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// `∫_X f(ln|ζ|²) (dd^cφ)ⁿ/n!`.
pub(crate) fn interior_curvature_pairing(lab: &Lab, f: &dyn Fn(f64) -> f64) -> Result<f64> {
    let n = lab.n;
    if lab.is_radial() {
        return radial_integral(&lab.domain, VolumeForm::Lebesgue, |s| Ok(f(s) * ma_density(&lab.weight, &ray(n, s))?));
    }
    let spec = RuleSpec { simplex_points: 24, angles: 24, radial_points: 48, radial_panels: 4 };
    let rule = InteriorRule::new(&lab.domain, VolumeForm::Lebesgue, spec);
    rule_integral(&rule, |z| Ok(f(ln_norm_sqr(z)) * ma_density(&lab.weight, z)?))
}

/// `∫_{∂X} f(ln|ζ|²) μ`.
pub(crate) fn boundary_mu_pairing(lab: &Lab, f: &dyn Fn(f64) -> f64) -> Result<f64> {
    if !lab.domain.has_boundary() {
        return Ok(0.0);
    }
    let rule = lab.boundary_rule()?;
    Ok(integrate_boundary(|z| f(ln_norm_sqr(z)), &lab.domain, &rule, Against::Mu(&lab.weight))?)
}

/// `T` at `count` seeded random boundary points.
pub fn slope_survey(lab: &Lab, count: usize) -> Result<Vec<f64>> {
    sphere_samples(lab.n, count, lab.seed()?)
        .iter()
        .map(|xi| {
            let sigma = lab.domain.boundary_point(xi).ok_or_else(|| anyhow!("domain has no boundary"))?;
            Ok(slope_T(&lab.weight, &lab.domain, &sigma)?)
        })
        .collect()
}

pub(crate) fn spread(values: &[f64]) -> (f64, f64) {
    values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// `k^{-(n+1)} c_ω B^k` at the frame point `(0, …, 0, iv/k)`, with
/// `c_ω` converting `ω_n` to Lebesgue measure in frame coordinates.
pub(crate) fn boundary_diagonal(frame: &BoundaryFrame, state: &KernelState, v: f64) -> Result<f64> {
    let n = frame.n();
    let k = state.k() as f64;
    let mut y = vec![C64::new(0.0, 0.0); n];
    y[n - 1] = C64::new(0.0, v);
    let x = frame.map_scaled(&y, k);
    let c = VolumeForm::FubiniStudy.density(&frame.sigma) * frame.jac_det_sq;
    Ok(state.bergman_function(&x)? * c / k.powi(n as i32 + 1))
}

/// Least-squares `y ≈ c x` through the origin: `(c, standard error)`.
pub(crate) fn fit_through_origin(x: &[f64], y: &[f64]) -> (f64, f64) {
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let c = x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / sxx;
    let dof = (x.len().max(2) - 1) as f64;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - c * a).powi(2)).sum();
    (c, (rss / dof / sxx).sqrt())
}
