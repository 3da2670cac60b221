//! Weights, domains, curvature densities, the slope function `T`, the
//! boundary form `μ` and integration over `X` and `∂X`.

mod domain;
mod frame;
mod weight;

pub use domain::{DefiningFunction, Domain};
pub use frame::{adapted_frame, BoundaryFrame, HoloJet, InteriorFrame};
pub use weight::{ProfileJet, RadialWeight, Weight};

use alloc::vec::Vec;

use crate::linalg::{det, generalized_eigenvalues, hermitian_eigen, orthogonal_complement, CMatrix};
use crate::quadrature::{adaptive, gauss_legendre_on, sphere_area, SphereRule};
use crate::real::{exp, logistic, logit, norm_sqr, powi, sqrt, PI};
use crate::{Error, Result, C64};

/// A `(1,1)`-form `i/2π Σ H_ij dζ_i ∧ dζ̄_j` stored by its raw coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianForm {
    pub matrix: CMatrix,
}

impl HermitianForm {
    pub fn new(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Density of the top power divided by `n!` against Lebesgue measure.
    pub fn density(&self) -> f64 {
        det(&self.matrix).re / powi(PI, self.dim() as i32)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigen(&self.matrix).values[0]
    }
}

/// Density of `(dd^c φ)ⁿ/n!` against Lebesgue measure: `det H / πⁿ`.
pub fn ma_density(weight: &Weight, z: &[C64]) -> Result<f64> {
    let h = weight.hess(z)?;
    if h.as_slice().iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(Error::NonFinite { what: "hessian", at: sqrt(norm_sqr(z)) });
    }
    Ok(HermitianForm::new(h).density())
}

/// Volume forms used for `L²` norms and integration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeForm {
    /// `ω_n`, the Fubini–Study volume: density `(1+|ζ|²)^{-(n+1)}/πⁿ`.
    FubiniStudy,
    Lebesgue,
}

impl VolumeForm {
    pub fn density(&self, z: &[C64]) -> f64 {
        match self {
            VolumeForm::FubiniStudy => {
                let n = z.len() as i32;
                powi(1.0 + norm_sqr(z), -(n + 1)) / powi(PI, n)
            }
            VolumeForm::Lebesgue => 1.0,
        }
    }

    /// Radial measure in `x = logistic(ln|ζ|²)` per unit sphere area.
    fn radial_element(&self, n: usize, x: f64) -> f64 {
        match self {
            VolumeForm::FubiniStudy => powi(x, n as i32 - 1) / (2.0 * powi(PI, n as i32)),
            VolumeForm::Lebesgue => powi(x / (1.0 - x), n as i32) / (2.0 * x * (1.0 - x)),
        }
    }
}

/// Far end of the radial compactification, `s = 40`.
pub const S_MAX: f64 = 40.0;

/// Resolution of a product rule on `X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RuleSpec {
    pub simplex_points: usize,
    pub angles: usize,
    pub radial_points: usize,
    pub radial_panels: usize,
}

impl RuleSpec {
    /// Resolves the Gram integrands of degree `≤ k` for the Fubini–Study weight
    /// and volume exactly, with a safety margin for smooth weights.
    pub fn for_degree(n: usize, k: usize) -> Self {
        Self { simplex_points: k / 2 + n + 2, angles: k + 1, radial_points: k / 2 + n + 8, radial_panels: 2 }
    }

    pub fn refined(&self) -> Self {
        Self {
            simplex_points: self.simplex_points + 4,
            angles: self.angles + 2,
            radial_points: self.radial_points + 8,
            radial_panels: self.radial_panels * 2,
        }
    }
}

/// Node/weight set on `X` for a volume form.
#[derive(Debug, Clone)]
pub struct InteriorRule {
    pub nodes: Vec<Vec<C64>>,
    pub weights: Vec<f64>,
    pub spec: RuleSpec,
}

impl InteriorRule {
    /// Sphere × radial product rule. Rays run from `∂X` to `|ζ|² = e^{S_MAX}`
    /// and are discretized in `x = logistic(s)`.
    pub fn new(domain: &Domain, form: VolumeForm, spec: RuleSpec) -> Self {
        let n = domain.n();
        let sphere = SphereRule::product(n, spec.simplex_points, spec.angles);
        let x_max = match form {
            VolumeForm::FubiniStudy => 1.0,
            VolumeForm::Lebesgue => logistic(S_MAX),
        };
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for (xi, &ws) in sphere.nodes.iter().zip(&sphere.weights) {
            let x_b = logistic(domain.boundary_s(xi));
            let width = (x_max - x_b) / spec.radial_panels as f64;
            for p in 0..spec.radial_panels {
                let lo = x_b + width * p as f64;
                let (xs, wx) = gauss_legendre_on(spec.radial_points, lo, lo + width);
                for (&x, &wx) in xs.iter().zip(&wx) {
                    let r = sqrt(exp(logit(x)));
                    nodes.push(xi.iter().map(|c| c * r).collect());
                    weights.push(ws * wx * form.radial_element(n, x));
                }
            }
        }
        Self { nodes, weights, spec }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Surface-measure rule on `∂X` from a sphere rule by radial projection.
#[derive(Debug, Clone)]
pub struct BoundaryRule {
    pub nodes: Vec<Vec<C64>>,
    pub weights: Vec<f64>,
}

impl BoundaryRule {
    pub fn new(domain: &Domain, simplex_points: usize, angles: usize) -> Self {
        if !domain.has_boundary() {
            return Self { nodes: Vec::new(), weights: Vec::new() };
        }
        let sphere = SphereRule::product(domain.n(), simplex_points, angles);
        let mut nodes = Vec::with_capacity(sphere.len());
        let mut weights = Vec::with_capacity(sphere.len());
        for (xi, &w) in sphere.nodes.iter().zip(&sphere.weights) {
            nodes.push(domain.boundary_point(xi).expect("boundary"));
            weights.push(w * domain.boundary_jacobian(xi));
        }
        Self { nodes, weights }
    }
}

/// `∫_X f dV` with the rule's volume form.
pub fn integrate_interior(f: impl Fn(&[C64]) -> f64, rule: &InteriorRule) -> Result<f64> {
    let mut acc = 0.0;
    for (z, &w) in rule.nodes.iter().zip(&rule.weights) {
        let v = f(z);
        if !v.is_finite() {
            return Err(Error::NonFinite { what: "interior integrand", at: sqrt(norm_sqr(z)) });
        }
        acc += w * v;
    }
    Ok(acc)
}

/// `∫_X g(ln|ζ|²) dV` for a unitary-invariant domain by one adaptive
/// integral in `x = logistic(s)`.
pub fn integrate_interior_radial(g: impl Fn(f64) -> f64, domain: &Domain, form: VolumeForm) -> Result<f64> {
    if !domain.is_radial() {
        return Err(Error::Invalid("radial integration needs a unitary-invariant domain".into()));
    }
    let n = domain.n();
    let mut e1 = alloc::vec![C64::new(0.0, 0.0); n];
    e1[0] = C64::new(1.0, 0.0);
    let x_b = logistic(domain.boundary_s(&e1));
    let x_max = match form {
        VolumeForm::FubiniStudy => 1.0,
        VolumeForm::Lebesgue => logistic(S_MAX),
    };
    let mut bad = None;
    let (v, _) = adaptive(
        |x| {
            let val = g(logit(x)) * form.radial_element(n, x);
            if !val.is_finite() {
                bad = Some(x);
                return 0.0;
            }
            val
        },
        x_b,
        x_max,
        1e-12,
        1e-15,
    )?;
    if let Some(x) = bad {
        return Err(Error::NonFinite { what: "radial integrand", at: sqrt(exp(logit(x))) });
    }
    Ok(v * sphere_area(n))
}

/// Measure on `∂X` to integrate against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Against<'a> {
    Surface,
    Mu(&'a Weight),
}

/// `∫_{∂X} f dσ` or `∫_{∂X} f μ`.
pub fn integrate_boundary(f: impl Fn(&[C64]) -> f64, domain: &Domain, rule: &BoundaryRule, against: Against<'_>) -> Result<f64> {
    let mut acc = 0.0;
    for (z, &w) in rule.nodes.iter().zip(&rule.weights) {
        let v = f(z);
        if !v.is_finite() {
            return Err(Error::NonFinite { what: "boundary integrand", at: sqrt(norm_sqr(z)) });
        }
        let m = match against {
            Against::Surface => 1.0,
            Against::Mu(weight) => mu_density(weight, domain, z)?,
        };
        acc += w * v * m;
    }
    Ok(acc)
}

/// Restrictions of `H_φ` and `-H_ρ` to the complex tangent space at `σ`.
struct TangentForms {
    a: CMatrix,
    b: CMatrix,
    grad_norm: f64,
}

fn tangent_forms(weight: &Weight, domain: &Domain, sigma: &[C64]) -> Result<TangentForms> {
    if domain.n() < 2 {
        return Err(Error::Invalid("boundary forms need n ≥ 2".into()));
    }
    if !domain.has_boundary() {
        return Err(Error::Invalid("domain has no boundary".into()));
    }
    let rho = domain.rho(sigma);
    if !(rho.abs() < 1e-10) {
        return Err(Error::NotOnBoundary { at: sqrt(norm_sqr(sigma)), rho });
    }
    let g: Vec<C64> = domain.grad_rho(sigma).iter().map(|c| c.conj() * 2.0).collect();
    let grad_norm = sqrt(norm_sqr(&g));
    if !(grad_norm > 1e-8) {
        return Err(Error::SingularPoint { at: sqrt(norm_sqr(sigma)) });
    }
    let e = orthogonal_complement(&g);
    let a = weight.hess(sigma)?.pullback_hermitian(&e);
    let b = domain.hess_rho(sigma).pullback_hermitian(&e).scale(C64::new(-1.0, 0.0));
    let eb = hermitian_eigen(&b);
    if !(eb.values[0] > 0.0) {
        return Err(Error::NotPseudoconcave { at: sqrt(norm_sqr(sigma)), max_eig: -eb.values[0] });
    }
    Ok(TangentForms { a, b, grad_norm })
}

/// Slope function: the largest `t` with `H_φ + t H_ρ ≥ 0` on `T^{1,0}∂X`.
#[allow(non_snake_case)]
pub fn slope_T(weight: &Weight, domain: &Domain, sigma: &[C64]) -> Result<f64> {
    let f = tangent_forms(weight, domain, sigma)?;
    let t = generalized_eigenvalues(&f.a, &f.b)?[0];
    if t < -1e-10 {
        return Err(Error::NegativeSlope { at: sqrt(norm_sqr(sigma)), slope: t });
    }
    Ok(t.max(0.0))
}

/// Density of `μ` against the surface measure `dσ`:
/// `|∇ρ|/(4πⁿ) ∫₀^T det(A - tB) dt` on the complex tangent space.
pub fn mu_density(weight: &Weight, domain: &Domain, sigma: &[C64]) -> Result<f64> {
    let f = tangent_forms(weight, domain, sigma)?;
    let t_max = generalized_eigenvalues(&f.a, &f.b)?[0].max(0.0);
    if !t_max.is_finite() {
        return Err(Error::NonFinite { what: "slope", at: sqrt(norm_sqr(sigma)) });
    }
    if t_max == 0.0 {
        return Ok(0.0);
    }
    let (int, _) = adaptive(|t| det(&f.a.sub(&f.b.scale(C64::new(t, 0.0)))).re, 0.0, t_max, 1e-10, 0.0)?;
    let n = domain.n() as i32;
    Ok((f.grad_norm / (4.0 * powi(PI, n)) * int).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::cis;

    #[test]
    fn ma_density_examples() {
        let z0 = [C64::new(0.0, 0.0); 2];
        assert!((ma_density(&Weight::FubiniStudy, &z0).unwrap() - 1.0 / (PI * PI)).abs() < 1e-15);
        let z = [C64::new(0.3, 1.2), C64::new(-2.0, 0.1)];
        assert!(ma_density(&Weight::LogModulus, &z).unwrap().abs() < 1e-15);
        assert!((ma_density(&Weight::Euclidean, &z).unwrap() - 1.0 / (PI * PI)).abs() < 1e-15);
        let one = [C64::new(0.5, 0.5)];
        let h = Weight::FubiniStudy.hess(&one).unwrap()[(0, 0)].re;
        assert_eq!(ma_density(&Weight::FubiniStudy, &one).unwrap(), h / PI);
    }

    #[test]
    fn slope_examples() {
        let ball = Domain::exterior_ball(2);
        let s = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        assert!((slope_T(&Weight::FubiniStudy, &ball, &s).unwrap() - 0.5).abs() < 1e-14);
        let t = [cis(0.3) * 0.6, cis(-1.1) * 0.8];
        assert!((slope_T(&Weight::LogModulus, &ball, &t).unwrap() - 1.0).abs() < 1e-14);
        assert!(matches!(slope_T(&Weight::FubiniStudy, &ball, &[C64::new(2.0, 0.0), C64::new(0.0, 0.0)]), Err(Error::NotOnBoundary { .. })));
    }

    #[test]
    fn interior_masses() {
        let ball = Domain::exterior_ball(2);
        let m = integrate_interior_radial(
            |s| ma_density(&Weight::FubiniStudy, &[C64::new(exp(s / 2.0), 0.0), C64::new(0.0, 0.0)]).unwrap(),
            &ball,
            VolumeForm::Lebesgue,
        )
        .unwrap();
        assert!((m - 0.375).abs() < 1e-9, "{m}");
        let rule = InteriorRule::new(&Domain::chart(2), VolumeForm::FubiniStudy, RuleSpec::for_degree(2, 2));
        assert!((integrate_interior(|_| 1.0, &rule).unwrap() - 0.5).abs() < 1e-13);
        let rule = InteriorRule::new(&ball, VolumeForm::FubiniStudy, RuleSpec::for_degree(2, 2));
        assert!((integrate_interior(|_| 1.0, &rule).unwrap() - 0.375).abs() < 1e-13);
        assert_eq!(integrate_interior(|_| 0.0, &rule).unwrap(), 0.0);
    }

    #[test]
    fn boundary_masses() {
        let ball = Domain::exterior_ball(2);
        let rule = BoundaryRule::new(&ball, 6, 8);
        let area = integrate_boundary(|_| 1.0, &ball, &rule, Against::Surface).unwrap();
        assert!((area - 2.0 * PI * PI).abs() < 1e-10);
        let log = integrate_boundary(|_| 1.0, &ball, &rule, Against::Mu(&Weight::LogModulus)).unwrap();
        assert!((log - 0.5).abs() < 1e-10, "{log}");
        let fs = integrate_boundary(|_| 1.0, &ball, &rule, Against::Mu(&Weight::FubiniStudy)).unwrap();
        assert!((fs - 0.125).abs() < 1e-10, "{fs}");
        let odd = integrate_boundary(|z| z[0].re, &ball, &rule, Against::Mu(&Weight::LogModulus)).unwrap();
        assert!(odd.abs() < 1e-12);
    }
}
