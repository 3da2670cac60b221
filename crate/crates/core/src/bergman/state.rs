use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::basis::MonomialBasis;
use crate::geometry::{integrate_interior, Domain, HermitianForm, InteriorRule, RuleSpec, VolumeForm, Weight};
use crate::linalg::{cholesky_pivoted, hermitian_eigen, CMatrix, PivotedCholesky};
use crate::quadrature::adaptive;
use crate::real::{atan2, cis, exp, ln, ln_1p, ln_factorial, logistic, logit, norm_sqr, sqrt};
use crate::{Error, Result, C64};

/// Relative pivot floor for the Gram factorization.
pub const PIVOT_FLOOR: f64 = 1e-14;

const RADIAL_ID: &str = "radial-gk15";

fn planned_kind(weight: &Weight, domain: &Domain) -> StateKind {
    if weight.is_radial() && domain.is_radial() && weight.profile(0.0).is_some() {
        StateKind::Radial
    } else if weight.is_torus_invariant() && domain.is_torus_invariant() {
        StateKind::Diagonal
    } else {
        StateKind::Cholesky
    }
}

fn diagonal_spec(n: usize, k: usize, spec: RuleSpec) -> RuleSpec {
    RuleSpec { simplex_points: spec.simplex_points.max(k + 2 * n + 8), angles: 1, ..spec }
}

fn diagonal_id(spec: &RuleSpec) -> String {
    format!("fs-torus:{}:{}:{}", spec.simplex_points, spec.radial_points, spec.radial_panels)
}

fn dense_id(spec: &RuleSpec) -> String {
    format!("fs-product:{}:{}:{}:{}", spec.simplex_points, spec.angles, spec.radial_points, spec.radial_panels)
}

/// A complex number stored as `e^{ln_scale}·value`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub ln_scale: f64,
    pub value: C64,
}

impl Scaled {
    pub fn get(&self) -> C64 {
        self.value * exp(self.ln_scale)
    }

    /// `ln |·|`.
    pub fn ln_abs(&self) -> f64 {
        self.ln_scale + ln(self.value.norm())
    }
}

/// Bergman space of polynomials of degree `≤ k` with norm
/// `‖p‖² = ∫_X |p|² e^{-kφ} ω_n`.
#[derive(Debug, Clone)]
pub struct KernelState {
    weight: Weight,
    domain: Domain,
    basis: MonomialBasis,
    repr: Repr,
    quadrature_id: String,
}

#[derive(Debug, Clone)]
enum Repr {
    Radial(RadialRepr),
    Diagonal(DiagonalRepr),
    Dense(DenseRepr),
}

/// Unitary-invariant data: `K(x,y) = Σ_m a_m ⟨x,y⟩^m`.
#[derive(Debug, Clone)]
struct RadialRepr {
    /// `ln ∫ x^{m+n-1}(1-x)^{k-m} e^{-k b} dx` on the `x = logistic(s)` line.
    ln_radial: Vec<f64>,
    ln_a: Vec<f64>,
}

/// Torus-invariant data: the Gram matrix is diagonal.
#[derive(Debug, Clone)]
struct DiagonalRepr {
    norms: Vec<f64>,
}

#[derive(Debug, Clone)]
struct DenseRepr {
    /// Monomial norms used to prescale the Gram matrix to unit diagonal.
    scale: Vec<f64>,
    /// Prescaled Gram matrix.
    gram: CMatrix,
    factor: Factor,
    condition: f64,
}

#[derive(Debug, Clone)]
enum Factor {
    Cholesky(PivotedCholesky),
    /// `ψ = transform · f` after flooring small eigenvalues.
    EigenFloor(CMatrix),
}

/// Which orthonormalization produced a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    Radial,
    Diagonal,
    Cholesky,
    EigenFloor,
}

/// Flat representation of a state for caching.
#[derive(Debug, Clone, PartialEq)]
pub struct StateParts {
    pub n: usize,
    pub k: usize,
    pub weight_id: String,
    pub domain_id: String,
    pub quadrature_id: String,
    pub kind: StateKind,
    pub reals: Vec<f64>,
    pub complexes: Vec<C64>,
    pub indices: Vec<u64>,
}

impl KernelState {
    /// Radial fast path when both weight and domain are unitary invariant,
    /// the diagonal path under torus symmetry, otherwise the dense path on a
    /// rule resolving degree `k`.
    pub fn build(weight: &Weight, domain: &Domain, k: usize) -> Result<Self> {
        let spec = RuleSpec::for_degree(domain.n(), k);
        match planned_kind(weight, domain) {
            StateKind::Radial => Self::radial(weight, domain, k),
            StateKind::Diagonal => Self::diagonal(weight, domain, k, spec),
            _ => Self::dense(weight, domain, k, spec),
        }
    }

    /// Quadrature id [`Self::build`] records, known without building.
    pub fn planned_quadrature_id(weight: &Weight, domain: &Domain, k: usize) -> String {
        let spec = RuleSpec::for_degree(domain.n(), k);
        match planned_kind(weight, domain) {
            StateKind::Radial => RADIAL_ID.into(),
            StateKind::Diagonal => diagonal_id(&diagonal_spec(domain.n(), k, spec)),
            _ => dense_id(&spec),
        }
    }

    /// Diagonal Gram matrix for torus-invariant data, integrated on the
    /// simplex × ray rule with the angles averaged out exactly.
    pub fn diagonal(weight: &Weight, domain: &Domain, k: usize, spec: RuleSpec) -> Result<Self> {
        if !(weight.is_torus_invariant() && domain.is_torus_invariant()) {
            return Err(Error::Invalid("diagonal path needs torus-invariant weight and domain".into()));
        }
        let n = domain.n();
        let basis = MonomialBasis::new(n, k)?;
        let spec = diagonal_spec(n, k, spec);
        let rule = InteriorRule::new(domain, VolumeForm::FubiniStudy, spec);
        check_resolution(weight, domain, k, &rule)?;
        let mut norms = vec![0.0; basis.len()];
        for (z, &w) in rule.nodes.iter().zip(&rule.weights) {
            let c = w * exp(-(k as f64) * weight.phi(z)?);
            for (acc, m) in norms.iter_mut().zip(basis.eval(z)) {
                *acc += c * m.norm_sqr();
            }
        }
        if let Some(i) = norms.iter().position(|v| !(*v > 0.0)) {
            return Err(Error::IllConditioned { min_eig: norms[i] });
        }
        Ok(Self {
            weight: weight.clone(),
            domain: domain.clone(),
            basis,
            repr: Repr::Diagonal(DiagonalRepr { norms }),
            quadrature_id: diagonal_id(&spec),
        })
    }

    pub fn radial(weight: &Weight, domain: &Domain, k: usize) -> Result<Self> {
        if !(weight.is_radial() && domain.is_radial()) {
            return Err(Error::Invalid("radial path needs unitary-invariant weight and domain".into()));
        }
        let n = domain.n();
        let basis = MonomialBasis::new(n, k)?;
        let mut e1 = vec![C64::new(0.0, 0.0); n];
        e1[0] = C64::new(1.0, 0.0);
        let x_b = logistic(domain.boundary_s(&e1));
        let mut ln_radial = Vec::with_capacity(k + 1);
        let mut ln_a = Vec::with_capacity(k + 1);
        for m in 0..=k {
            let l = ln_radial_moment(weight, n, k, m, x_b)?;
            ln_radial.push(l);
            ln_a.push(ln_factorial(n - 1 + m) - ln_factorial(m) - l);
        }
        Ok(Self {
            weight: weight.clone(),
            domain: domain.clone(),
            basis,
            repr: Repr::Radial(RadialRepr { ln_radial, ln_a }),
            quadrature_id: RADIAL_ID.into(),
        })
    }

    pub fn dense(weight: &Weight, domain: &Domain, k: usize, spec: RuleSpec) -> Result<Self> {
        let n = domain.n();
        let basis = MonomialBasis::new(n, k)?;
        let rule = InteriorRule::new(domain, VolumeForm::FubiniStudy, spec);
        check_resolution(weight, domain, k, &rule)?;
        let dim = basis.len();
        let mut gram = CMatrix::zeros(dim, dim);
        let mut v = vec![C64::new(0.0, 0.0); dim];
        for (z, &w) in rule.nodes.iter().zip(&rule.weights) {
            let c = sqrt(w * exp(-(k as f64) * weight.phi(z)?));
            for (vi, m) in v.iter_mut().zip(basis.eval(z)) {
                *vi = m * c;
            }
            for i in 0..dim {
                let vi = v[i];
                for j in i..dim {
                    gram[(i, j)] += vi * v[j].conj();
                }
            }
        }
        for i in 0..dim {
            for j in 0..i {
                gram[(i, j)] = gram[(j, i)].conj();
            }
        }
        let scale: Vec<f64> = (0..dim).map(|i| sqrt(gram[(i, i)].re)).collect();
        let gram = CMatrix::from_fn(dim, dim, |i, j| gram[(i, j)] / (scale[i] * scale[j]));
        let (factor, condition) = match cholesky_pivoted(&gram, PIVOT_FLOOR) {
            Ok(ch) => {
                let c = ch.condition_estimate();
                (Factor::Cholesky(ch), c)
            }
            Err(_) => {
                let e = hermitian_eigen(&gram);
                let top = e.values.last().copied().unwrap_or(1.0);
                let floor = PIVOT_FLOOR * top;
                if top <= 0.0 {
                    return Err(Error::IllConditioned { min_eig: e.values[0] });
                }
                log::warn!("Gram matrix (k = {k}, dim = {dim}) has min eigenvalue {:e}; flooring at {floor:e}", e.values[0]);
                let t = CMatrix::from_fn(dim, dim, |i, j| e.vectors[(j, i)].conj() / sqrt(e.values[i].max(floor)));
                (Factor::EigenFloor(t), top / e.values[0].max(floor))
            }
        };
        Ok(Self {
            weight: weight.clone(),
            domain: domain.clone(),
            basis,
            repr: Repr::Dense(DenseRepr { scale, gram, factor, condition }),
            quadrature_id: dense_id(&spec),
        })
    }

    pub fn n(&self) -> usize {
        self.basis.n()
    }

    pub fn k(&self) -> usize {
        self.basis.k()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }

    pub fn quadrature_id(&self) -> &str {
        &self.quadrature_id
    }

    pub fn kind(&self) -> StateKind {
        match &self.repr {
            Repr::Radial(_) => StateKind::Radial,
            Repr::Diagonal(_) => StateKind::Diagonal,
            Repr::Dense(d) => match d.factor {
                Factor::Cholesky(_) => StateKind::Cholesky,
                Factor::EigenFloor(_) => StateKind::EigenFloor,
            },
        }
    }

    /// Pivot-ratio condition estimate of the prescaled Gram matrix; `1` on
    /// the radial and diagonal paths.
    pub fn condition(&self) -> f64 {
        match &self.repr {
            Repr::Radial(_) | Repr::Diagonal(_) => 1.0,
            Repr::Dense(d) => d.condition,
        }
    }

    /// Gram entry `⟨ζ^α, ζ^β⟩`.
    pub fn gram_entry(&self, i: usize, j: usize) -> C64 {
        match &self.repr {
            Repr::Radial(r) => {
                if i != j {
                    return C64::new(0.0, 0.0);
                }
                C64::new(exp(self.ln_monomial_norm(&self.basis.indices()[i], r)), 0.0)
            }
            Repr::Diagonal(d) => C64::new(if i == j { d.norms[i] } else { 0.0 }, 0.0),
            Repr::Dense(d) => d.gram[(i, j)] * (d.scale[i] * d.scale[j]),
        }
    }

    fn ln_monomial_norm(&self, alpha: &[u32], r: &RadialRepr) -> f64 {
        let m: u32 = alpha.iter().sum();
        let n = self.n();
        alpha.iter().map(|&a| ln_factorial(a as usize)).sum::<f64>() - ln_factorial(n - 1 + m as usize) + r.ln_radial[m as usize]
    }

    /// Orthonormal basis values `ψ_i(x)` in the affine trivialization.
    pub fn orthonormal_values(&self, x: &[C64]) -> Vec<C64> {
        match &self.repr {
            Repr::Radial(r) => {
                self.basis.indices().iter().zip(self.basis.eval(x)).map(|(a, m)| m * exp(-0.5 * self.ln_monomial_norm(a, r))).collect()
            }
            Repr::Diagonal(d) => self.basis.eval(x).iter().zip(&d.norms).map(|(m, s)| m / sqrt(*s)).collect(),
            Repr::Dense(d) => d.apply(&self.basis.eval(x)),
        }
    }

    fn orthonormal_derivatives(&self, x: &[C64], j: usize) -> Vec<C64> {
        match &self.repr {
            Repr::Radial(r) => {
                self.basis.indices().iter().zip(self.basis.eval_derivative(x, j)).map(|(a, m)| m * exp(-0.5 * self.ln_monomial_norm(a, r))).collect()
            }
            Repr::Diagonal(d) => self.basis.eval_derivative(x, j).iter().zip(&d.norms).map(|(m, s)| m / sqrt(*s)).collect(),
            Repr::Dense(d) => d.apply(&self.basis.eval_derivative(x, j)),
        }
    }

    /// `K^k(x, y) = Σ ψ_i(x) conj(ψ_i(y))` in log-scaled form.
    pub fn kernel_scaled(&self, x: &[C64], y: &[C64]) -> Scaled {
        match &self.repr {
            Repr::Radial(r) => {
                let t: C64 = x.iter().zip(y).map(|(a, b)| a * b.conj()).sum();
                radial_series(&r.ln_a, t)
            }
            Repr::Diagonal(_) | Repr::Dense(_) => {
                let px = self.orthonormal_values(x);
                let py = self.orthonormal_values(y);
                Scaled { ln_scale: 0.0, value: px.iter().zip(&py).map(|(a, b)| a * b.conj()).sum() }
            }
        }
    }

    pub fn kernel_eval(&self, x: &[C64], y: &[C64]) -> C64 {
        self.kernel_scaled(x, y).get()
    }

    /// `B^k(x) = K^k(x,x) e^{-kφ(x)}`.
    pub fn bergman_function(&self, x: &[C64]) -> Result<f64> {
        let s = self.kernel_scaled(x, x);
        let phi = self.weight.phi(x)?;
        Ok(exp(s.ln_scale - self.k() as f64 * phi) * s.value.re.max(0.0))
    }

    /// `k⁻¹ ln K^k(x,x)`; `-∞` where the kernel vanishes.
    pub fn log_kernel_metric(&self, x: &[C64]) -> f64 {
        let s = self.kernel_scaled(x, x);
        if !(s.value.re > 0.0) {
            return f64::NEG_INFINITY;
        }
        (s.ln_scale + ln(s.value.re)) / self.k() as f64
    }

    /// Complex Hessian of `ln K^k(x,x)` from analytic derivatives.
    pub fn bergman_metric_form(&self, x: &[C64]) -> Result<HermitianForm> {
        let n = self.n();
        if let Repr::Radial(r) = &self.repr {
            let (g1, g2) = radial_log_derivatives(&r.ln_a, norm_sqr(x));
            if !(g1.is_finite() && g2.is_finite()) {
                return Err(Error::SingularPoint { at: sqrt(norm_sqr(x)) });
            }
            return Ok(HermitianForm::new(CMatrix::from_fn(n, n, |a, b| {
                let d = if a == b { g1 } else { 0.0 };
                C64::new(d, 0.0) + x[a].conj() * x[b] * g2
            })));
        }
        let psi = self.orthonormal_values(x);
        let k: f64 = psi.iter().map(|p| p.norm_sqr()).sum();
        if !(k > 0.0) {
            return Err(Error::SingularPoint { at: sqrt(norm_sqr(x)) });
        }
        let d: Vec<Vec<C64>> = (0..n).map(|j| self.orthonormal_derivatives(x, j)).collect();
        let v: Vec<C64> = d.iter().map(|dj| dj.iter().zip(&psi).map(|(a, b)| a * b.conj()).sum()).collect();
        Ok(HermitianForm::new(CMatrix::from_fn(n, n, |a, b| {
            let s: C64 = d[a].iter().zip(&d[b]).map(|(p, q)| p * q.conj()).sum();
            (s * k - v[a] * v[b].conj()) / (k * k)
        })))
    }

    /// Density of `(Ω_k/k)ⁿ/n!` against Lebesgue measure.
    pub fn bergman_volume_density(&self, x: &[C64]) -> Result<f64> {
        let k = self.k() as f64;
        let h = self.bergman_metric_form(x)?;
        Ok(HermitianForm::new(h.matrix.scale(C64::new(1.0 / k, 0.0))).density().max(0.0))
    }

    pub fn to_parts(&self) -> StateParts {
        let mut parts = StateParts {
            n: self.n(),
            k: self.k(),
            weight_id: self.weight.id(),
            domain_id: self.domain.id(),
            quadrature_id: self.quadrature_id.clone(),
            kind: self.kind(),
            reals: Vec::new(),
            complexes: Vec::new(),
            indices: Vec::new(),
        };
        match &self.repr {
            Repr::Radial(r) => {
                parts.reals.extend(&r.ln_radial);
                parts.reals.extend(&r.ln_a);
            }
            Repr::Diagonal(d) => parts.reals.extend(&d.norms),
            Repr::Dense(d) => {
                parts.reals.extend(&d.scale);
                parts.reals.push(d.condition);
                parts.complexes.extend(d.gram.as_slice());
                match &d.factor {
                    Factor::Cholesky(ch) => {
                        parts.reals.extend(&ch.pivots);
                        parts.complexes.extend(ch.l.as_slice());
                        parts.indices.extend(ch.perm.iter().map(|&p| p as u64));
                    }
                    Factor::EigenFloor(t) => parts.complexes.extend(t.as_slice()),
                }
            }
        }
        parts
    }

    pub fn from_parts(parts: StateParts, weight: &Weight, domain: &Domain) -> Result<Self> {
        if parts.weight_id != weight.id() || parts.domain_id != domain.id() || parts.n != domain.n() {
            return Err(Error::Invalid("cached state does not match weight and domain".into()));
        }
        let basis = MonomialBasis::new(parts.n, parts.k)?;
        let dim = basis.len();
        let bad = || Error::Invalid("cached state has inconsistent sizes".into());
        let repr = match parts.kind {
            StateKind::Radial => {
                let m = parts.k + 1;
                if parts.reals.len() != 2 * m {
                    return Err(bad());
                }
                Repr::Radial(RadialRepr { ln_radial: parts.reals[..m].to_vec(), ln_a: parts.reals[m..].to_vec() })
            }
            StateKind::Diagonal => {
                if parts.reals.len() != dim {
                    return Err(bad());
                }
                Repr::Diagonal(DiagonalRepr { norms: parts.reals.clone() })
            }
            StateKind::Cholesky | StateKind::EigenFloor => {
                if parts.reals.len() < dim + 1 || parts.complexes.len() < dim * dim * 2 {
                    return Err(bad());
                }
                let scale = parts.reals[..dim].to_vec();
                let condition = parts.reals[dim];
                let gram = CMatrix::from_vec(dim, dim, parts.complexes[..dim * dim].to_vec());
                let second = CMatrix::from_vec(dim, dim, parts.complexes[dim * dim..2 * dim * dim].to_vec());
                let factor = if parts.kind == StateKind::Cholesky {
                    if parts.indices.len() != dim || parts.reals.len() != 2 * dim + 1 {
                        return Err(bad());
                    }
                    Factor::Cholesky(PivotedCholesky {
                        l: second,
                        perm: parts.indices.iter().map(|&p| p as usize).collect(),
                        pivots: parts.reals[dim + 1..].to_vec(),
                    })
                } else {
                    Factor::EigenFloor(second)
                };
                Repr::Dense(DenseRepr { scale, gram, factor, condition })
            }
        };
        Ok(Self { weight: weight.clone(), domain: domain.clone(), basis, repr, quadrature_id: parts.quadrature_id })
    }
}

impl DenseRepr {
    fn apply(&self, monomials: &[C64]) -> Vec<C64> {
        let f: Vec<C64> = monomials.iter().zip(&self.scale).map(|(m, s)| m / s).collect();
        match &self.factor {
            Factor::Cholesky(ch) => ch.forward(&f),
            Factor::EigenFloor(t) => t.mul_vec(&f),
        }
    }
}

/// `Σ_m e^{ln_a[m]} t^m`, log-scaled.
fn radial_series(ln_a: &[f64], t: C64) -> Scaled {
    let r = t.norm();
    if r == 0.0 {
        return Scaled { ln_scale: ln_a[0], value: C64::new(1.0, 0.0) };
    }
    let lr = ln(r);
    let theta = atan2(t.im, t.re);
    let top = ln_a.iter().enumerate().map(|(m, l)| l + m as f64 * lr).fold(f64::NEG_INFINITY, f64::max);
    let mut acc = C64::new(0.0, 0.0);
    for (m, l) in ln_a.iter().enumerate() {
        acc += cis(m as f64 * theta) * exp(l + m as f64 * lr - top);
    }
    Scaled { ln_scale: top, value: acc }
}

/// `(G', G'')` for `G(q) = ln Σ a_m q^m`.
fn radial_log_derivatives(ln_a: &[f64], q: f64) -> (f64, f64) {
    let a = |m: usize| if m < ln_a.len() { exp(ln_a[m] - ln_a[0]) } else { 0.0 };
    if q < 1e-12 {
        let (a1, a2) = (a(1), a(2));
        let g1 = (a1 + 4.0 * a2 * q) / (1.0 + a1 * q);
        return (g1, 2.0 * a2 - a1 * a1);
    }
    let lq = ln(q);
    let top = ln_a.iter().enumerate().map(|(m, l)| l + m as f64 * lq).fold(f64::NEG_INFINITY, f64::max);
    let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
    for (m, l) in ln_a.iter().enumerate() {
        let w = exp(l + m as f64 * lq - top);
        let mf = m as f64;
        s0 += w;
        s1 += mf * w;
        s2 += mf * mf * w;
    }
    let mean = s1 / s0;
    let var = s2 / s0 - mean * mean;
    (mean / q, (var - mean) / (q * q))
}

/// `ln ∫_{x_b}^1 x^{m+n-1} (1-x)^{k-m} e^{-k b(x)} dx` with
/// `b = u(s) - ln(1+e^s)` and `s = logit x`.
fn ln_radial_moment(weight: &Weight, n: usize, k: usize, m: usize, x_b: f64) -> Result<f64> {
    let fs = matches!(weight, Weight::FubiniStudy);
    let kf = k as f64;
    let f = |x: f64| -> f64 {
        let mut v = (m + n - 1) as f64 * ln(x) + (k - m) as f64 * ln_1p(-x);
        if !fs {
            let s = logit(x);
            let u = weight.profile(s).expect("radial profile").u;
            v -= kf * (u + ln_1p(-x));
        }
        v
    };
    // Locate the peak on a coarse grid to fix the scale and split point.
    let samples = 512;
    let mut best = (f64::NEG_INFINITY, 0.5 * (x_b + 1.0));
    for i in 0..samples {
        let x = x_b + (1.0 - x_b) * (i as f64 + 0.5) / samples as f64;
        let v = f(x);
        if v > best.0 {
            best = (v, x);
        }
    }
    let (offset, peak) = best;
    if !offset.is_finite() {
        return Err(Error::NonFinite { what: "radial norm integrand", at: sqrt(exp(logit(peak))) });
    }
    let g = |x: f64| exp(f(x) - offset);
    let mut total = 0.0;
    for (lo, hi) in [(x_b, peak), (peak, 1.0)] {
        if hi > lo {
            total += adaptive(g, lo, hi, 1e-13, 0.0)?.0;
        }
    }
    if !(total > 0.0) {
        return Err(Error::Resolution(format!("radial norm of degree {m} vanished")));
    }
    Ok(offset + ln(total))
}

/// Compares a few degree-`2k` test integrals against a refined rule.
fn check_resolution(weight: &Weight, domain: &Domain, k: usize, rule: &InteriorRule) -> Result<()> {
    let fine = InteriorRule::new(domain, VolumeForm::FubiniStudy, rule.spec.refined());
    let n = domain.n() as i32;
    let kf = k as f64;
    for probe in 0..3 {
        let f = |z: &[C64]| -> f64 {
            let w = exp(-kf * weight.phi(z).unwrap_or(f64::INFINITY));
            let m = match probe {
                0 => 1.0,
                1 => crate::real::powi(z[0].norm_sqr(), k as i32),
                _ => crate::real::powi(z[(n - 1) as usize].norm_sqr(), (k / 2) as i32) * crate::real::powi(z[0].norm_sqr(), (k - k / 2) as i32),
            };
            m * w
        };
        let a = integrate_interior(f, rule)?;
        let b = integrate_interior(f, &fine)?;
        if !((a - b).abs() <= 1e-9 * b.abs()) {
            return Err(Error::Resolution(format!("probe {probe} at k = {k}: {a:e} vs refined {b:e}")));
        }
    }
    Ok(())
}
