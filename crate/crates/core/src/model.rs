//! Constant-curvature model Bergman kernels: the Bargmann model at interior
//! points and the boundary model on `{ρ₀ = v + Σ μ_a |z_a|² }` with fiber
//! weight `φ₀ = Σ λ_ab z_a z̄_b`.

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::HermitianForm;
use crate::linalg::{det, generalized_eigenvalues, CMatrix};
use crate::quadrature::adaptive_c;
use crate::real::{cabs, cexp, exp, ln, powi, PI};
use crate::{Error, Result, C64};

/// Bargmann model with curvature eigenvalues `λ_i > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct InteriorModel {
    lambda: Vec<f64>,
}

impl InteriorModel {
    pub fn new(lambda: Vec<f64>) -> Result<Self> {
        if lambda.is_empty() || lambda.iter().any(|l| !(*l > 0.0)) {
            return Err(Error::Invalid("interior model needs positive eigenvalues".into()));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// `φ₀(z) = Σ λ_i |z_i|²`.
    pub fn phi0(&self, z: &[C64]) -> f64 {
        z.iter().zip(&self.lambda).map(|(c, l)| l * c.norm_sqr()).sum()
    }

    /// `Π λ_i / πⁿ`.
    pub fn bergman(&self) -> f64 {
        self.lambda.iter().map(|l| l / PI).product()
    }

    /// `(Π λ_i / πⁿ) exp(Σ λ_i z̄_i z'_i)`, holomorphic in `z'`.
    pub fn kernel(&self, z: &[C64], z_prime: &[C64]) -> C64 {
        let e: C64 = z.iter().zip(z_prime).zip(&self.lambda).map(|((a, b), l)| a.conj() * b * *l).sum();
        cexp(e) * self.bergman()
    }

    /// `‖z^m‖²` in one variable: `π m! / λ^{m+1}`.
    pub fn monomial_norm(lambda: f64, m: u32) -> f64 {
        PI * crate::real::factorial(m as usize) / powi(lambda, m as i32 + 1)
    }
}

/// Boundary model data with slope `T`, the minimal generalized eigenvalue of
/// `(λ, -diag μ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryModel {
    lambda: CMatrix,
    mu: Vec<f64>,
    roots: Vec<f64>,
    t: f64,
    /// Coefficients of `τ det(λ + τ diag μ)` in powers of `τ`.
    q: Vec<f64>,
}

impl BoundaryModel {
    pub fn new(lambda: CMatrix, mu: Vec<f64>) -> Result<Self> {
        let m = mu.len();
        if m == 0 || lambda.rows() != m || lambda.cols() != m {
            return Err(Error::Invalid("boundary model needs (n-1)×(n-1) λ and n-1 values of μ".into()));
        }
        if mu.iter().any(|x| !(*x < 0.0)) {
            return Err(Error::NotPseudoconcave { at: 0.0, max_eig: mu.iter().copied().fold(f64::NEG_INFINITY, f64::max) });
        }
        if lambda.hermitian_defect() > 1e-12 * (1.0 + lambda.max_abs()) {
            return Err(Error::Invalid("λ must be Hermitian".into()));
        }
        let neg_mu: Vec<f64> = mu.iter().map(|x| -x).collect();
        let roots = generalized_eigenvalues(&lambda, &CMatrix::from_real_diag(&neg_mu))?;
        let t = roots[0];
        if t < -1e-12 {
            return Err(Error::NegativeSlope { at: 0.0, slope: t });
        }
        let scale: f64 = neg_mu.iter().product();
        // det(λ + τ diag μ) = det(-diag μ) Π (T_i - τ)
        let mut p = vec![scale];
        for &r in &roots {
            let mut next = vec![0.0; p.len() + 1];
            for (j, c) in p.iter().enumerate() {
                next[j] += c * r;
                next[j + 1] -= c;
            }
            p = next;
        }
        let mut q = vec![0.0];
        q.extend(p);
        Ok(Self { lambda, mu, roots, t: t.max(0.0), q })
    }

    /// Diagonal model with `λ = diag(lambda)`.
    pub fn diagonal(lambda: &[f64], mu: &[f64]) -> Result<Self> {
        Self::new(CMatrix::from_real_diag(lambda), mu.to_vec())
    }

    pub fn n(&self) -> usize {
        self.mu.len() + 1
    }

    pub fn slope(&self) -> f64 {
        self.t
    }

    pub fn lambda(&self) -> &CMatrix {
        &self.lambda
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// Generalized eigenvalues `T_i` of `(λ, -diag μ)`, ascending.
    pub fn roots(&self) -> &[f64] {
        &self.roots
    }

    /// `det(λ + t diag μ)`.
    pub fn det_at(&self, t: f64) -> f64 {
        let m = self.mu.len();
        let a = CMatrix::from_fn(m, m, |i, j| self.lambda[(i, j)] + if i == j { C64::new(t * self.mu[i], 0.0) } else { C64::new(0.0, 0.0) });
        det(&a).re
    }

    fn prefactor(&self) -> f64 {
        1.0 / (4.0 * powi(PI, self.n() as i32))
    }

    /// `ρ₀ = v + Σ μ_a |z_a|²` at `y = (z, w)`.
    pub fn rho0(&self, y: &[C64]) -> f64 {
        let m = self.mu.len();
        y[m].im + (0..m).map(|a| self.mu[a] * y[a].norm_sqr()).sum::<f64>()
    }

    /// Polarizations holomorphic in the primed point.
    fn polarized(&self, y: &[C64], y_prime: &[C64]) -> (C64, C64) {
        let m = self.mu.len();
        let two_i = C64::new(0.0, 2.0);
        let mut rho = (y_prime[m] - y[m].conj()) / two_i;
        let mut phi = C64::new(0.0, 0.0);
        for a in 0..m {
            rho += y[a].conj() * y_prime[a] * self.mu[a];
            for b in 0..m {
                phi += self.lambda[(a, b)] * y_prime[a] * y[b].conj();
            }
        }
        (rho, phi)
    }

    /// `φ₀(z) = Σ λ_ab z_a z̄_b`.
    pub fn phi0(&self, y: &[C64]) -> f64 {
        self.polarized(y, y).1.re
    }

    /// Model Bergman function
    /// `B⁰ = (1/4πⁿ) ∫₀^T τ det(λ + τ diag μ) e^{τρ₀} dτ`.
    pub fn bergman(&self, y: &[C64]) -> f64 {
        self.bergman_at_rho(self.rho0(y))
    }

    pub fn bergman_at_rho(&self, rho: f64) -> f64 {
        if self.t <= 0.0 {
            return 0.0;
        }
        let (scale, v) = self.q_laplace(rho, &self.q);
        self.prefactor() * v * exp(scale)
    }

    /// `ln B⁰(ρ)` without overflow for large `ρ`.
    pub fn ln_bergman_at_rho(&self, rho: f64) -> f64 {
        if self.t <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let (scale, v) = self.q_laplace(rho, &self.q);
        ln(self.prefactor() * v) + scale
    }

    /// `∫₀^T p(τ) e^{τρ} dτ = e^{scale}·value` for a polynomial `p`, using
    /// decaying exponentials only.
    fn q_laplace(&self, rho: f64, p: &[f64]) -> (f64, f64) {
        let t = self.t;
        if rho <= 0.0 {
            let e = decaying_moments(-rho, t, p.len());
            (0.0, p.iter().zip(&e).map(|(c, m)| c * m).sum())
        } else {
            let shifted = taylor_shift_reflect(p, t);
            let e = decaying_moments(rho, t, p.len());
            (t * rho, shifted.iter().zip(&e).map(|(c, m)| c * m).sum())
        }
    }

    /// `t(ρ) = d/dρ ln B⁰`, the mean of `τ` under `τ det(λ+τμ) e^{τρ} dτ`.
    pub fn slope_profile(&self, rho: f64) -> f64 {
        self.slope_moments(rho).0
    }

    /// `(t(ρ), t'(ρ))` with `t'` the variance of `τ`.
    pub fn slope_moments(&self, rho: f64) -> (f64, f64) {
        if self.t <= 0.0 {
            return (0.0, 0.0);
        }
        let q1: Vec<f64> = core::iter::once(0.0).chain(self.q.iter().copied()).collect();
        let q2: Vec<f64> = core::iter::once(0.0).chain(q1.iter().copied()).collect();
        let (_, m0) = self.q_laplace(rho, &self.q);
        let (_, m1) = self.q_laplace(rho, &q1);
        let (_, m2) = self.q_laplace(rho, &q2);
        let mean = m1 / m0;
        let var = (m2 / m0 - mean * mean).max(0.0);
        (mean.clamp(0.0, self.t), var)
    }

    /// `K⁰(y; y')` by adaptive quadrature of the defining integral.
    pub fn kernel_integral(&self, y: &[C64], y_prime: &[C64]) -> Result<C64> {
        let (rho, phi) = self.polarized(y, y_prime);
        if self.t <= 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        let (v, _) = adaptive_c(|tau| cexp(rho * tau) * (tau * self.det_at(tau)), 0.0, self.t, 1e-13, 0.0)?;
        Ok(cexp(phi) * v * self.prefactor())
    }

    /// Closed form `(1/4πⁿ) det(-diag μ) e^{φ̃} P(∂_ρ) ∂_ρ[(e^{Tρ}-1)/ρ]` at
    /// `ρ = ρ̃`, with `P(x) = Π (T_i - x)`.
    pub fn kernel_closed(&self, y: &[C64], y_prime: &[C64]) -> C64 {
        let (rho, phi) = self.polarized(y, y_prime);
        if self.t <= 0.0 {
            return C64::new(0.0, 0.0);
        }
        let moments = complex_moments(rho, self.t, self.q.len());
        let v: C64 = self.q.iter().zip(&moments).map(|(c, m)| m * *c).sum();
        cexp(phi) * v * self.prefactor()
    }

    /// `dd^c ln K⁰(y,y) = λ + t diag μ + t' ∂ρ₀ ⊗ ∂̄ρ₀` at `t = t(ρ₀(y))`.
    pub fn metric_form(&self, y: &[C64]) -> HermitianForm {
        let m = self.mu.len();
        let n = m + 1;
        let (t, dt) = self.slope_moments(self.rho0(y));
        let mut grad: Vec<C64> = (0..m).map(|a| y[a].conj() * self.mu[a]).collect();
        grad.push(C64::new(0.0, -0.5));
        let h = CMatrix::from_fn(n, n, |i, j| {
            let mut v = grad[i] * grad[j].conj() * dt;
            if i < m && j < m {
                v += self.lambda[(i, j)];
                if i == j {
                    v += C64::new(t * self.mu[i], 0.0);
                }
            }
            v
        });
        HermitianForm::new(h)
    }

    /// `∫_{-∞}^{0} B⁰ dρ₀ = (1/4πⁿ) ∫₀^T det(λ + τ diag μ) dτ`, which pairs
    /// with the density of `μ` per unit `dσ/|∇ρ|`.
    pub fn fiber_integral(&self) -> f64 {
        if self.t <= 0.0 {
            return 0.0;
        }
        let p = &self.q[1..];
        let e = decaying_moments(0.0, self.t, p.len());
        self.prefactor() * p.iter().zip(&e).map(|(c, m)| c * m).sum::<f64>()
    }
}

/// Coefficients of `p(T - σ)` in powers of `σ`.
fn taylor_shift_reflect(p: &[f64], t: f64) -> Vec<f64> {
    let d = p.len();
    let mut out = vec![0.0; d];
    for (j, &c) in p.iter().enumerate() {
        // (T - σ)^j = Σ_i C(j,i) T^{j-i} (-σ)^i
        let mut binom = 1.0;
        for i in 0..=j {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            out[i] += c * binom * powi(t, (j - i) as i32) * sign;
            binom = binom * (j - i) as f64 / (i + 1) as f64;
        }
    }
    out
}

/// `E_j(a) = ∫₀^T x^j e^{-ax} dx` for `a ≥ 0`, `j < count`.
pub fn decaying_moments(a: f64, t: f64, count: usize) -> Vec<f64> {
    let mut out = vec![0.0; count];
    if a * t <= 2.0 {
        for (j, o) in out.iter_mut().enumerate() {
            let mut term = powi(t, j as i32 + 1);
            let mut acc = term / (j as f64 + 1.0);
            for m in 1..200 {
                term *= -a * t / m as f64;
                let add = term / (m + j + 1) as f64;
                acc += add;
                if add.abs() < 1e-18 * acc.abs() {
                    break;
                }
            }
            *o = acc;
        }
    } else {
        let e = exp(-a * t);
        let mut prev = -crate::real::expm1(-a * t) / a;
        out[0] = prev;
        for j in 1..count {
            prev = (j as f64 * prev - powi(t, j as i32) * e) / a;
            out[j] = prev;
        }
    }
    out
}

/// `I_j(ρ) = ∫₀^T t^j e^{tρ} dt` for complex `ρ`, `j < count`.
pub fn complex_moments(rho: C64, t: f64, count: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); count];
    let z = rho * t;
    if cabs(z) <= 2.0 {
        for (j, o) in out.iter_mut().enumerate() {
            let mut term = C64::new(powi(t, j as i32 + 1), 0.0);
            let mut acc = term / (j as f64 + 1.0);
            for m in 1..200 {
                term *= z / m as f64;
                let add = term / (m + j + 1) as f64;
                acc += add;
                if cabs(add) < 1e-18 * cabs(acc) {
                    break;
                }
            }
            *o = acc;
        }
    } else {
        let e = cexp(z);
        let mut prev = (e - 1.0) / rho;
        out[0] = prev;
        for j in 1..count {
            prev = (e * powi(t, j as i32) - prev * j as f64) / rho;
            out[j] = prev;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::adaptive;
    use rand::{Rng, SeedableRng};

    fn fs_ball() -> BoundaryModel {
        BoundaryModel::diagonal(&[0.5], &[-1.0]).unwrap()
    }

    #[test]
    fn interior_examples() {
        let m = InteriorModel::new(vec![1.0]).unwrap();
        let z0 = [C64::new(0.0, 0.0)];
        assert!((m.kernel(&z0, &z0).re - 1.0 / PI).abs() < 1e-15);
        let m2 = InteriorModel::new(vec![1.0, 1.0]).unwrap();
        assert!((m2.bergman() - 1.0 / (PI * PI)).abs() < 1e-15);
        let m3 = InteriorModel::new(vec![3.0, 3.0]).unwrap();
        assert!((m3.bergman() / m2.bergman() - 9.0).abs() < 1e-12);
        let z = [C64::new(0.3, -0.8), C64::new(1.1, 0.2)];
        let k = m3.kernel(&z, &z);
        assert!(k.im.abs() < 1e-12 && k.re > 0.0);
        assert!((k.re * exp(-m3.phi0(&z)) - m3.bergman()).abs() < 1e-12);
    }

    #[test]
    fn bargmann_reproduces_against_monomial_oracle() {
        let lam = 1.7;
        let m = InteriorModel::new(vec![lam]).unwrap();
        let z = [C64::new(0.4, -0.3)];
        let zp = [C64::new(-0.2, 0.5)];
        let mut t = C64::new(1.0, 0.0);
        let mut oracle = C64::new(0.0, 0.0);
        let x = z[0].conj() * zp[0];
        for j in 0..60 {
            oracle += t / InteriorModel::monomial_norm(lam, j);
            t *= x;
        }
        assert!(cabs(oracle - m.kernel(&z, &zp)) < 1e-8 * cabs(oracle));
    }

    #[test]
    fn closed_form_matches_integral_on_aligned_model() {
        let m = fs_ball();
        // ∫₀^T e^{tρ} t(-μ)(T-t) dt with μ = -1, T = 1/2.
        for &rho in &[-3.0, -0.1, 0.0, 0.7, 5.0] {
            let (ex, _) = adaptive(|t| exp(t * rho) * t * (0.5 - t), 0.0, 0.5, 1e-14, 0.0).unwrap();
            let y = [C64::new(0.0, 0.0), C64::new(0.0, rho)];
            let v = m.kernel_closed(&y, &y).re * 4.0 * PI * PI;
            assert!((v - ex).abs() < 1e-13 * ex.abs().max(1e-3));
            assert!((m.bergman_at_rho(rho) * 4.0 * PI * PI - ex).abs() < 1e-13 * ex.abs().max(1e-3));
        }
    }

    #[test]
    fn kernel_is_hermitian_and_positive() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(9);
        let m = BoundaryModel::diagonal(&[0.7, 1.3], &[-1.0, -2.5]).unwrap();
        let pts: Vec<Vec<C64>> = (0..5).map(|_| (0..3).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect()).collect();
        let k = CMatrix::from_fn(5, 5, |i, j| m.kernel_closed(&pts[j], &pts[i]));
        assert!(k.hermitian_defect() < 1e-12 * k.max_abs());
        assert!(crate::linalg::hermitian_eigen(&k).values[0] > -1e-12 * k.max_abs());
    }

    #[test]
    fn slope_profile_limits() {
        let m = fs_ball();
        assert!(m.slope_profile(-1e3) < 0.01);
        assert!(m.slope_profile(1e3) > m.slope() - 0.01);
        let h = 1e-4;
        for &r in &[-4.0, 0.0, 3.0] {
            let fd = (m.ln_bergman_at_rho(r + h) - m.ln_bergman_at_rho(r - h)) / (2.0 * h);
            assert!((fd - m.slope_profile(r)).abs() < 1e-7);
            let fd2 = (m.ln_bergman_at_rho(r + h) - 2.0 * m.ln_bergman_at_rho(r) + m.ln_bergman_at_rho(r - h)) / (h * h);
            assert!((fd2 - m.slope_moments(r).1).abs() < 1e-6);
        }
    }

    #[test]
    fn fiber_integral_matches_quadrature() {
        let m = BoundaryModel::diagonal(&[0.7, 1.3], &[-1.0, -2.5]).unwrap();
        let (v, _) = adaptive(|x| m.bergman_at_rho(1.0 - 1.0 / x) / (x * x), 1e-12, 1.0, 1e-13, 0.0).unwrap();
        assert!((v - m.fiber_integral()).abs() < 1e-10 * v, "{v} {}", m.fiber_integral());
    }
}
