use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::CMatrix;
use crate::real::{ln, sqrt};
use crate::{Error, Result, C64};

/// How `ρ` is built from `q_a(ζ) = Σ a_i |ζ_i|²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DefiningFunction {
    /// `ρ = -c ln q_a`.
    Log,
    /// `ρ = c (1 - q_a)`.
    Quadratic,
}

/// `X = {ρ ≤ 0}`: the exterior `{q_a ≥ 1}` of an ellipsoid, or the whole chart.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    n: usize,
    a: Option<Vec<f64>>,
    defining: DefiningFunction,
    scale: f64,
}

impl Domain {
    /// Exterior of the unit ball in `ℂⁿ` with `ρ = -ln |ζ|²`.
    pub fn exterior_ball(n: usize) -> Self {
        Self { n, a: Some(vec![1.0; n]), defining: DefiningFunction::Log, scale: 1.0 }
    }

    /// Exterior of `{Σ a_i |ζ_i|² < 1}`.
    pub fn exterior_ellipsoid(a: Vec<f64>) -> Result<Self> {
        if a.is_empty() || a.iter().any(|x| !(*x > 0.0)) {
            return Err(Error::Invalid("ellipsoid coefficients must be positive".into()));
        }
        Ok(Self { n: a.len(), a: Some(a), defining: DefiningFunction::Log, scale: 1.0 })
    }

    /// The whole affine chart: no boundary.
    pub fn chart(n: usize) -> Self {
        Self { n, a: None, defining: DefiningFunction::Log, scale: 1.0 }
    }

    pub fn with_defining(mut self, defining: DefiningFunction) -> Self {
        self.defining = defining;
        self
    }

    /// Replaces `ρ` by `c ρ`.
    pub fn scaled(mut self, c: f64) -> Self {
        self.scale *= c;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn defining(&self) -> DefiningFunction {
        self.defining
    }

    pub fn coefficients(&self) -> Option<&[f64]> {
        self.a.as_deref()
    }

    pub fn has_boundary(&self) -> bool {
        self.a.is_some()
    }

    /// Invariant under the full unitary group.
    pub fn is_radial(&self) -> bool {
        match &self.a {
            None => true,
            Some(a) => a.windows(2).all(|w| w[0] == w[1]),
        }
    }

    /// Invariant under `ζ_i ↦ e^{iθ_i} ζ_i`. True for every ellipsoid.
    pub fn is_torus_invariant(&self) -> bool {
        true
    }

    pub fn id(&self) -> String {
        match &self.a {
            None => format!("chart{}", self.n),
            Some(a) => {
                let mut s = format!("ext{}:{:?}:{:e}", self.n, self.defining, self.scale);
                for x in a {
                    s.push_str(&format!(":{x:e}"));
                }
                s
            }
        }
    }

    pub fn q(&self, z: &[C64]) -> f64 {
        match &self.a {
            None => 0.0,
            Some(a) => z.iter().zip(a).map(|(c, a)| a * c.norm_sqr()).sum(),
        }
    }

    pub fn rho(&self, z: &[C64]) -> f64 {
        let c = self.scale;
        match (&self.a, self.defining) {
            (None, _) => -1.0,
            (Some(_), DefiningFunction::Log) => -c * ln(self.q(z)),
            (Some(_), DefiningFunction::Quadratic) => c * (1.0 - self.q(z)),
        }
    }

    pub fn contains(&self, z: &[C64]) -> bool {
        self.rho(z) <= 0.0
    }

    /// `∂ρ/∂ζ_i`.
    pub fn grad_rho(&self, z: &[C64]) -> Vec<C64> {
        let Some(a) = &self.a else {
            return vec![C64::new(0.0, 0.0); self.n];
        };
        let f = match self.defining {
            DefiningFunction::Log => -self.scale / self.q(z),
            DefiningFunction::Quadratic => -self.scale,
        };
        z.iter().zip(a).map(|(c, a)| c.conj() * (a * f)).collect()
    }

    /// `∂²ρ/∂ζ_i∂ζ̄_j`.
    pub fn hess_rho(&self, z: &[C64]) -> CMatrix {
        let n = self.n;
        let Some(a) = &self.a else {
            return CMatrix::zeros(n, n);
        };
        let c = self.scale;
        match self.defining {
            DefiningFunction::Log => {
                let q = self.q(z);
                CMatrix::from_fn(n, n, |i, j| {
                    let d = if i == j { C64::new(a[i] / q, 0.0) } else { C64::new(0.0, 0.0) };
                    (d - z[i].conj() * z[j] * (a[i] * a[j] / (q * q))) * (-c)
                })
            }
            DefiningFunction::Quadratic => CMatrix::from_real_diag(&a.iter().map(|x| -c * x).collect::<Vec<_>>()),
        }
    }

    /// `∂²ρ/∂ζ_i∂ζ_j`.
    pub fn hess_holo_rho(&self, z: &[C64]) -> CMatrix {
        let n = self.n;
        match (&self.a, self.defining) {
            (Some(a), DefiningFunction::Log) => {
                let q = self.q(z);
                CMatrix::from_fn(n, n, |i, j| z[i].conj() * z[j].conj() * (self.scale * a[i] * a[j] / (q * q)))
            }
            _ => CMatrix::zeros(n, n),
        }
    }

    /// Radial projection of a unit direction onto `∂X`.
    pub fn boundary_point(&self, xi: &[C64]) -> Option<Vec<C64>> {
        self.a.as_ref()?;
        let q = self.q(xi);
        let r = 1.0 / sqrt(q);
        Some(xi.iter().map(|c| c * r).collect())
    }

    /// `s_b = ln r_b²` where the ray through `ξ` meets `∂X`; `-∞` for the chart.
    pub fn boundary_s(&self, xi: &[C64]) -> f64 {
        match &self.a {
            None => f64::NEG_INFINITY,
            Some(_) => -ln(self.q(xi)),
        }
    }

    /// Area density of `∂X` over the unit sphere: `r_b^{2n-1} |∇ρ| / |∂_r ρ|`.
    pub fn boundary_jacobian(&self, xi: &[C64]) -> f64 {
        let Some(sigma) = self.boundary_point(xi) else {
            return 0.0;
        };
        let rb = sqrt(crate::real::norm_sqr(&sigma));
        let g = self.grad_rho(&sigma);
        let grad_norm = 2.0 * sqrt(g.iter().map(|c| c.norm_sqr()).sum::<f64>());
        let radial: f64 = 2.0 * g.iter().zip(xi).map(|(g, x)| (g * x).re).sum::<f64>();
        crate::real::powi(rb, 2 * self.n as i32 - 1) * grad_norm / radial.abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::cabs;

    #[test]
    fn gradients_match_finite_differences() {
        let z = [C64::new(0.7, -0.4), C64::new(1.1, 0.9)];
        for d in [
            Domain::exterior_ball(2),
            Domain::exterior_ellipsoid(vec![1.0, 2.0]).unwrap().scaled(0.5),
            Domain::exterior_ellipsoid(vec![3.0, 0.5]).unwrap().with_defining(DefiningFunction::Quadratic),
        ] {
            let g = d.grad_rho(&z);
            let hs = d.hess_rho(&z);
            let hh = d.hess_holo_rho(&z);
            let h = 1e-5;
            for i in 0..2 {
                let shift = |dz: C64| {
                    let mut p = z.to_vec();
                    p[i] += dz;
                    p
                };
                let fx = (d.rho(&shift(C64::new(h, 0.0))) - d.rho(&shift(C64::new(-h, 0.0)))) / (2.0 * h);
                let fy = (d.rho(&shift(C64::new(0.0, h))) - d.rho(&shift(C64::new(0.0, -h)))) / (2.0 * h);
                assert!(cabs(C64::new(fx, -fy) * 0.5 - g[i]) < 1e-7);
                for j in 0..2 {
                    let gj = |dz: C64| d.grad_rho(&shift(dz))[j];
                    let dx = (gj(C64::new(h, 0.0)) - gj(C64::new(-h, 0.0))) / (2.0 * h);
                    let dy = (gj(C64::new(0.0, h)) - gj(C64::new(0.0, -h))) / (2.0 * h);
                    let i_ = C64::new(0.0, 1.0);
                    // ∂_i ∂_j ρ and ∂̄_i ∂_j ρ = conj(H_ji)... compare both orderings.
                    assert!(cabs((dx - dy * i_) * 0.5 - hh[(i, j)]) < 1e-6);
                    assert!(cabs((dx + dy * i_) * 0.5 - hs[(j, i)]) < 1e-6);
                }
            }
        }
    }

    #[test]
    fn boundary_points_lie_on_boundary() {
        let d = Domain::exterior_ellipsoid(vec![1.0, 2.0]).unwrap();
        let xi = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let s = d.boundary_point(&xi).unwrap();
        assert!(d.rho(&s).abs() < 1e-14);
        let ball = Domain::exterior_ball(2);
        assert!((ball.boundary_jacobian(&xi) - 1.0).abs() < 1e-14);
        assert!(Domain::chart(2).boundary_point(&xi).is_none());
    }
}
