use alloc::vec;
use alloc::vec::Vec;

use super::{Domain, Weight};
use crate::linalg::{det, hermitian_eigen, orthogonal_complement, CMatrix};
use crate::model::{BoundaryModel, InteriorModel};
use crate::real::{cln, norm_sqr, sqrt, PI};
use crate::{Error, Result, C64};

/// Holomorphic quadratic `h(y) = c0 + Σ lin_a y_a + Σ quad_ab y_a y_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct HoloJet {
    pub c0: C64,
    pub lin: Vec<C64>,
    pub quad: CMatrix,
}

impl HoloJet {
    pub fn eval(&self, y: &[C64]) -> C64 {
        let mut acc = self.c0;
        for (a, ya) in y.iter().enumerate() {
            acc += self.lin[a] * ya;
            for (b, yb) in y.iter().enumerate() {
                acc += self.quad[(a, b)] * ya * yb;
            }
        }
        acc
    }
}

fn i_unit() -> C64 {
    C64::new(0.0, 1.0)
}

/// Boundary-adapted holomorphic coordinates `y = (z, w)` centered at `σ ∈ ∂X`
/// in which `ρ = v + Σ μ_a |z_a|² + v2·v² + O(|y|³)`, `w = u + iv`.
#[derive(Debug, Clone)]
pub struct BoundaryFrame {
    pub sigma: Vec<C64>,
    /// Linear part; columns are the `z_1, …, z_{n-1}, w` directions.
    pub jac: CMatrix,
    /// `Q̂(y) = Σ qhat_ab y_a y_b`, absorbed into `w`.
    pub qhat: CMatrix,
    pub mu: Vec<f64>,
    /// Tangent Hessian of `φ` in the `z` block.
    pub lambda: CMatrix,
    /// Coefficient of the `v²` term left in `ρ`; zero for `ρ = -ln|ζ|²` on the ball.
    pub v2: f64,
    /// Holomorphic 2-jet of `φ` at `σ`; `2 Re h` is subtracted from `φ`.
    pub jet: HoloJet,
    /// `|det jac|²`, the Lebesgue Jacobian of the frame map at `σ`.
    pub jac_det_sq: f64,
}

impl BoundaryFrame {
    pub fn n(&self) -> usize {
        self.sigma.len()
    }

    /// Frame map `y ↦ σ + J (z, w - 2i Q̂(y))`.
    pub fn map(&self, y: &[C64]) -> Vec<C64> {
        let n = self.n();
        let mut q = C64::new(0.0, 0.0);
        for a in 0..n {
            for b in 0..n {
                q += self.qhat[(a, b)] * y[a] * y[b];
            }
        }
        let mut t = y.to_vec();
        t[n - 1] -= i_unit() * q * 2.0;
        let lin = self.jac.mul_vec(&t);
        self.sigma.iter().zip(lin).map(|(s, l)| s + l).collect()
    }

    /// Anisotropic scaling `(z, w) ↦ (z/√k, w/k)` followed by [`Self::map`].
    pub fn map_scaled(&self, y: &[C64], k: f64) -> Vec<C64> {
        self.map(&self.scale(y, k))
    }

    pub fn scale(&self, y: &[C64], k: f64) -> Vec<C64> {
        let n = self.n();
        let rk = sqrt(k);
        y.iter().enumerate().map(|(i, c)| if i + 1 < n { c / rk } else { c / k }).collect()
    }

    /// `ρ₀(z, w) = v + Σ μ_a |z_a|²`.
    pub fn rho0(&self, y: &[C64]) -> f64 {
        let n = self.n();
        y[n - 1].im + (0..n - 1).map(|a| self.mu[a] * y[a].norm_sqr()).sum::<f64>()
    }

    pub fn model(&self) -> Result<BoundaryModel> {
        BoundaryModel::new(self.lambda.clone(), self.mu.clone())
    }
}

/// Builds the boundary frame: unitary alignment of the complex normal with
/// `w`, diagonalization of the Levi form, a shear removing `z w̄` terms and a
/// quadratic change of `w` absorbing the pluriharmonic part of `ρ`.
pub fn adapted_frame(weight: &Weight, domain: &Domain, sigma: &[C64]) -> Result<BoundaryFrame> {
    let n = domain.n();
    if n < 2 || !domain.has_boundary() {
        return Err(Error::Invalid("boundary frames need n ≥ 2 and a boundary".into()));
    }
    let rho = domain.rho(sigma);
    if !(rho.abs() < 1e-10) {
        return Err(Error::NotOnBoundary { at: sqrt(norm_sqr(sigma)), rho });
    }
    let d_rho = domain.grad_rho(sigma);
    let g: Vec<C64> = d_rho.iter().map(|c| c.conj() * 2.0).collect();
    let g2 = norm_sqr(&g);
    let c: Vec<C64> = g.iter().map(|x| -i_unit() * x / g2).collect();
    let e = orthogonal_complement(&g);
    let h_rho = domain.hess_rho(sigma);

    let levi = h_rho.pullback_hermitian(&e);
    let eig = hermitian_eigen(&levi);
    if let Some(&worst) = eig.values.last() {
        if !(worst < 0.0) {
            return Err(Error::NotPseudoconcave { at: sqrt(norm_sqr(sigma)), max_eig: worst });
        }
    }
    let ep = e.matmul(&eig.vectors.conj());
    let with_c = |w: &[C64]| CMatrix::from_fn(n, n, |i, j| if j + 1 < n { ep[(i, j)] } else { w[i] });
    let j1 = with_c(&c);
    let m1 = h_rho.pullback_hermitian(&j1);
    let b: Vec<C64> = (0..n - 1).map(|a| m1[(a, n - 1)].conj() / eig.values[a]).collect();
    let shift = ep.mul_vec(&b);
    let w_col: Vec<C64> = c.iter().zip(&shift).map(|(x, s)| x - s).collect();
    let jac = with_c(&w_col);

    let m2 = h_rho.pullback_hermitian(&jac);
    let d_ww = m2[(n - 1, n - 1)].re;
    let hh = domain.hess_holo_rho(sigma).pullback_bilinear(&jac);
    let mut qhat = hh.scale(C64::new(0.5, 0.0));
    qhat[(n - 1, n - 1)] += C64::new(0.5 * d_ww, 0.0);

    let lambda_full = weight.hess(sigma)?.pullback_hermitian(&jac);
    let lambda = lambda_full.block(0, 0, n - 1, n - 1);

    let d_phi = weight.grad(sigma)?;
    let lin: Vec<C64> = (0..n).map(|a| (0..n).map(|i| d_phi[i] * jac[(i, a)]).sum()).collect();
    let hh_phi = weight.hess_holo(sigma)?.pullback_bilinear(&jac);
    let ln_w = lin[n - 1];
    let quad = CMatrix::from_fn(n, n, |a, b| hh_phi[(a, b)] * 0.5 - i_unit() * ln_w * qhat[(a, b)] * 2.0);
    let jet = HoloJet { c0: C64::new(weight.phi(sigma)? / 2.0, 0.0), lin, quad };

    Ok(BoundaryFrame { sigma: sigma.to_vec(), jac_det_sq: det(&jac).norm_sqr(), jac, qhat, mu: eig.values, lambda, v2: 2.0 * d_ww, jet })
}

/// Normal coordinates at an interior point built from a Fubini–Study
/// automorphism `ζ(u)` moving `0` to the center, followed by `u = √π W z`
/// diagonalizing the Hessian of `φ` to `λ_i`.
#[derive(Debug, Clone)]
pub struct InteriorFrame {
    pub center: Vec<C64>,
    /// Unitary `(n+1)×(n+1)` with first column proportional to `(1, center)`.
    pub unitary: CMatrix,
    /// `u = √π W z`.
    pub w: CMatrix,
    pub lambda: Vec<f64>,
    /// Holomorphic 2-jet (in `u`) of `φ - φ_FS` composed with `ζ(u)`.
    pub psi_jet: HoloJet,
}

impl InteriorFrame {
    pub fn new(weight: &Weight, center: &[C64]) -> Result<Self> {
        let n = center.len();
        let norm = sqrt(1.0 + norm_sqr(center));
        let mut chat = vec![C64::new(1.0 / norm, 0.0)];
        chat.extend(center.iter().map(|c| c / norm));
        let comp = orthogonal_complement(&chat);
        let v = CMatrix::from_fn(n + 1, n + 1, |i, j| if j == 0 { chat[i] } else { comp[(i, j - 1)] });

        let v00 = v[(0, 0)];
        let jac = CMatrix::from_fn(n, n, |i, j| (v[(i + 1, j + 1)] * v00 - v[(i + 1, 0)] * v[(0, j + 1)]) / (v00 * v00));
        // ∂²ζ_i/∂u_j∂u_k at u = 0.
        let d2 = |i: usize, j: usize, k: usize| {
            let (nj, nk) = (v[(i + 1, j + 1)], v[(i + 1, k + 1)]);
            let (lj, lk) = (v[(0, j + 1)], v[(0, k + 1)]);
            -(nj * lk + nk * lj) / (v00 * v00) + v[(i + 1, 0)] * lj * lk * 2.0 / (v00 * v00 * v00)
        };

        let fs = Weight::FubiniStudy;
        let g_psi: Vec<C64> = weight.grad(center)?.iter().zip(fs.grad(center)?).map(|(a, b)| a - b).collect();
        let h_psi = weight.hess(center)?.sub(&fs.hess(center)?);
        let hh_psi = weight.hess_holo(center)?.sub(&fs.hess_holo(center)?);
        let psi0 = weight.phi(center)? - fs.phi(center)?;

        let lin: Vec<C64> = (0..n).map(|j| (0..n).map(|i| g_psi[i] * jac[(i, j)]).sum()).collect();
        let hh_u = hh_psi.pullback_bilinear(&jac);
        let quad = CMatrix::from_fn(n, n, |j, k| {
            let chain: C64 = (0..n).map(|i| g_psi[i] * d2(i, j, k)).sum();
            (hh_u[(j, k)] + chain) * 0.5
        });
        let h_u = CMatrix::identity(n).add(&h_psi.pullback_hermitian(&jac));
        let eig = hermitian_eigen(&h_u);
        if !(eig.values[0] > 0.0) {
            return Err(Error::NotPositiveDefinite { step: 0, pivot: eig.values[0] });
        }
        Ok(Self {
            center: center.to_vec(),
            unitary: v,
            w: eig.vectors.conj(),
            lambda: eig.values.iter().map(|e| PI * e).collect(),
            psi_jet: HoloJet { c0: C64::new(psi0 / 2.0, 0.0), lin, quad },
        })
    }

    pub fn n(&self) -> usize {
        self.center.len()
    }

    pub fn u_of(&self, z: &[C64]) -> Vec<C64> {
        self.w.mul_vec(z).iter().map(|c| c * sqrt(PI)).collect()
    }

    fn ell(&self, u: &[C64]) -> C64 {
        let v = &self.unitary;
        v[(0, 0)] + u.iter().enumerate().map(|(j, x)| v[(0, j + 1)] * x).sum::<C64>()
    }

    /// Chart point of frame coordinates `z`.
    pub fn map(&self, z: &[C64]) -> Vec<C64> {
        let n = self.n();
        let u = self.u_of(z);
        let l = self.ell(&u);
        let v = &self.unitary;
        (0..n).map(|i| (v[(i + 1, 0)] + u.iter().enumerate().map(|(j, x)| v[(i + 1, j + 1)] * x).sum::<C64>()) / l).collect()
    }

    /// Holomorphic `g` with `φ(ζ(z)) - 2 Re g(z) = Σ λ_i |z_i|² + O(|z|³)`.
    pub fn trivialization(&self, z: &[C64]) -> C64 {
        let u = self.u_of(z);
        -cln(self.ell(&u)) + self.psi_jet.eval(&u)
    }

    pub fn model(&self) -> Result<InteriorModel> {
        InteriorModel::new(self.lambda.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DefiningFunction;
    use crate::real::{cabs, cis};

    fn taylor_ratio(frame: &BoundaryFrame, domain: &Domain, extra_v2: bool) -> (f64, f64) {
        let dir = [C64::new(0.3, -0.2), C64::new(-0.4, 0.5)];
        let mut ratios = vec![];
        for &t in &[0.1, 0.05, 0.025] {
            let y: Vec<C64> = dir.iter().map(|c| c * t).collect();
            let v = y[1].im;
            let lead = frame.rho0(&y) + if extra_v2 { frame.v2 * v * v } else { 0.0 };
            let r = domain.rho(&frame.map(&y)) - lead;
            ratios.push(r.abs() / (t * t * t));
        }
        (ratios[0], ratios[2])
    }

    #[test]
    fn ball_normal_form() {
        let ball = Domain::exterior_ball(2);
        let s = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let f = adapted_frame(&Weight::FubiniStudy, &ball, &s).unwrap();
        assert!((f.mu[0] + 1.0).abs() < 1e-14);
        assert!(f.v2.abs() < 1e-14);
        assert!((f.lambda[(0, 0)].re - 0.5).abs() < 1e-14);
        let (r0, r2) = taylor_ratio(&f, &ball, false);
        assert!(r2 < 2.0 * r0 + 1e-9, "{r0} {r2}");
        assert!((f.model().unwrap().slope() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn ellipsoid_normal_form_keeps_only_v2() {
        let d = Domain::exterior_ellipsoid(vec![1.0, 2.0]).unwrap().with_defining(DefiningFunction::Quadratic);
        let s = d.boundary_point(&[cis(0.4) * 0.6, cis(2.0) * 0.8]).unwrap();
        let f = adapted_frame(&Weight::FubiniStudy, &d, &s).unwrap();
        let (r0, r2) = taylor_ratio(&f, &d, true);
        assert!(r2 < 2.0 * r0 + 1e-9, "{r0} {r2}");
        assert!(f.mu.iter().all(|m| *m < 0.0));
    }

    #[test]
    fn trivialization_kills_pluriharmonic_part() {
        // φ∘F - 2Re h: the holomorphic quadratic coefficients must vanish.
        let ball = Domain::exterior_ball(2);
        let s = [cis(0.7) * 0.6, cis(-0.2) * 0.8];
        let f = adapted_frame(&Weight::FubiniStudy, &ball, &s).unwrap();
        let g = |y: &[C64]| Weight::FubiniStudy.phi(&f.map(y)).unwrap() - 2.0 * f.jet.eval(y).re;
        let h = 1e-3;
        for a in 0..2 {
            for b in 0..2 {
                // Coefficient of y_a y_b via the ∂_a ∂_b derivative by polarization.
                let e = |i: usize, c: C64| {
                    let mut y = vec![C64::new(0.0, 0.0); 2];
                    y[i] += c;
                    y
                };
                let add = |p: Vec<C64>, q: Vec<C64>| p.iter().zip(&q).map(|(x, y)| x + y).collect::<Vec<_>>();
                let mut acc = C64::new(0.0, 0.0);
                for (sa, wa) in [(C64::new(h, 0.0), 1.0), (C64::new(0.0, h), -1.0)].iter().map(|(d, s)| (*d, *s)) {
                    for (sb, wb) in [(C64::new(h, 0.0), 1.0), (C64::new(0.0, h), -1.0)].iter().map(|(d, s)| (*d, *s)) {
                        let i_a = if wa > 0.0 { C64::new(1.0, 0.0) } else { C64::new(0.0, -1.0) };
                        let i_b = if wb > 0.0 { C64::new(1.0, 0.0) } else { C64::new(0.0, -1.0) };
                        let f4 =
                            g(&add(e(a, sa), e(b, sb))) - g(&add(e(a, sa), e(b, -sb))) - g(&add(e(a, -sa), e(b, sb))) + g(&add(e(a, -sa), e(b, -sb)));
                        acc += i_a * i_b * f4 / (4.0 * h * h);
                    }
                }
                // ∂_a∂_b g = acc/4
                assert!(cabs(acc / 4.0) < 1e-5, "{a}{b}: {acc}");
            }
            let d = {
                let p = |c: C64| g(&e1(a, c));
                let dx = (p(C64::new(h, 0.0)) - p(C64::new(-h, 0.0))) / (2.0 * h);
                let dy = (p(C64::new(0.0, h)) - p(C64::new(0.0, -h))) / (2.0 * h);
                C64::new(dx, -dy) * 0.5
            };
            assert!(cabs(d) < 1e-6);
        }
        assert!(g(&[C64::new(0.0, 0.0); 2]).abs() < 1e-14);
    }

    fn e1(i: usize, c: C64) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); 2];
        y[i] = c;
        y
    }

    #[test]
    fn interior_frame_is_normal() {
        for w in [Weight::FubiniStudy, Weight::TorusFs { a: vec![1.0, 3.0] }] {
            let c = [C64::new(2.0, 0.0), C64::new(0.3, -0.4)];
            let f = InteriorFrame::new(&w, &c).unwrap();
            assert!(cabs(f.map(&[C64::new(0.0, 0.0); 2])[0] - c[0]) < 1e-14);
            let g = |z: &[C64]| w.phi(&f.map(z)).unwrap() - 2.0 * f.trivialization(z).re;
            let dir = [C64::new(0.3, 0.1), C64::new(-0.2, 0.4)];
            for &t in &[1e-2, 5e-3] {
                let z: Vec<C64> = dir.iter().map(|x| x * t).collect();
                let model: f64 = z.iter().zip(&f.lambda).map(|(x, l)| l * x.norm_sqr()).sum();
                assert!((g(&z) - model).abs() < 40.0 * t * t * t, "{w:?} {t}");
            }
        }
        let f = InteriorFrame::new(&Weight::FubiniStudy, &[C64::new(2.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
        assert!(f.lambda.iter().all(|l| (l - PI).abs() < 1e-12));
    }
}
