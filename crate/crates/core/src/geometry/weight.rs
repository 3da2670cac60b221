use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::CMatrix;
use crate::real::{exp, ln, ln_1p_exp, logistic, norm_sqr};
use crate::{Error, Result, C64};

/// Metric potential `φ` of `O(1)` on the affine chart.
#[derive(Debug, Clone, PartialEq)]
pub enum Weight {
    /// `ln(1 + |ζ|²)`.
    FubiniStudy,
    /// `ln |ζ|²`, flat away from the origin.
    LogModulus,
    /// `|ζ|²`. Not a metric on `O(1)`; kept as a flat test weight.
    Euclidean,
    /// `ln(1 + Σ a_i |ζ_i|²)` with `a_i > 0`.
    TorusFs { a: Vec<f64> },
    /// `u(ln |ζ|²)` for a sampled convex profile.
    Radial(RadialWeight),
}

/// Value and first two derivatives of a profile `u(s)`, `s = ln |ζ|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileJet {
    pub u: f64,
    pub du: f64,
    pub d2u: f64,
}

impl Weight {
    pub fn id(&self) -> String {
        match self {
            Weight::FubiniStudy => "fs".into(),
            Weight::LogModulus => "log".into(),
            Weight::Euclidean => "euclid".into(),
            Weight::TorusFs { a } => {
                let mut s = String::from("torus-fs");
                for x in a {
                    s.push_str(&format!(":{x:e}"));
                }
                s
            }
            Weight::Radial(r) => format!("radial:{:016x}", r.fingerprint()),
        }
    }

    /// Depends on `|ζ|` only.
    pub fn is_radial(&self) -> bool {
        match self {
            Weight::TorusFs { a } => a.windows(2).all(|w| w[0] == w[1]),
            _ => true,
        }
    }

    /// Depends on `(|ζ_1|, …, |ζ_n|)` only. True for every variant.
    pub fn is_torus_invariant(&self) -> bool {
        true
    }

    /// Profile jet at `s = ln |ζ|²` for radial weights.
    pub fn profile(&self, s: f64) -> Option<ProfileJet> {
        match self {
            Weight::FubiniStudy => {
                let p = logistic(s);
                Some(ProfileJet { u: ln_1p_exp(s), du: p, d2u: p * (1.0 - p) })
            }
            Weight::LogModulus => Some(ProfileJet { u: s, du: 1.0, d2u: 0.0 }),
            Weight::Euclidean => {
                let e = exp(s);
                Some(ProfileJet { u: e, du: e, d2u: e })
            }
            Weight::TorusFs { a } if self.is_radial() && !a.is_empty() => {
                let t = s + ln(a[0]);
                let p = logistic(t);
                Some(ProfileJet { u: ln_1p_exp(t), du: p, d2u: p * (1.0 - p) })
            }
            Weight::TorusFs { .. } => None,
            Weight::Radial(r) => Some(r.jet(s)),
        }
    }

    fn torus_coeffs<'a>(&'a self, n: usize, ones: &'a [f64]) -> Option<&'a [f64]> {
        match self {
            Weight::FubiniStudy => Some(&ones[..n]),
            Weight::TorusFs { a } => Some(a),
            _ => None,
        }
    }

    fn check_dim(&self, z: &[C64]) -> Result<()> {
        if let Weight::TorusFs { a } = self {
            if a.len() != z.len() {
                return Err(Error::Invalid(format!("weight has {} coefficients, point has {}", a.len(), z.len())));
            }
        }
        Ok(())
    }

    fn singular(&self, z: &[C64]) -> bool {
        !matches!(self, Weight::FubiniStudy | Weight::Euclidean | Weight::TorusFs { .. }) && norm_sqr(z) == 0.0
    }

    pub fn phi(&self, z: &[C64]) -> Result<f64> {
        self.check_dim(z)?;
        let ones = vec![1.0; z.len()];
        if let Some(a) = self.torus_coeffs(z.len(), &ones) {
            let q: f64 = z.iter().zip(a).map(|(c, a)| a * c.norm_sqr()).sum();
            return Ok(crate::real::ln_1p(q));
        }
        if let Weight::Euclidean = self {
            return Ok(norm_sqr(z));
        }
        let q = norm_sqr(z);
        if q == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(self.profile(ln(q)).expect("radial").u)
    }

    /// Holomorphic gradient `∂φ/∂ζ_i`.
    pub fn grad(&self, z: &[C64]) -> Result<Vec<C64>> {
        self.check_dim(z)?;
        if self.singular(z) {
            return Err(Error::SingularPoint { at: 0.0 });
        }
        let ones = vec![1.0; z.len()];
        if let Some(a) = self.torus_coeffs(z.len(), &ones) {
            let s = 1.0 + z.iter().zip(a).map(|(c, a)| a * c.norm_sqr()).sum::<f64>();
            return Ok(z.iter().zip(a).map(|(c, a)| c.conj() * (a / s)).collect());
        }
        if let Weight::Euclidean = self {
            return Ok(z.iter().map(|c| c.conj()).collect());
        }
        let q = norm_sqr(z);
        let j = self.profile(ln(q)).expect("radial");
        Ok(z.iter().map(|c| c.conj() * (j.du / q)).collect())
    }

    /// Complex Hessian `H_ij = ∂²φ/∂ζ_i∂ζ̄_j`.
    pub fn hess(&self, z: &[C64]) -> Result<CMatrix> {
        self.check_dim(z)?;
        if self.singular(z) {
            return Err(Error::SingularPoint { at: 0.0 });
        }
        let n = z.len();
        let ones = vec![1.0; n];
        if let Some(a) = self.torus_coeffs(n, &ones) {
            let s = 1.0 + z.iter().zip(a).map(|(c, a)| a * c.norm_sqr()).sum::<f64>();
            return Ok(CMatrix::from_fn(n, n, |i, j| {
                let d = if i == j { C64::new(a[i] / s, 0.0) } else { C64::new(0.0, 0.0) };
                d - z[i].conj() * z[j] * (a[i] * a[j] / (s * s))
            }));
        }
        if let Weight::Euclidean = self {
            return Ok(CMatrix::identity(n));
        }
        let q = norm_sqr(z);
        let j = self.profile(ln(q)).expect("radial");
        Ok(CMatrix::from_fn(n, n, |a, b| {
            let d = if a == b { j.du / q } else { 0.0 };
            C64::new(d, 0.0) + z[a].conj() * z[b] * ((j.d2u - j.du) / (q * q))
        }))
    }

    /// Holomorphic Hessian `∂²φ/∂ζ_i∂ζ_j`.
    pub fn hess_holo(&self, z: &[C64]) -> Result<CMatrix> {
        self.check_dim(z)?;
        if self.singular(z) {
            return Err(Error::SingularPoint { at: 0.0 });
        }
        let n = z.len();
        let ones = vec![1.0; n];
        if let Some(a) = self.torus_coeffs(n, &ones) {
            let s = 1.0 + z.iter().zip(a).map(|(c, a)| a * c.norm_sqr()).sum::<f64>();
            return Ok(CMatrix::from_fn(n, n, |i, j| -(z[i].conj() * z[j].conj()) * (a[i] * a[j] / (s * s))));
        }
        if let Weight::Euclidean = self {
            return Ok(CMatrix::zeros(n, n));
        }
        let q = norm_sqr(z);
        let j = self.profile(ln(q)).expect("radial");
        Ok(CMatrix::from_fn(n, n, |a, b| z[a].conj() * z[b].conj() * ((j.d2u - j.du) / (q * q))))
    }
}

/// Natural cubic spline through uniform samples of `u(s)`, extended linearly
/// outside the sampled range.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialWeight {
    s0: f64,
    h: f64,
    values: Vec<f64>,
    second: Vec<f64>,
}

impl RadialWeight {
    pub fn new(s0: f64, h: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < 3 || !(h > 0.0) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("radial profile needs at least 3 finite samples on a positive step".into()));
        }
        let m = values.len();
        // Tridiagonal solve for natural spline second derivatives.
        let mut c = vec![0.0; m];
        let mut d = vec![0.0; m];
        let mut second = vec![0.0; m];
        for i in 1..m - 1 {
            let rhs = 6.0 * (values[i + 1] - 2.0 * values[i] + values[i - 1]) / (h * h);
            let denom = 4.0 - c[i - 1];
            c[i] = 1.0 / denom;
            d[i] = (rhs - d[i - 1]) / denom;
        }
        for i in (1..m - 1).rev() {
            second[i] = d[i] - c[i] * second[i + 1];
        }
        Ok(Self { s0, h, values, second })
    }

    /// Samples `f` on `m` uniform nodes of `[s0, s1]`.
    pub fn from_fn(s0: f64, s1: f64, m: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let h = (s1 - s0) / (m - 1) as f64;
        Self::new(s0, h, (0..m).map(|i| f(s0 + h * i as f64)).collect())
    }

    pub fn s_range(&self) -> (f64, f64) {
        (self.s0, self.s0 + self.h * (self.values.len() - 1) as f64)
    }

    pub fn samples(&self) -> &[f64] {
        &self.values
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        for x in core::iter::once(self.s0).chain(core::iter::once(self.h)).chain(self.values.iter().copied()) {
            for b in x.to_bits().to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        }
        h
    }

    fn slope_at_end(&self, right: bool) -> f64 {
        let m = self.values.len();
        let h = self.h;
        if right {
            (self.values[m - 1] - self.values[m - 2]) / h + h * (2.0 * self.second[m - 1] + self.second[m - 2]) / 6.0
        } else {
            (self.values[1] - self.values[0]) / h - h * (2.0 * self.second[0] + self.second[1]) / 6.0
        }
    }

    pub fn jet(&self, s: f64) -> ProfileJet {
        let m = self.values.len();
        let (lo, hi) = self.s_range();
        if s <= lo {
            let d = self.slope_at_end(false);
            return ProfileJet { u: self.values[0] + d * (s - lo), du: d, d2u: 0.0 };
        }
        if s >= hi {
            let d = self.slope_at_end(true);
            return ProfileJet { u: self.values[m - 1] + d * (s - hi), du: d, d2u: 0.0 };
        }
        let t = (s - lo) / self.h;
        let i = (t as usize).min(m - 2);
        let a = (i + 1) as f64 - t;
        let b = t - i as f64;
        let h = self.h;
        let (y0, y1, m0, m1) = (self.values[i], self.values[i + 1], self.second[i], self.second[i + 1]);
        let u = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let du = (y1 - y0) / h - (3.0 * a * a - 1.0) * h * m0 / 6.0 + (3.0 * b * b - 1.0) * h * m1 / 6.0;
        let d2u = a * m0 + b * m1;
        ProfileJet { u, du, d2u }
    }
}
