//! Gauss–Legendre and Gauss–Kronrod rules, simplex and sphere product rules,
//! and a seeded Monte Carlo sphere sampler.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::real::{cabs, cis, cos, factorial, ln, powi, sqrt, PI};
use crate::{Error, Result, C64};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut z = cos(PI * (i as f64 + 0.75) / (m as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    if m % 2 == 1 {
        x[m / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(m: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if m == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=m {
        let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, m as f64 * (z * p1 - p0) / (z * z - 1.0))
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(m: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(m);
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    (x.iter().map(|t| c + h * t).collect(), w.iter().map(|v| v * h).collect())
}

/// 15-point Gauss–Kronrod nodes and weights on `[-1, 1]`.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn kronrod15(f: &mut impl FnMut(f64) -> C64, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut gauss = fc * WG[3];
    let mut kron = fc * WGK[7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    ((kron * h), cabs((kron - gauss) * h))
}

/// Adaptive 7/15-point Gauss–Kronrod quadrature of a complex integrand.
/// Returns `(value, error estimate)`.
pub fn adaptive_c(mut f: impl FnMut(f64) -> C64, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<(C64, f64)> {
    const MAX_INTERVALS: usize = 2000;
    let (v, e) = kronrod15(&mut f, a, b);
    let mut parts: Vec<(f64, f64, C64, f64)> = vec![(a, b, v, e)];
    loop {
        let total: C64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if !(total.re.is_finite() && total.im.is_finite()) {
            return Err(Error::NonFinite { what: "quadrature", at: a });
        }
        if err <= abs_tol.max(rel_tol * cabs(total)) {
            return Ok((total, err));
        }
        if parts.len() >= MAX_INTERVALS {
            return Err(Error::Quadrature { estimate: total.re, error: err });
        }
        let (idx, _) = parts.iter().enumerate().fold((0, -1.0), |best, (i, p)| if p.3 > best.1 { (i, p.3) } else { best });
        let (lo, hi, _, _) = parts.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(Error::Quadrature { estimate: total.re, error: err });
        }
        let (v1, e1) = kronrod15(&mut f, lo, mid);
        let (v2, e2) = kronrod15(&mut f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// Real-valued [`adaptive_c`].
pub fn adaptive(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<(f64, f64)> {
    adaptive_c(|x| C64::new(f(x), 0.0), a, b, rel_tol, abs_tol).map(|(v, e)| (v.re, e))
}

/// Rule on the standard simplex `{x ∈ ℝⁿ : x_i ≥ 0, Σ x_i = 1}`, stored as
/// full barycentric points. Weights sum to `1/(n-1)!`, the volume of the
/// projection onto the first `n-1` coordinates.
#[derive(Debug, Clone)]
pub struct SimplexRule {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SimplexRule {
    /// Collapsed (Duffy) product of `m`-point Gauss–Legendre rules. Exact for
    /// polynomials of degree `≤ 2m - 1 - (n - 2)`.
    pub fn collapsed(n: usize, m: usize) -> Self {
        assert!(n >= 1);
        let (x, w) = gauss_legendre_on(m, 0.0, 1.0);
        let mut points = vec![vec![]];
        let mut weights = vec![1.0];
        let mut remaining = vec![1.0];
        for _ in 0..n.saturating_sub(1) {
            let mut np = Vec::new();
            let mut nw = Vec::new();
            let mut nr = Vec::new();
            for ((p, &pw), &r) in points.iter().zip(&weights).zip(&remaining) {
                for (&t, &tw) in x.iter().zip(&w) {
                    let mut q: Vec<f64> = p.clone();
                    q.push(r * t);
                    np.push(q);
                    nw.push(pw * tw * r);
                    nr.push(r * (1.0 - t));
                }
            }
            points = np;
            weights = nw;
            remaining = nr;
        }
        for (p, r) in points.iter_mut().zip(remaining) {
            p.push(r);
        }
        Self { points, weights }
    }
}

/// Product rule on the unit sphere `S^{2n-1} ⊂ ℂⁿ` in coordinates
/// `ξ_i = √x_i e^{iθ_i}` with `x` on the simplex and each `θ_i` on a uniform
/// trapezoid grid. `dσ = 2^{1-n} dx dθ`.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub n: usize,
    pub nodes: Vec<Vec<C64>>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    /// `simplex_points` Gauss points per simplex direction and `angles` phases
    /// per coordinate. Integrates `ξ^α ξ̄^β` exactly when every
    /// `|α_i - β_i| < angles` and the simplex rule resolves `x^{(α+β)/2}`.
    pub fn product(n: usize, simplex_points: usize, angles: usize) -> Self {
        let simplex = SimplexRule::collapsed(n, simplex_points);
        let dtheta = 2.0 * PI / angles as f64;
        let phase: Vec<C64> = (0..angles).map(|j| cis(dtheta * j as f64)).collect();
        let scale = powi(2.0, 1 - n as i32) * powi(dtheta, n as i32);
        let total_angles = angles.pow(n as u32);
        let mut nodes = Vec::with_capacity(simplex.points.len() * total_angles);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for (p, &w) in simplex.points.iter().zip(&simplex.weights) {
            let radii: Vec<f64> = p.iter().map(|&x| sqrt(x.max(0.0))).collect();
            for mut code in 0..total_angles {
                let mut node = Vec::with_capacity(n);
                for r in &radii {
                    node.push(phase[code % angles] * *r);
                    code /= angles;
                }
                nodes.push(node);
                weights.push(w * scale);
            }
        }
        Self { n, nodes, weights }
    }

    /// Rule resolving `ξ^α ξ̄^β` for all `|α|, |β| ≤ degree`.
    pub fn for_degree(n: usize, degree: usize) -> Self {
        Self::product(n, degree / 2 + n + 1, degree + 1)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Area of the unit sphere `S^{2n-1}`: `2πⁿ/(n-1)!`.
pub fn sphere_area(n: usize) -> f64 {
    2.0 * powi(PI, n as i32) / factorial(n - 1)
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarlo {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Uniform points on `S^{2n-1}` from a seeded ChaCha stream.
pub fn sphere_samples(n: usize, count: usize, seed: u64) -> Vec<Vec<C64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut uniform = move || ((rng.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64;
    (0..count)
        .map(|_| {
            let mut v: Vec<C64> = (0..n)
                .map(|_| {
                    let r = sqrt(-2.0 * ln(uniform()));
                    let t = 2.0 * PI * uniform();
                    cis(t) * r
                })
                .collect();
            let norm = sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>());
            for z in &mut v {
                *z /= norm;
            }
            v
        })
        .collect()
}

/// Monte Carlo sphere integral `∫_{S^{2n-1}} f dσ`.
pub fn sphere_monte_carlo(n: usize, count: usize, seed: u64, mut f: impl FnMut(&[C64]) -> f64) -> MonteCarlo {
    let area = sphere_area(n);
    let (mut s, mut s2) = (0.0, 0.0);
    for xi in sphere_samples(n, count, seed) {
        let v = f(&xi);
        s += v;
        s2 += v * v;
    }
    let m = count as f64;
    let mean = s / m;
    let var = (s2 / m - mean * mean).max(0.0);
    MonteCarlo { value: area * mean, std_error: area * sqrt(var / m), samples: count }
}
