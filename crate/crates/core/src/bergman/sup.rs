use alloc::vec;
use alloc::vec::Vec;

use super::state::{KernelState, StateKind};
use crate::linalg::{cholesky_pivoted, CMatrix};
use crate::real::{atan2, cis, exp, ln, norm_sqr, sqrt};
use crate::{Error, Result, C64};

/// Bracket for `k⁻¹ ln sup{|p(x)|² : max_grid |p|² e^{-kφ} ≤ 1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupMetric {
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
}

impl SupMetric {
    pub fn value(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

const MAX_ITERATIONS: usize = 300;

/// Solves the extremal problem over the grid by a multiplicative
/// c-optimal design iteration. `upper` is the Christoffel function of the
/// current design and `lower` is attained by its reproducing kernel at `x`.
/// Radial states use the polynomials `⟨y, x̂⟩^j`.
pub fn sup_metric(state: &KernelState, x: &[C64], grid: &[Vec<C64>], tol: f64) -> Result<SupMetric> {
    if grid.is_empty() {
        return Err(Error::Invalid("sup_metric needs a nonempty grid".into()));
    }
    let k = state.k() as f64;
    let features = Features::new(state, x);
    let (bx, cols) = {
        let mut rows: Vec<Vec<(f64, f64)>> = Vec::with_capacity(grid.len());
        for y in grid {
            let half = -0.5 * k * state.weight().phi(y)?;
            rows.push(features.log_polar(y).into_iter().map(|(l, a)| (l + half, a)).collect());
        }
        let d = features.dim();
        let mut scale = vec![f64::NEG_INFINITY; d];
        for r in &rows {
            for (s, &(l, _)) in scale.iter_mut().zip(r) {
                *s = s.max(l);
            }
        }
        for s in scale.iter_mut() {
            if !s.is_finite() {
                *s = 0.0;
            }
        }
        let to_vec = |r: &[(f64, f64)]| -> Vec<C64> { r.iter().zip(&scale).map(|(&(l, a), s)| cis(a) * exp(l - s)).collect() };
        let cols: Vec<Vec<C64>> = rows.iter().map(|r| to_vec(r)).collect();
        // `U` and `L` are invariant under a common column scaling.
        (to_vec(&features.log_polar(x)), cols)
    };
    let v = cols;
    let d = bx.len();
    let m = grid.len();
    let mut nu = vec![1.0 / m as f64; m];
    let mut best = (f64::NEG_INFINITY, f64::INFINITY);
    let mut iterations = 0;
    for it in 0..MAX_ITERATIONS {
        iterations = it + 1;
        let mut gram = CMatrix::zeros(d, d);
        for (vj, &w) in v.iter().zip(&nu) {
            if w == 0.0 {
                continue;
            }
            for a in 0..d {
                let va = vj[a] * w;
                for b in a..d {
                    gram[(a, b)] += va * vj[b].conj();
                }
            }
        }
        let mut ridge = 0.0;
        for a in 0..d {
            ridge += gram[(a, a)].re;
            for b in 0..a {
                gram[(a, b)] = gram[(b, a)].conj();
            }
        }
        ridge *= 1e-13 / d as f64;
        for a in 0..d {
            gram[(a, a)] += ridge;
        }
        let ch = cholesky_pivoted(&gram, 0.0)?;
        let z = ch.solve(&bx);
        let upper: f64 = bx.iter().zip(&z).map(|(b, z)| (b * z.conj()).re).sum();
        let g: Vec<f64> = v.iter().map(|vj| vj.iter().zip(&z).map(|(a, z)| a * z.conj()).sum::<C64>().norm_sqr()).collect();
        let gmax = g.iter().copied().fold(0.0, f64::max);
        if !(upper > 0.0 && gmax > 0.0) {
            return Err(Error::NonFinite { what: "sup_metric design", at: sqrt(norm_sqr(x)) });
        }
        let lower = upper * upper / gmax;
        best = (best.0.max(ln(lower)), best.1.min(ln(upper)));
        if (best.1 - best.0) / k <= tol {
            break;
        }
        let mut total = 0.0;
        for (w, gj) in nu.iter_mut().zip(&g) {
            *w *= sqrt(gj / gmax);
            total += *w;
        }
        for w in nu.iter_mut() {
            *w /= total;
        }
    }
    Ok(SupMetric { lower: best.0 / k, upper: best.1 / k, iterations })
}

enum Features<'a> {
    Monomials(&'a KernelState),
    Powers { dir: Vec<C64>, k: usize },
}

impl<'a> Features<'a> {
    fn new(state: &'a KernelState, x: &[C64]) -> Self {
        let r = sqrt(norm_sqr(x));
        if state.kind() == StateKind::Radial && r > 0.0 {
            Features::Powers { dir: x.iter().map(|c| c / r).collect(), k: state.k() }
        } else {
            Features::Monomials(state)
        }
    }

    fn dim(&self) -> usize {
        match self {
            Features::Monomials(s) => s.dim(),
            Features::Powers { k, .. } => k + 1,
        }
    }

    /// `(ln|b_i(y)|, arg b_i(y))` for every feature.
    fn log_polar(&self, y: &[C64]) -> Vec<(f64, f64)> {
        let polar = |c: C64| (ln(c.norm()), atan2(c.im, c.re));
        match self {
            Features::Monomials(s) => {
                let p: Vec<(f64, f64)> = y.iter().map(|&c| polar(c)).collect();
                s.basis()
                    .indices()
                    .iter()
                    .map(|a| {
                        let mut l = 0.0;
                        let mut th = 0.0;
                        for (&e, &(lc, tc)) in a.iter().zip(&p) {
                            if e > 0 {
                                l += e as f64 * lc;
                                th += e as f64 * tc;
                            }
                        }
                        (l, th)
                    })
                    .collect()
            }
            Features::Powers { dir, k } => {
                let t: C64 = y.iter().zip(dir).map(|(a, b)| a * b.conj()).sum();
                let (lt, tt) = polar(t);
                (0..=*k).map(|j| if j == 0 { (0.0, 0.0) } else { (j as f64 * lt, j as f64 * tt) }).collect()
            }
        }
    }
}
