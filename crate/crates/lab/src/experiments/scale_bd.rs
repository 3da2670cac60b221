//! Boundary scaling `(z/√k, w/k)` against the boundary model, plus the
//! model identities: closed form against quadrature, the fiber integral
//! against `μ` and the slope profile.

use anyhow::{Context, Result};
use bergkern::bergman::KernelState;
use bergkern::geometry::{adapted_frame, mu_density, BoundaryFrame, VolumeForm};
use bergkern::linalg::CMatrix;
use bergkern::model::BoundaryModel;
use bergkern::quadrature::sphere_samples;
use bergkern::C64;
use rand::Rng;
use rayon::prelude::*;

use super::{boundary_diagonal, linspace, Lab};
use crate::report::{Comparison, Gate, Report};

/// `k^{-(n+1)} c_ω K^k` at anisotropically scaled frame points, trivialized
/// by the holomorphic jet of `φ`.
pub(crate) fn scaled_kernel(frame: &BoundaryFrame, state: &KernelState, y: &[C64], yp: &[C64]) -> C64 {
    let n = frame.n();
    let k = state.k() as f64;
    let (a, b) = (frame.scale(y, k), frame.scale(yp, k));
    let kern = state.kernel_scaled(&frame.map(&a), &frame.map(&b));
    let (ha, hb) = (frame.jet.eval(&a), frame.jet.eval(&b));
    let c = VolumeForm::FubiniStudy.density(&frame.sigma) * frame.jac_det_sq;
    let ln_mod = kern.ln_scale - k * (ha.re + hb.re) - (n as f64 + 1.0) * k.ln() + c.ln();
    kern.value * C64::from_polar(1.0, -k * ha.im + k * hb.im) * ln_mod.exp()
}

fn kernel_grid(n: usize, zs: &[f64], vs: &[f64]) -> Vec<Vec<C64>> {
    let mut pts = Vec::new();
    for &z in zs {
        for &v in vs {
            let mut y = vec![C64::new(0.0, 0.0); n];
            y[0] = C64::new(z, 0.0);
            y[n - 1] = C64::new(0.0, v);
            pts.push(y);
        }
    }
    pts
}

fn kernel_error(frame: &BoundaryFrame, model: &BoundaryModel, state: &KernelState, pts: &[Vec<C64>]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for y in pts {
        for yp in pts {
            let want = model.kernel_integral(yp, y)?;
            let norm = (model.kernel_closed(y, y).re * model.kernel_closed(yp, yp).re).sqrt();
            worst = worst.max((scaled_kernel(frame, state, y, yp) - want).norm() / norm);
        }
    }
    Ok(worst)
}

/// Random `(λ, μ)` with `λ` Hermitian positive definite and generally not
/// commuting with `diag μ`, and a pair of points.
fn random_model(rng: &mut impl Rng, n: usize) -> Result<(BoundaryModel, Vec<C64>, Vec<C64>)> {
    let m = n - 1;
    let mu: Vec<f64> = (0..m).map(|_| -rng.random_range(0.3..2.0)).collect();
    let mut c = || C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let a = CMatrix::from_fn(m, m, |_, _| c());
    let lambda = a.matmul(&a.adjoint()).add(&CMatrix::identity(m).scale(C64::new(0.2, 0.0)));
    let mut point = || {
        let mut y: Vec<C64> = (0..n).map(|_| c() * 0.7).collect();
        y[m] = C64::new(y[m].re, -y[m].im.abs() - 0.2);
        y
    };
    let (y, yp) = (point(), point());
    Ok((BoundaryModel::new(lambda, mu)?, y, yp))
}

fn model_gates(lab: &Lab, r: &mut Report) -> Result<()> {
    let cfg = &lab.cfg;
    let mut rng = lab.rng(1)?;
    let model_n = cfg.usize("scale_bd.model_n")?;
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.usize("scale_bd.models")? {
        let (model, y, yp) = random_model(&mut rng, model_n)?;
        let closed = model.kernel_closed(&y, &yp);
        let quad = model.kernel_integral(&y, &yp)?;
        worst = worst.max((closed - quad).norm() / closed.norm());
    }
    r.scalar("model_kernel_rel", worst);
    r.gate(Gate::new("model.kernel_rel", worst, Comparison::AtMost, cfg.tol("model.kernel_rel")?));

    let mut fiber: f64 = 0.0;
    for xi in sphere_samples(lab.n, cfg.usize("scale_bd.fiber_points")?, lab.seed()? ^ 0x5eed) {
        let sigma = lab.domain.boundary_point(&xi).context("boundary point")?;
        let frame = adapted_frame(&lab.weight, &lab.domain, &sigma)?;
        let grad = 2.0 * lab.domain.grad_rho(&sigma).iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let predicted = grad * frame.model()?.fiber_integral();
        let mu = mu_density(&lab.weight, &lab.domain, &sigma)?;
        if predicted > 0.0 {
            fiber = fiber.max((mu / predicted - 1.0).abs());
        } else {
            fiber = fiber.max(mu.abs());
        }
    }
    r.scalar("fiber_calibration", fiber);
    r.gate(Gate::new("model.fiber", fiber, Comparison::AtMost, cfg.tol("model.fiber")?));
    Ok(())
}

fn profile_gates(lab: &Lab, model: &BoundaryModel, r: &mut Report) -> Result<()> {
    let cfg = &lab.cfg;
    let span = cfg.f64("scale_bd.profile_rho")?;
    let t: Vec<f64> = linspace(-span, span, cfg.usize("scale_bd.profile_points")?).iter().map(|&x| model.slope_profile(x)).collect();
    let increasing = t.windows(2).all(|w| w[1] > w[0]);
    let tol = cfg.tol("profile.endpoint")?;
    r.gate(Gate::holds("profile.increasing", increasing));
    r.gate(Gate::near("profile.left", t[0], 0.0, tol));
    r.gate(Gate::near("profile.right", *t.last().expect("nonempty"), model.slope(), tol));
    Ok(())
}

pub fn run(lab: &Lab) -> Result<Report> {
    let cfg = &lab.cfg;
    let mut r = lab.report("scale-bd")?;
    let frame = adapted_frame(&lab.weight, &lab.domain, &lab.sigma()?)?;
    let model = frame.model()?;
    r.scalar("slope", model.slope());
    r.scalar("v2", frame.v2);
    model_gates(lab, &mut r)?;
    profile_gates(lab, &model, &mut r)?;

    let n = lab.n;
    let vs = linspace(cfg.f64("scale_bd.v_min")?, 0.0, cfg.usize("scale_bd.v_points")?);
    let at_v = |v: f64| {
        let mut y = vec![C64::new(0.0, 0.0); n];
        y[n - 1] = C64::new(0.0, v);
        model.bergman(&y)
    };
    let want: Vec<f64> = vs.iter().map(|&v| at_v(v)).collect();
    let scale = want.iter().copied().fold(0.0, f64::max);
    let pts = kernel_grid(n, &cfg.f64_list("scale_bd.grid_z")?, &cfg.f64_list("scale_bd.grid_v")?);
    let tail_v = cfg.f64("scale_bd.tail_v")?;
    let rows: Vec<[f64; 3]> = lab
        .ks
        .par_iter()
        .map(|&k| {
            let state = lab.state(k)?;
            let mut diag: f64 = 0.0;
            for (&v, &w) in vs.iter().zip(&want) {
                diag = diag.max((boundary_diagonal(&frame, &state, v)? - w).abs() / scale);
            }
            Ok([diag, kernel_error(&frame, &model, &state, &pts)?, boundary_diagonal(&frame, &state, tail_v)?])
        })
        .collect::<Result<_>>()?;
    for (&k, row) in lab.ks.iter().zip(&rows) {
        r.push(k, "diagonal_profile_error", row[0]);
        r.push(k, "kernel_grid_error", row[1]);
        r.push(k, "tail_value", row[2]);
    }
    let model_tail = at_v(tail_v);
    r.scalar("model_tail", model_tail);

    let series = r.series("diagonal_profile_error");
    let doubling = series.iter().all(|&(k, e)| series.iter().find(|p| p.0 == 2 * k).is_none_or(|p| p.1 < e));
    r.gate(Gate::holds("scale_bd.doubling", doubling));
    let last = *lab.ks.last().expect("nonempty k_list");
    let tol = cfg.tol("scale_bd.final")?;
    r.gate(Gate::new("scale_bd.final", r.value(last, "diagonal_profile_error").expect("row"), Comparison::Below, tol));
    r.gate(Gate::new("scale_bd.kernel_final", r.value(last, "kernel_grid_error").expect("row"), Comparison::Below, tol));
    let tail = r.value(last, "tail_value").expect("row").max(model_tail);
    r.gate(Gate::new("scale_bd.tail", tail, Comparison::Below, cfg.tol("scale_bd.tail")?));
    Ok(r)
}
