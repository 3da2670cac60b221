use std::sync::OnceLock;

use bergkern::bergman::{dimension, KernelState, StateKind};
use bergkern::equilibrium::{radial_envelope, Envelope, RadialProfile};
use bergkern::geometry::{integrate_interior, Domain, InteriorRule, RuleSpec, VolumeForm, Weight};
use bergkern::model::{BoundaryModel, InteriorModel};
use bergkern::C64;
use proptest::prelude::*;

const K: usize = 6;

fn fs_state() -> &'static KernelState {
    static S: OnceLock<KernelState> = OnceLock::new();
    S.get_or_init(|| KernelState::radial(&Weight::FubiniStudy, &Domain::exterior_ball(2), K).unwrap())
}

fn fs_rule() -> &'static InteriorRule {
    static R: OnceLock<InteriorRule> = OnceLock::new();
    R.get_or_init(|| InteriorRule::new(&Domain::exterior_ball(2), VolumeForm::FubiniStudy, RuleSpec::for_degree(2, K).refined()))
}

/// Node `e^{-kφ}` weights of the rule, computed once.
fn fs_weights() -> &'static [f64] {
    static W: OnceLock<Vec<f64>> = OnceLock::new();
    W.get_or_init(|| {
        let w = Weight::FubiniStudy;
        fs_rule().nodes.iter().zip(&fs_rule().weights).map(|(z, q)| q * (-(K as f64) * w.phi(z).unwrap()).exp()).collect()
    })
}

fn point(max: f64) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-max..max, -max..max).prop_map(|(a, b)| C64::new(a, b)), 2)
}

fn ellipsoid_dense(a: f64, b: f64, k: usize) -> KernelState {
    let d = Domain::exterior_ellipsoid(vec![a, b]).unwrap();
    KernelState::dense(&Weight::FubiniStudy, &d, k, RuleSpec::for_degree(2, k).refined()).unwrap()
}

#[test]
fn trace_identity_every_path() {
    let d = Domain::exterior_ellipsoid(vec![1.0, 1.5]).unwrap();
    let w = Weight::FubiniStudy;
    let k = 5;
    let rule = InteriorRule::new(&d, VolumeForm::FubiniStudy, RuleSpec::for_degree(2, k).refined());
    let dim = dimension(2, k).unwrap() as f64;
    for st in [KernelState::build(&w, &d, k).unwrap(), KernelState::dense(&w, &d, k, RuleSpec::for_degree(2, k).refined()).unwrap()] {
        let tr = integrate_interior(|z| st.bergman_function(z).unwrap(), &rule).unwrap();
        assert!((tr - dim).abs() < 1e-5 * dim, "{:?}: {tr} vs {dim}", st.kind());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reproducing_residual(x in point(1.5), a in 0u32..=3, b in 0u32..=3) {
        let st = fs_state();
        let alpha = [a, b];
        prop_assume!(a + b <= K as u32);
        let mono = |z: &[C64]| z[0].powu(a) * z[1].powu(b);
        let mut acc = C64::new(0.0, 0.0);
        for (y, w) in fs_rule().nodes.iter().zip(fs_weights()) {
            acc += st.kernel_eval(&x, y) * mono(y) * *w;
        }
        let i = st.basis().position(&alpha).unwrap();
        let scale = (st.kernel_eval(&x, &x).re * st.gram_entry(i, i).re).sqrt();
        let res = (acc - mono(&x)).norm() / scale;
        prop_assert!(res < 1e-6, "residual {res}");
    }

    #[test]
    fn extremal_and_cauchy_schwarz(x in point(2.0), y in point(2.0), c in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 28)) {
        let st = fs_state();
        let kxy = st.kernel_eval(&x, &y).norm_sqr();
        let (kx, ky) = (st.kernel_eval(&x, &x).re, st.kernel_eval(&y, &y).re);
        prop_assert!(kxy <= kx * ky * (1.0 + 1e-12));
        // |f(x)|² ≤ K(x,x) ‖f‖² for f = Σ c_i ψ_i.
        let psi = st.orthonormal_values(&x);
        let coef: Vec<C64> = c.iter().take(st.dim()).map(|&(a, b)| C64::new(a, b)).collect();
        let f: C64 = psi.iter().zip(&coef).map(|(p, c)| p * c).sum();
        let norm: f64 = coef.iter().map(|c| c.norm_sqr()).sum();
        prop_assert!(f.norm_sqr() <= kx * norm * (1.0 + 1e-12));
    }

    #[test]
    fn hermitian_symmetry(x in point(2.0), y in point(2.0)) {
        let st = fs_state();
        let (a, b) = (st.kernel_eval(&x, &y), st.kernel_eval(&y, &x));
        prop_assert!((a - b.conj()).norm() <= 1e-13 * a.norm().max(1e-300));
    }

    #[test]
    fn metric_finite_differences(x in point(1.2)) {
        prop_assume!(x.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1.1);
        let st = fs_state();
        let f = |z: &[C64]| st.log_kernel_metric(z) * st.k() as f64;
        let h = st.bergman_metric_form(&x).unwrap().matrix;
        let e = 1e-4;
        let p = |a: usize, da: C64, b: usize, db: C64| {
            let mut z = x.clone();
            z[a] += da * e;
            z[b] += db * e;
            f(&z)
        };
        let (re, im) = (C64::new(1.0, 0.0), C64::new(0.0, 1.0));
        for a in 0..2 {
            for b in 0..2 {
                // ∂_a ∂̄_b = ¼(∂x_a - i∂y_a)(∂x_b + i∂y_b)
                let d2 = |da: C64, db: C64| (p(a, da, b, db) - p(a, da, b, -db) - p(a, -da, b, db) + p(a, -da, b, -db)) / (4.0 * e * e);
                let v = (C64::new(d2(re, re) + d2(im, im), 0.0) + im * (d2(re, im) - d2(im, re))) / 4.0;
                prop_assert!((v - h[(a, b)]).norm() < 1e-5 * h.max_abs(), "({a},{b}) {v} vs {}", h[(a, b)]);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn gram_is_torus_diagonal(a in 0.5f64..3.0, b in 0.5f64..3.0, k in 1usize..=5) {
        let st = ellipsoid_dense(a, b, k);
        prop_assert_eq!(st.kind(), StateKind::Cholesky);
        let mut off: f64 = 0.0;
        for i in 0..st.dim() {
            for j in 0..i {
                off = off.max(st.gram_entry(i, j).norm() / (st.gram_entry(i, i).re * st.gram_entry(j, j).re).sqrt());
            }
        }
        prop_assert!(off < 1e-12, "{off}");
    }

    #[test]
    fn diagonal_path_matches_dense(a in 0.5f64..3.0, b in 0.5f64..3.0, x in point(1.5)) {
        let d = Domain::exterior_ellipsoid(vec![a, b]).unwrap();
        let k = 4;
        let g = KernelState::build(&Weight::FubiniStudy, &d, k).unwrap();
        prop_assert_eq!(g.kind(), StateKind::Diagonal);
        let f = ellipsoid_dense(a, b, k);
        let (u, v) = (g.kernel_eval(&x, &x).re, f.kernel_eval(&x, &x).re);
        prop_assert!((u - v).abs() < 1e-9 * v, "{u} vs {v}");
    }
}

fn profile(s_b: f64, amp: &[(f64, f64, f64)]) -> RadialProfile {
    RadialProfile::from_fn(-12.0, 12.0, 241, |s| {
        let bumps: f64 = amp.iter().map(|&(a, w, c)| a * (w * s + c).sin()).sum();
        (1.0 + s.exp()).ln() + 0.3 * bumps + 0.05 * (s - s_b).abs()
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn envelope_fixed_point_and_maximality(
        s_b in -2.0f64..2.0,
        amp in prop::collection::vec((0.0f64..1.0, 0.2f64..3.0, -3.0f64..3.0), 0..4),
    ) {
        let u = profile(s_b, &amp);
        let env = radial_envelope(&u, (s_b, f64::INFINITY), 1e-12).unwrap();
        prop_assert!(env.is_valid(&u));
        let chi = env.profile.values().to_vec();
        let again = radial_envelope(&env.profile, (s_b, f64::INFINITY), 1e-12).unwrap();
        let drift = again.profile.values().iter().zip(&chi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(drift < 1e-9, "fixed point drift {drift}");
        for j in 0..chi.len() {
            let mut raised = chi.clone();
            raised[j] += 1e-4;
            prop_assert!(!Envelope::admissible(&raised, &u, &env.constraint, 1e-9), "node {j} can be raised");
        }
    }

    #[test]
    fn interior_model_diagonal_is_constant(l in prop::collection::vec(0.1f64..4.0, 1..=3), re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let m = InteriorModel::new(l.clone()).unwrap();
        let z: Vec<C64> = (0..l.len()).map(|j| C64::new(re / (j + 1) as f64, im)).collect();
        let b = m.kernel(&z, &z).re * (-m.phi0(&z)).exp();
        prop_assert!((b - m.bergman()).abs() < 1e-10 * m.bergman());
    }

    #[test]
    fn boundary_model_depends_on_rho_only(l in 0.1f64..3.0, mu in -3.0f64..-0.2, z in -1.0f64..1.0, v in -4.0f64..0.5) {
        let m = BoundaryModel::diagonal(&[l], &[mu]).unwrap();
        let y = [C64::new(z, 0.3 * z), C64::new(0.7, v)];
        let b = m.bergman(&y);
        let r = m.bergman_at_rho(m.rho0(&y));
        prop_assert!((b - r).abs() < 1e-10 * r, "{b} vs {r}");
        let (t, var) = m.slope_moments(m.rho0(&y));
        prop_assert!(t > 0.0 && t < m.slope() && var > 0.0);
    }
}
