use std::f64::consts::PI;

use fht::cheb::{self, ChebSeries};
use fht::operators::{self, EngineConfig, Method, Operator, OperatorRequest};
use fht::quad;
use fht::{corpus, Abscissa, FunctionHandle};
use proptest::prelude::*;

fn cheb_t(n: usize, x: f64) -> f64 {
    (n as f64 * x.acos()).cos()
}

fn cheb_u(n: usize, x: f64) -> f64 {
    let th = x.acos();
    ((n + 1) as f64 * th).sin() / th.sin()
}

fn coeffs(max_degree: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 1..=max_degree + 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn recurrence_matches_quadrature(n in 0usize..=30, t in -0.95f64..0.95) {
        let f = ChebSeries::basis(n).to_handle("T_n");
        let oracle = quad::pv_fht(&f, t, 1e-12).unwrap().value;
        prop_assert!((cheb::fht_cheb_rho(n, t).unwrap() - oracle).abs() <= 1e-8);
    }

    #[test]
    fn weighted_basis_pairs(n in 1usize..=20, t in -0.95f64..0.95) {
        let over = FunctionHandle::over_weight("T_n/w", move |p: Abscissa| cheb_t(n, p.value()));
        let v = quad::pv_fht(&over, t, 1e-12).unwrap().value;
        prop_assert!((v - cheb_u(n - 1, t)).abs() <= 1e-9, "T(T_n/w) = U_(n-1)");
        let wu = FunctionHandle::precise("wU_n", move |p: Abscissa| p.weight() * cheb_u(n, p.value()));
        let v = quad::pv_fht(&wu, t, 1e-12).unwrap().value;
        prop_assert!((v + cheb_t(n + 1, t)).abs() <= 1e-9, "T(wU_n) = -T_(n+1)");
    }

    #[test]
    fn series_transform_is_linear(a in coeffs(10), b in coeffs(10), x in -2.0f64..2.0, y in -2.0f64..2.0, t in -0.99f64..0.99) {
        let n = a.len().max(b.len());
        let mut c = vec![0.0; n];
        for (i, v) in a.iter().enumerate() { c[i] += x * v; }
        for (i, v) in b.iter().enumerate() { c[i] += y * v; }
        let sa = ChebSeries::new(a).unwrap();
        let sb = ChebSeries::new(b).unwrap();
        let sc = ChebSeries::new(c).unwrap();
        let lhs = cheb::fht_series(&sc, t).unwrap();
        let rhs = x * cheb::fht_series(&sa, t).unwrap() + y * cheb::fht_series(&sb, t).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12);
    }

    #[test]
    fn fit_reproduces_polynomials(c in coeffs(40), ts in prop::collection::vec(-1.0f64..1.0, 100)) {
        let s = ChebSeries::new(c).unwrap();
        let fitted = cheb::fit(&s.to_handle("p"), 64).unwrap();
        for t in ts {
            prop_assert!((fitted.eval(t).unwrap() - s.eval(t).unwrap()).abs() <= 1e-12);
        }
    }

    #[test]
    fn quadrature_agrees_with_series(c in coeffs(10), t in -0.99f64..0.99) {
        let s = ChebSeries::new(c).unwrap();
        let pv = quad::pv_fht(&s.to_handle("p"), t, 1e-11).unwrap().value;
        prop_assert!((pv - cheb::fht_series(&s, t).unwrap()).abs() <= 1e-8);
    }

    #[test]
    fn inverse_weight_is_annihilated(t in -0.99f64..0.99) {
        let v = quad::pv_fht(&FunctionHandle::inverse_weight(), t, 1e-12).unwrap().value;
        prop_assert!(v.abs() <= 1e-7);
    }

    #[test]
    fn even_functions_vanish_at_the_centre(c in prop::collection::vec(-1.0f64..1.0, 1..6)) {
        let f = FunctionHandle::new("even", move |x| c.iter().enumerate().map(|(k, v)| v * x.powi(2 * k as i32)).sum());
        prop_assert!(quad::pv_fht(&f, 0.0, 1e-12).unwrap().value.abs() <= 1e-12);
    }

    #[test]
    fn transform_is_odd_under_reflection(c in coeffs(8), t in -0.95f64..0.95) {
        let s = ChebSeries::new(c).unwrap();
        let f = s.to_handle("p");
        let g = FunctionHandle::new("p(-x)", move |x| s.eval(-x).unwrap());
        let a = quad::pv_fht(&f, -t, 1e-12).unwrap().value;
        let b = quad::pv_fht(&g, t, 1e-12).unwrap().value;
        prop_assert!((a + b).abs() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn inversion_on_polynomials(c in coeffs(12)) {
        let f = ChebSeries::new(c).unwrap().to_handle("p");
        let (left, right) = fht::verify::inversion_residuals(&f, &[]).unwrap();
        prop_assert!(left <= 1e-7 && right <= 1e-7, "left {left:e}, right {right:e}");
    }

    #[test]
    fn parseval_on_polynomials(a in coeffs(8), b in coeffs(8)) {
        let f = ChebSeries::new(a).unwrap().to_handle("f");
        let g = ChebSeries::new(b).unwrap().to_handle("g");
        let cfg = EngineConfig::auto(1e-11);
        let lhs = quad::integral(&f.product(&operators::t_image(&g, &cfg).unwrap()), 1e-11).unwrap().value;
        let rhs = quad::integral(&g.product(&operators::t_image(&f, &cfg).unwrap()), 1e-11).unwrap().value;
        prop_assert!((lhs + rhs).abs() <= 1e-7);
    }
}

#[test]
fn halving_the_tolerance_never_hurts() {
    let chi = FunctionHandle::chi();
    for t in [-0.9f64, -0.3, 0.05, 0.6, 0.99] {
        let exact = ((1.0 - t) / (1.0 + t)).ln() / PI;
        let mut last = f64::INFINITY;
        let mut tol = 1e-4;
        while tol >= 1e-12 {
            let err = (quad::pv_fht(&chi, t, tol).unwrap().value - exact).abs();
            assert!(err <= last, "t = {t}, tol = {tol}: {err} > {last}");
            last = err;
            tol *= 0.5;
        }
    }
}

#[test]
fn excision_cross_check() {
    let f = fht::expr::parse_function("exp(x)").unwrap();
    for t in [-0.5, 0.2, 0.7] {
        let a = quad::pv_fht(&f, t, 1e-12).unwrap().value;
        let b = quad::pv_fht_excision(&f, t, 1e-6, 1e-12).unwrap().value;
        assert!((a - b).abs() <= 1e-5, "t = {t}: {a} vs {b}");
    }
}

#[test]
fn engines_agree_on_smooth_corpus() {
    let points: Vec<f64> = (0..20).map(|i| -0.95 + 0.1 * i as f64).collect();
    let mut checked = 0;
    for e in corpus::CORPUS {
        let f = e.handle();
        if !f.tag().is_smooth() {
            continue;
        }
        let run = |m: Method| {
            let req = OperatorRequest::new(Operator::T, f.clone()).points(points.clone()).method(m).tol(1e-11);
            operators::apply(&req).unwrap().values
        };
        let (s, q) = (run(Method::Spectral), run(Method::Quadrature));
        for ((t, a), (_, b)) in s.iter().zip(&q) {
            assert!((a - b).abs() <= 1e-7, "{} at {t}: {a} vs {b}", e.id);
        }
        checked += 1;
    }
    assert!(checked >= 10);
}

#[test]
fn projection_identities() {
    let cfg = EngineConfig::auto(1e-11);
    for e in corpus::bounded_entries() {
        let f = e.handle();
        let q = operators::apply_q(&f, 1e-12).unwrap();
        let qq = operators::apply_q(&FunctionHandle::constant(q), 1e-12).unwrap();
        assert!((qq - q).abs() <= 1e-10, "{}: Q(Q(f) chi) = {qq}, Q(f) = {q}", e.id);
        let tc = operators::t_check_image(&FunctionHandle::constant(q), &cfg).unwrap();
        for t in [-0.7, 0.1, 0.8] {
            assert!(tc.eval(t).abs() <= 1e-8, "{}: Tcheck(Q chi)({t}) = {}", e.id, tc.eval(t));
        }
    }
}

#[test]
fn jump_transform_of_half_indicator() {
    // Tcheck(chi_[0,1))(t) = -(1/pi) log((1 + w(t)) / |t|)
    let half = fht::expr::parse_function("chi(0, 1)").unwrap();
    let tc = operators::t_check_image(&half, &EngineConfig::auto(1e-12)).unwrap();
    for t in [-0.9, -0.4, -0.01, 0.02, 0.5, 0.95] {
        let w = (1.0f64 - t * t).sqrt();
        let exact = -((1.0 + w) / t.abs()).ln() / PI;
        assert!((tc.eval(t) - exact).abs() <= 1e-9, "t = {t}: {} vs {exact}", tc.eval(t));
    }
}
