use fht::norms::{self, StepRearrangement};
use fht::{corpus, expr, FunctionHandle};
use proptest::prelude::*;

/// Piecewise inputs shared by the brute-force equimeasurability checks.
pub const PIECEWISE: [&str; 10] = [
    "chi(-1, 1)",
    "chi(-0.3, 0.4)",
    "2*chi(-1, -0.5) - 0.5*chi(0.1, 0.9)",
    "x",
    "x^2 - 0.5",
    "abs(x - 0.3)",
    "chi(0, 1)*exp(x) - chi(-1, 0)*x",
    "sin(3*x)",
    "chi(-0.9, -0.2)*(1 + x) + 3*chi(0.5, 0.6)",
    "(x + abs(x))/2",
];

/// `|{ |f| > lambda }|` by counting on a uniform midpoint grid.
fn brute_distribution(f: &FunctionHandle, lambda: f64, n: usize) -> f64 {
    let h = 2.0 / n as f64;
    (0..n).filter(|&i| f.eval(-1.0 + (i as f64 + 0.5) * h).abs() > lambda).count() as f64 * h
}

#[test]
fn equimeasurable_with_brute_force_counting() {
    let n = 400_000;
    for src in PIECEWISE {
        let f = expr::parse_function(src).unwrap();
        let r = norms::rearrange(&f, norms::DEFAULT_GRID).unwrap();
        let top = r.value(0.0);
        for k in 0..=20 {
            let lambda = top * k as f64 / 21.0;
            let got = r.distribution(lambda);
            let want = brute_distribution(&f, lambda, n);
            assert!((got - want).abs() <= 2e-3, "{src}, lambda = {lambda}: {got} vs {want}");
        }
    }
}

fn all_norms(r: &StepRearrangement, alpha: f64) -> [f64; 3] {
    [norms::norm_lexp(r, alpha), norms::norm_lexp_equiv(r, alpha), norms::norm_llogl(r, alpha)]
}

#[test]
fn lattice_monotonicity() {
    let pairs = [
        ("x^2", "x"),
        ("chi(0, 0.5)", "chi(-0.2, 0.7)"),
        ("0.5*sin(3*x)", "chi(-1, 1)"),
        ("x*abs(x)", "abs(x)"),
        ("log(1 + x/2)", "log((1 - x)/(1 + x))"),
    ];
    for (small, big) in pairs {
        let g = norms::rearrange(&expr::parse_function(small).unwrap(), norms::DEFAULT_GRID).unwrap();
        let f = norms::rearrange(&expr::parse_function(big).unwrap(), norms::DEFAULT_GRID).unwrap();
        for i in 0..2000 {
            let s = 2.0 * (i as f64 + 0.5) / 2000.0;
            assert!(g.value(s) <= f.value(s) + 1e-12, "{small} vs {big} at s = {s}");
        }
        for alpha in [0.5, 1.0, 2.0] {
            let (a, b) = (all_norms(&g, alpha), all_norms(&f, alpha));
            for k in 0..3 {
                assert!(a[k] <= b[k] * (1.0 + 1e-12), "{small} vs {big}, alpha {alpha}, norm {k}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn norms_are_homogeneous(idx in 0usize..10, c in -50.0f64..50.0, alpha in 0.0f64..3.0) {
        let f = expr::parse_function(PIECEWISE[idx]).unwrap();
        let r = norms::rearrange(&f, 512).unwrap();
        let a = all_norms(&r.scaled(c), alpha);
        let b = all_norms(&r, alpha);
        for k in 0..3 {
            prop_assert!((a[k] - c.abs() * b[k]).abs() <= 1e-12 * (1.0 + a[k].abs()));
        }
    }

    #[test]
    fn rearranging_a_multiple(idx in 0usize..10, c in 0.1f64..10.0) {
        let f = expr::parse_function(PIECEWISE[idx]).unwrap();
        let r1 = norms::rearrange(&f.scaled(c), 512).unwrap();
        let r2 = norms::rearrange(&f, 512).unwrap().scaled(c);
        prop_assert!((norms::norm_lexp(&r1, 1.0) - norms::norm_lexp(&r2, 1.0)).abs() <= 1e-12 * c);
    }
}

#[test]
fn equivalent_norm_bracket_on_corpus() {
    for e in corpus::CORPUS {
        let r = norms::rearrange(&e.handle(), norms::DEFAULT_GRID).unwrap();
        let (p, q) = (norms::norm_lexp(&r, 1.0), norms::norm_lexp_equiv(&r, 1.0));
        if p == 0.0 {
            continue;
        }
        let ratio = q / p;
        assert!((0.125..=8.0).contains(&ratio), "{}: {ratio}", e.id);
    }
}

#[test]
fn llogl_nesting_in_alpha() {
    for e in corpus::CORPUS {
        let r = norms::rearrange(&e.handle(), norms::DEFAULT_GRID).unwrap();
        let mut last = 0.0;
        for alpha in [0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0] {
            let v = norms::norm_llogl(&r, alpha);
            assert!(v >= last * (1.0 - 1e-12), "{}: alpha {alpha}: {v} < {last}", e.id);
            last = v;
        }
    }
}

#[test]
fn chi_has_unit_exp_norm() {
    let r = norms::rearrange(&FunctionHandle::chi(), norms::DEFAULT_GRID).unwrap();
    assert!((norms::norm_lexp(&r, 1.0) - 1.0).abs() <= 1e-10);
    assert!((norms::norm_lexp_equiv(&r, 1.0) - 1.0).abs() <= 1e-10);
    // int_0^2 log(2e/t) dt = 2 log(e) + 2 = 4
    assert!((norms::norm_llogl(&r, 1.0) - 4.0).abs() <= 1e-12);
}

#[test]
fn sampled_input_matches_expression() {
    let xs: Vec<f64> = (1..4000).map(|i| -1.0 + i as f64 / 2000.0).collect();
    let ys: Vec<f64> = xs.iter().map(|x| x * x * x).collect();
    let r = norms::rearrange_samples(&xs, &ys).unwrap();
    let exact = norms::rearrange(&expr::parse_function("x^3").unwrap(), norms::DEFAULT_GRID).unwrap();
    assert!((norms::norm_lexp(&r, 1.0) - norms::norm_lexp(&exact, 1.0)).abs() <= 2e-3);
}

#[test]
fn csv_reader_rejects_bad_input() {
    let ok = "x,value\n-0.5,1\n0.5,2\n";
    assert!(norms::read_samples(ok.as_bytes()).is_ok());
    for bad in [
        "a,b\n0,1\n",
        "x,value\n0.5,1\n-0.5,2\n",
        "x,value\n1.5,1\n",
        "x,value\n0.1,abc\n",
    ] {
        assert!(norms::read_samples(bad.as_bytes()).is_err(), "{bad:?}");
    }
}
