mod common;

use common::*;
use zonovol::{
    binomial, builtin, controllable_volume, controllable_volume_infinite,
    controllable_volume_inverse_pair, determinant, reachable_volume, Method, MethodChoice,
};

const FINITE: [Method; 3] = [Method::Exact, Method::Recursive, Method::Spectral];

fn sig4(x: f64, expect: f64) -> bool {
    rel_err(x, expect) < 5e-4
}

#[test]
fn ex1_reachable_rows() {
    let m = builtin::ex1();
    for (h, v) in [(100, 4.622e9), (200, 1.162e11), (300, 8.015e11)] {
        for method in [Method::Recursive, Method::Spectral] {
            let got = reachable_volume(&m, h, method.into()).unwrap().volume;
            assert!(sig4(got, v), "{method} N={h}: {got:e}");
        }
    }
    let exact = reachable_volume(&m, 100, Method::Exact.into()).unwrap();
    assert!(sig4(exact.volume, 4.622e9));
    assert_eq!(exact.det_count, 161_700);
}

#[test]
fn ex2_controllable_rows() {
    let m = builtin::ex2();
    for (h, v) in [
        (50, 2.388e8),
        (100, 7.495e8),
        (200, 8.846e8),
        (400, 8.874e8),
    ] {
        let got = controllable_volume(&m, h, Method::Spectral.into())
            .unwrap()
            .volume;
        assert!(sig4(got, v), "N={h}: {got:e}");
    }
    let rec = controllable_volume(&m, 50, Method::Recursive.into()).unwrap();
    assert!(sig4(rec.volume, 2.388e8));
    // seeds C(4,4) + C(5,4), then C(k-2, 2) at every step k from 6
    let cross: u64 = (6..=50u64).map(|k| binomial(k - 2, 2)).sum();
    assert_eq!(rec.det_count, 1 + 5 + cross);
    assert_eq!(format!("{:.3e}", rec.det_count as f64), "1.843e4");
}

#[test]
fn ex2_recursive_long_horizons() {
    let m = builtin::ex2();
    let limit = controllable_volume_infinite(&m).unwrap().volume;
    for (h, v) in [
        (250, 8.871e8),
        (300, 8.874e8),
        (350, 8.874e8),
        (400, 8.874e8),
    ] {
        let rec = controllable_volume(&m, h, Method::Recursive.into())
            .unwrap()
            .volume;
        let spectral = controllable_volume(&m, h, Method::Spectral.into())
            .unwrap()
            .volume;
        assert!(sig4(rec, v), "N={h}: {rec:e}");
        assert!(
            rel_err(rec, spectral) < 1e-8,
            "N={h}: {rec:e} vs {spectral:e}"
        );
        assert!(rec <= limit * (1.0 + 1e-9));
    }
}

#[test]
fn ex2_infinite() {
    let r = controllable_volume_infinite(&builtin::ex2()).unwrap();
    assert!(sig4(r.volume, 8.874e8), "{:e}", r.volume);
    assert_eq!(r.mult_count, 26);
    for h in [350, 400] {
        let fin = controllable_volume(&builtin::ex2(), h, MethodChoice::Auto)
            .unwrap()
            .volume;
        assert_eq!(format!("{fin:.3e}"), format!("{:.3e}", r.volume));
    }
}

#[test]
fn controllable_routes_agree() {
    let mut rng = rng(21);
    for n in 1..=4 {
        for r in 1..=2 {
            let model = random_model(&mut rng, n, r);
            if determinant(model.a()).unwrap().abs() < 0.05 {
                continue;
            }
            for h in 1..=10 {
                let det = determinant(model.a()).unwrap().abs();
                let a = reachable_volume(&model, h, Method::Exact.into())
                    .unwrap()
                    .volume
                    / det.powi(h as i32);
                let b = controllable_volume_inverse_pair(&model, h, Method::Exact.into())
                    .unwrap()
                    .volume;
                assert!(
                    rel_err(a, b) < 1e-8 || a.max(b) < 1e-300,
                    "n={n} r={r} N={h}: {a} vs {b}"
                );
            }
        }
    }
}

#[test]
fn controllable_volume_bounded_by_infinite() {
    let mut rng = rng(22);
    for n in 1..=4 {
        let lambdas = separated(&mut rng, n, 1.1, 2.5, 0.1);
        let model = model_with_spectrum(&mut rng, &lambdas, 1);
        let inf = controllable_volume_infinite(&model).unwrap().volume;
        let mut prev = 0.0;
        for h in 1..=60 {
            let v = controllable_volume(&model, h, MethodChoice::Auto)
                .unwrap()
                .volume;
            assert!(v >= prev * (1.0 - 1e-12));
            assert!(v <= inf * (1.0 + 1e-8), "N={h}: {v} > {inf}");
            prev = v;
        }
        let far = controllable_volume(&model, 400, MethodChoice::Auto)
            .unwrap()
            .volume;
        assert!(rel_err(far, inf) < 1e-6, "{far} vs {inf}");
    }
    let ex2 = builtin::ex2();
    let inf = controllable_volume_infinite(&ex2).unwrap().volume;
    let mut prev = 0.0;
    for h in (50..=400).step_by(50) {
        let v = controllable_volume(&ex2, h, Method::Spectral.into())
            .unwrap()
            .volume;
        assert!(v >= prev && v <= inf * (1.0 + 1e-8));
        prev = v;
    }
}

#[test]
fn reachable_volume_scales_under_similarity() {
    let mut rng = rng(23);
    for n in 1..=4 {
        let model = random_model(&mut rng, n, 1);
        let t = well_conditioned(&mut rng, n);
        let moved = model.transformed(&t).unwrap();
        let det_t = determinant(&t).unwrap().abs();
        for h in [n, n + 3, 8] {
            let base = reachable_volume(&model, h, Method::Exact.into())
                .unwrap()
                .volume;
            let got = reachable_volume(&moved, h, Method::Exact.into())
                .unwrap()
                .volume;
            assert!(rel_err(got, det_t * base) < 1e-8);
        }
    }
}

#[test]
fn methods_agree_on_random_models() {
    let mut rng = rng(24);
    for n in 2..=4 {
        let lambdas = separated(&mut rng, n, 0.3, 1.3, 0.1);
        let model = model_with_spectrum(&mut rng, &lambdas, 1);
        let vals: Vec<f64> = FINITE
            .iter()
            .map(|&m| reachable_volume(&model, 8, m.into()).unwrap().volume)
            .collect();
        assert!(
            rel_err(vals[0], vals[1]) < 1e-8 && rel_err(vals[0], vals[2]) < 1e-8,
            "{vals:?}"
        );
    }
}
