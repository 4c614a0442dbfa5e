mod common;

use common::*;
use proptest::prelude::*;
use zonovol::linalg::{rank, RECONSTRUCTION_TOL};
use zonovol::{
    builtin, controllability_matrix, determinant, eig_real_distinct, invert, RealMatrix,
};

#[test]
fn determinant_matches_cofactor_oracle() {
    let mut rng = rng(7);
    for _ in 0..50 {
        let m = random_matrix(&mut rng, 5, 5);
        let oracle = cofactor_det(&m.to_rows());
        let got = determinant(&m).unwrap();
        assert!(rel_err(got, oracle) < 1e-12, "{got} vs {oracle}");
    }
}

#[test]
fn determinant_is_deterministic() {
    let mut rng = rng(8);
    let m = random_matrix(&mut rng, 6, 6);
    let a = determinant(&m).unwrap();
    let b = determinant(&m).unwrap();
    assert_eq!(a.to_bits(), b.to_bits());
}

#[test]
fn invert_reconstructs_identity() {
    let mut rng = rng(9);
    for n in 1..=6 {
        let m = well_conditioned(&mut rng, n);
        let prod = m.mul(&invert(&m).unwrap()).unwrap();
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((prod[(i, j)] - target).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn ex2_determinant_is_eigenvalue_product() {
    let det = determinant(builtin::ex2().a()).unwrap().abs();
    let product = 1.2049 * 1.1589 * 1.0755 * 1.0407;
    assert!(rel_err(det, product) < 1e-4, "{det} vs {product}");
    assert!((det - 1.5629).abs() < 1e-12);
}

#[test]
fn ex1_eigenvalues() {
    let s = eig_real_distinct(builtin::ex1().a(), None).unwrap();
    for (got, want) in s.eigenvalues.iter().zip([0.9517, 1.0000, 1.0083]) {
        assert!((got - want).abs() < 5e-5, "{got} vs {want}");
    }
}

#[test]
fn ex2_eigenvalues() {
    let s = eig_real_distinct(builtin::ex2().a(), None).unwrap();
    for (got, want) in s.eigenvalues.iter().zip([1.0407, 1.0755, 1.1589, 1.2049]) {
        assert!((got - want).abs() < 5e-5, "{got} vs {want}");
    }
}

#[test]
fn ex1_controllability_two_steps() {
    let p = controllability_matrix(&builtin::ex1(), 2).unwrap();
    assert_eq!(p.column(0), vec![0.0, 0.0, 1.0]);
    assert_eq!(p.column(1), vec![0.0, 1.0, 2.96]);
}

#[test]
fn ex2_is_controllable() {
    let p = controllability_matrix(&builtin::ex2(), 4).unwrap();
    assert_eq!(rank(&p), 4);
}

#[test]
fn eigenvector_convention() {
    let s = eig_real_distinct(builtin::ex2().a(), None).unwrap();
    for j in 0..4 {
        let v = s.w_inv.column(j);
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
        assert!(v.iter().find(|x| x.abs() > 1e-14).unwrap() > &0.0);
    }
    assert!(s.det_w_abs > 0.0);
}

fn square(n: usize) -> impl Strategy<Value = RealMatrix> {
    prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |d| RealMatrix::new(n, n, d).unwrap())
}

fn conditioned(n: usize) -> impl Strategy<Value = RealMatrix> {
    prop::collection::vec(-0.3f64..0.3, n * n).prop_map(move |mut d| {
        for i in 0..n {
            d[i * n + i] += 1.0;
        }
        RealMatrix::new(n, n, d).unwrap()
    })
}

proptest! {
    #[test]
    fn determinant_is_multiplicative(
        (m, k) in (2usize..=6).prop_flat_map(|n| (conditioned(n), conditioned(n)))
    ) {
        let lhs = determinant(&m.mul(&k).unwrap()).unwrap();
        let rhs = determinant(&m).unwrap() * determinant(&k).unwrap();
        prop_assert!(rel_err(lhs, rhs) < 1e-10, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn determinant_of_transpose(m in (2usize..=6).prop_flat_map(square)) {
        let a = determinant(&m).unwrap();
        let b = determinant(&m.transpose()).unwrap();
        // absolute floor for nearly singular draws
        prop_assert!(rel_err(a, b) < 1e-12 || (a - b).abs() < 1e-14, "{} vs {}", a, b);
    }

    #[test]
    fn spectrum_reconstructs(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = rng(seed);
        let lambdas = separated(&mut rng, n, 0.1, 2.0, 0.05);
        let model = model_with_spectrum(&mut rng, &lambdas, 1);
        let a = model.a();
        let s = eig_real_distinct(a, None).unwrap();
        let recon = s.w.mul(a).unwrap().mul(&s.w_inv).unwrap();
        for i in 0..n {
            prop_assert!((s.eigenvalues[i] - lambdas[i]).abs() < 1e-9);
            for j in 0..n {
                let target = if i == j { s.eigenvalues[i] } else { 0.0 };
                prop_assert!((recon[(i, j)] - target).abs() < RECONSTRUCTION_TOL * a.max_abs());
            }
        }
    }

    #[test]
    fn controllability_extends_by_one_block(seed in any::<u64>(), n in 1usize..=4, r in 1usize..=2, horizon in 1usize..=8) {
        let mut rng = rng(seed);
        let model = random_model(&mut rng, n, r);
        let short = controllability_matrix(&model, horizon).unwrap();
        let long = controllability_matrix(&model, horizon + 1).unwrap();
        prop_assert_eq!(long.cols(), short.cols() + r);
        prop_assert_eq!(&long.columns(0, short.cols()).unwrap(), &short);
        let tail = short.columns(short.cols() - r, short.cols()).unwrap();
        let next = model.a().mul(&tail).unwrap();
        prop_assert_eq!(&long.columns(short.cols(), long.cols()).unwrap(), &next);
    }
}
