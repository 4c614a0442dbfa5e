#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zonovol::{invert, RealMatrix, SystemModel};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> RealMatrix {
    let data = (0..rows * cols)
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    RealMatrix::new(rows, cols, data).unwrap()
}

/// Identity plus a modest random perturbation: safely invertible.
pub fn well_conditioned(rng: &mut ChaCha8Rng, n: usize) -> RealMatrix {
    let mut rows = vec![vec![0.0; n]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = if i == j { 1.0 } else { 0.0 } + 0.3 * rng.random_range(-1.0..1.0);
        }
    }
    RealMatrix::from_rows(&rows).unwrap()
}

/// Distinct values in `[lo, hi]`, sorted, at least `gap` apart.
pub fn separated(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64, gap: f64) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(lo..hi)).collect();
        v.sort_by(f64::total_cmp);
        if v.windows(2).all(|w| w[1] - w[0] >= gap) {
            return v;
        }
    }
}

/// `A = T diag(λ) T⁻¹` with the given spectrum and a random input matrix.
pub fn model_with_spectrum(rng: &mut ChaCha8Rng, lambdas: &[f64], r: usize) -> SystemModel {
    let n = lambdas.len();
    let t = well_conditioned(rng, n);
    let a = t
        .mul(&RealMatrix::from_diagonal(lambdas).unwrap())
        .unwrap()
        .mul(&invert(&t).unwrap())
        .unwrap();
    let b = random_matrix(rng, n, r);
    SystemModel::new("random", a, b).unwrap()
}

/// A random model with no spectral structure imposed.
pub fn random_model(rng: &mut ChaCha8Rng, n: usize, r: usize) -> SystemModel {
    let a = random_matrix(rng, n, n);
    let b = random_matrix(rng, n, r);
    SystemModel::new("random", a, b).unwrap()
}

/// Laplace expansion along the first row.
pub fn cofactor_det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    let mut det = 0.0;
    for j in 0..n {
        let minor: Vec<Vec<f64>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, v)| *v)
                    .collect()
            })
            .collect();
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        det += sign * m[0][j] * cofactor_det(&minor);
    }
    det
}

/// Area of the planar zonotope spanned by `gens`, from the convex hull of
/// all `2^m` vertex candidates (monotone chain + shoelace).
pub fn planar_zonotope_area(gens: &[(f64, f64)]) -> f64 {
    let m = gens.len();
    let mut pts: Vec<(f64, f64)> = (0..1usize << m)
        .map(|mask| {
            gens.iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .fold((0.0, 0.0), |(x, y), (_, g)| (x + g.0, y + g.1))
        })
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(f64, f64)>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    let k = hull.len();
    (0..k)
        .map(|i| {
            let (a, b) = (hull[i], hull[(i + 1) % k]);
            a.0 * b.1 - a.1 * b.0
        })
        .sum::<f64>()
        .abs()
        / 2.0
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}
