//! Eigenvalue-agnostic volume engines: determinant enumeration over all
//! `n`-subsets of generators, and the second-order recursion in the horizon
//! that only enumerates tuples touching both the first and the newest block.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::combinatorics::{binomial, cross, TupleSet};
use crate::error::{Error, Result};
use crate::linalg::{
    controllability_matrix, det_in_place, determinant, rank, RealMatrix, SystemModel,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Exact,
    Recursive,
    Spectral,
    Analytic,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Exact,
        Method::Recursive,
        Method::Spectral,
        Method::Analytic,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Recursive => "recursive",
            Method::Spectral => "spectral",
            Method::Analytic => "analytic",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidQuery(format!("unknown method '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Horizon {
    Finite(usize),
    Infinite,
}

impl fmt::Display for Horizon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Horizon::Finite(n) => write!(f, "{n}"),
            Horizon::Infinite => f.write_str("inf"),
        }
    }
}

/// A computed volume together with the operation counters that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeResult {
    pub volume: f64,
    pub method: Method,
    pub horizon: Horizon,
    /// Number of `n x n` determinant evaluations.
    pub det_count: u64,
    /// Number of multiplications in the spectral recursion or closed form.
    pub mult_count: u64,
    pub notes: Vec<String>,
}

impl VolumeResult {
    pub(crate) fn new(method: Method, horizon: Horizon) -> Self {
        VolumeResult {
            volume: 0.0,
            method,
            horizon,
            det_count: 0,
            mult_count: 0,
            notes: Vec::new(),
        }
    }

    pub(crate) fn note(mut self, msg: impl Into<String>) -> Self {
        self.notes.push(msg.into());
        self
    }

    pub(crate) fn scaled(mut self, factor: f64) -> Self {
        self.volume *= factor;
        self
    }
}

/// Neumaier's compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: CompensatedSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Generators stored column-major so each one is a contiguous `n`-slice.
struct Generators<'a> {
    cols: &'a [f64],
    n: usize,
}

impl Generators<'_> {
    /// `|det [z_{t_1}, ..., z_{t_n}]|` for 1-based labels `t`.
    #[inline]
    fn abs_det(&self, labels: &[usize], scratch: &mut [f64]) -> f64 {
        let n = self.n;
        // det(M) = det(Mᵀ): lay generators out as rows.
        for (row, &label) in labels.iter().enumerate() {
            let c = (label - 1) * n;
            scratch[row * n..(row + 1) * n].copy_from_slice(&self.cols[c..c + n]);
        }
        det_in_place(scratch, n).abs()
    }

    /// Σ|det| over every `n`-tuple of the first `m` generators, split by
    /// leading label across threads and reduced in label order.
    fn enumerate_sum(&self, m: usize) -> (CompensatedSum, u64) {
        let n = self.n;
        let set = TupleSet::omega(n, m);
        let parts: Vec<(CompensatedSum, u64)> = set
            .split_by_leading()
            .into_par_iter()
            .map(|(lead, rest)| {
                let mut scratch = vec![0.0; n * n];
                let mut labels = vec![lead; n];
                let mut acc = CompensatedSum::default();
                let mut count = 0u64;
                let mut it = rest.enumerate();
                while let Some(t) = it.advance() {
                    labels[1..].copy_from_slice(t);
                    acc.add(self.abs_det(&labels, &mut scratch));
                    count += 1;
                }
                (acc, count)
            })
            .collect();
        let mut total = CompensatedSum::default();
        let mut count = 0;
        for (s, c) in parts {
            total.merge(s);
            count += c;
        }
        (total, count)
    }
}

/// Volume of the zonotope `{Σ c_i z_i : c_i ∈ [0, 1]}` spanned by the
/// columns of `z`, as the sum of `|det|` over all `n`-subsets of columns.
///
/// A rank-deficient `z` spans a flat zonotope: the result is 0 with a note
/// and no determinants are evaluated.
pub fn volume_exact(z: &RealMatrix) -> VolumeResult {
    volume_exact_at(z, Horizon::Finite(z.cols()))
}

fn volume_exact_at(z: &RealMatrix, horizon: Horizon) -> VolumeResult {
    let n = z.rows();
    let m = z.cols();
    let res = VolumeResult::new(Method::Exact, horizon);
    let q = rank(z);
    if q < n {
        return res.note(format!(
            "rank-deficient: {n}x{m} generator matrix has rank {q} < {n}"
        ));
    }
    // The volume depends only on the multiset of generators; a canonical
    // column order makes the floating-point result independent of input order.
    let colmajor = z.to_column_major();
    let mut gens: Vec<&[f64]> = colmajor.chunks(n).collect();
    gens.sort_by(|a, b| {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let cols: Vec<f64> = gens.concat();
    let (sum, count) = Generators { cols: &cols, n }.enumerate_sum(m);
    debug_assert_eq!(count, binomial(m as u64, n as u64));
    VolumeResult {
        volume: sum.value(),
        det_count: count,
        ..res
    }
}

/// Exact volume of the zonotope generated by `{A, B}` over `horizon` steps.
pub fn volume_exact_model(model: &SystemModel, horizon: usize) -> Result<VolumeResult> {
    let p = controllability_matrix(model, horizon)?;
    Ok(volume_exact_at(&p, Horizon::Finite(horizon)))
}

/// Smallest horizon whose controllability matrix has at least `n` columns.
pub fn first_full_horizon(n: usize, r: usize) -> usize {
    n.div_ceil(r)
}

/// Volume of the zonotope generated by `{A, B}` via the horizon recursion
///
/// `V(N) = (1 + |det A|) V(N-1) - |det A| V(N-2) + Σ |det Ψ|`,
///
/// where the last sum runs over tuples taking `j ≥ 1` labels from the first
/// block, `k ≥ 1` from the newest block, and the rest from the blocks in
/// between. The two seeds `V(N₀)` and `V(N₀+1)`, with `N₀ = ⌈n/r⌉`, come
/// from full enumeration and count toward `det_count`.
pub fn volume_recursive(model: &SystemModel, horizon: usize) -> Result<VolumeResult> {
    if horizon == 0 {
        return Err(Error::EmptyHorizon);
    }
    let n = model.n();
    let r = model.r();
    let mut res = VolumeResult::new(Method::Recursive, Horizon::Finite(horizon));
    let n0 = first_full_horizon(n, r);
    if horizon < n0 {
        return Ok(res.note(format!(
            "rank-deficient: {} generators cannot span {n} dimensions",
            r * horizon
        )));
    }

    let p = controllability_matrix(model, horizon)?;
    let cols = p.to_column_major();
    let gens = Generators { cols: &cols, n };
    let det_a = determinant(model.a())?.abs();

    let (seed0, c0) = gens.enumerate_sum(r * n0);
    res.det_count += c0;
    if horizon == n0 {
        res.volume = seed0.value().max(0.0);
        return Ok(res);
    }
    let (seed1, c1) = gens.enumerate_sum(r * (n0 + 1));
    res.det_count += c1;

    let mut prev2 = seed0.value();
    let mut prev1 = seed1.value();
    let mut scratch = vec![0.0; n * n];
    for step in n0 + 2..=horizon {
        let mut cross_sum = CompensatedSum::default();
        for j in 1..=r {
            for k in 1..=r {
                let mid = n as isize - j as isize - k as isize;
                if mid < 0 {
                    continue;
                }
                let parts = [
                    TupleSet::theta(j as isize, 0, 0, r),
                    TupleSet::theta(mid, 1, step as isize - 2, r),
                    TupleSet::theta(k as isize, step - 1, step as isize - 1, r),
                ];
                let mut it = cross(&parts)?;
                while let Some(t) = it.advance() {
                    cross_sum.add(gens.abs_det(t, &mut scratch));
                    res.det_count += 1;
                }
            }
        }
        let next = (1.0 + det_a) * prev1 - det_a * prev2 + cross_sum.value();
        prev2 = prev1;
        prev1 = next;
    }
    res.volume = prev1.max(0.0);
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square() {
        let r = volume_exact(&RealMatrix::identity(2));
        assert_eq!(r.volume, 1.0);
        assert_eq!(r.det_count, 1);
    }

    #[test]
    fn hexagon() {
        let z = RealMatrix::from_rows(&[[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]]).unwrap();
        let r = volume_exact(&z);
        assert_eq!(r.volume, 3.0);
        assert_eq!(r.det_count, 3);
    }

    #[test]
    fn flat_zonotope_is_zero() {
        let z = RealMatrix::from_rows(&[[1.0, 2.0, 3.0], [2.0, 4.0, 6.0]]).unwrap();
        let r = volume_exact(&z);
        assert_eq!(r.volume, 0.0);
        assert_eq!(r.det_count, 0);
        assert!(r.notes[0].contains("rank-deficient"));
        let thin = RealMatrix::column_vector(&[1.0, 1.0]).unwrap();
        assert_eq!(volume_exact(&thin).volume, 0.0);
    }

    #[test]
    fn recursive_short_horizon_is_flat() {
        let a = RealMatrix::identity(3);
        let b = RealMatrix::column_vector(&[1.0, 0.0, 0.0]).unwrap();
        let m = SystemModel::new("t", a, b).unwrap();
        let r = volume_recursive(&m, 2).unwrap();
        assert_eq!(r.volume, 0.0);
        assert!(!r.notes.is_empty());
        assert!(matches!(volume_recursive(&m, 0), Err(Error::EmptyHorizon)));
    }

    #[test]
    fn scalar_interval() {
        // A = 1, B = 1: the zonotope is [0, N].
        let m = SystemModel::new("s", RealMatrix::identity(1), RealMatrix::identity(1)).unwrap();
        for n in 1..8 {
            assert_eq!(volume_recursive(&m, n).unwrap().volume, n as f64);
        }
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1e16);
        for _ in 0..10 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 10.0);
    }

    #[test]
    fn method_parse() {
        assert_eq!("spectral".parse::<Method>().unwrap(), Method::Spectral);
        assert!("fast".parse::<Method>().is_err());
    }
}
