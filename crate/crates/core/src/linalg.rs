//! Dense real linear algebra used by the volume engines.
//!
//! Matrices here are small (the state dimension rarely exceeds a handful),
//! but determinants are evaluated millions of times, so the hot kernel
//! [`det_in_place`] works on a caller-owned scratch buffer and never
//! allocates.

use std::fmt;
use std::ops::Index;

use nalgebra::DMatrix;

use crate::error::{Error, Result, SpectralReason};

/// `invert` refuses matrices whose determinant magnitude is at or below this.
pub const SINGULARITY_TOL: f64 = 1e-300;

/// Relative threshold on singular values for the numerical rank.
pub const RANK_TOL: f64 = 1e-10;

/// Relative factor for the default eigenvalue separation (`1e-9 * max|λ|`).
pub const DEFAULT_SEPARATION_FACTOR: f64 = 1e-9;

/// Reconstruction tolerance for `W A W⁻¹ = diag(λ)`, relative to `max|A|`.
pub const RECONSTRUCTION_TOL: f64 = 1e-8;

/// Dense row-major matrix of finite `f64` values.
#[derive(Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!(
                "matrix must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: k / cols,
                col: k % cols,
            });
        }
        Ok(RealMatrix { rows, cols, data })
    }

    /// Builds a matrix from row vectors; all rows must have the same length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != ncols {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {ncols}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        RealMatrix::new(nrows, ncols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix must be at least 1x1");
        RealMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RealMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut data = vec![0.0; n * n];
        for (i, d) in diag.iter().enumerate() {
            data[i * n + i] = *d;
        }
        RealMatrix::new(n, n, data)
    }

    /// Column vector from a slice.
    pub fn column_vector(v: &[f64]) -> Result<Self> {
        RealMatrix::new(v.len(), 1, v.to_vec())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn transpose(&self) -> RealMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self[(i, j)]);
            }
        }
        RealMatrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn mul(&self, other: &RealMatrix) -> Result<RealMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut data = vec![0.0; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let out = &mut data[i * other.cols..(i + 1) * other.cols];
                for (o, b) in out.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        RealMatrix::new(self.rows, other.cols, data)
    }

    pub fn scale(&self, s: f64) -> Result<RealMatrix> {
        RealMatrix::new(
            self.rows,
            self.cols,
            self.data.iter().map(|v| v * s).collect(),
        )
    }

    /// Stacks `blocks` side by side.
    pub fn hstack(blocks: &[RealMatrix]) -> Result<RealMatrix> {
        let Some(first) = blocks.first() else {
            return Err(Error::Dimension("nothing to stack".into()));
        };
        let rows = first.rows;
        if let Some(b) = blocks.iter().find(|b| b.rows != rows) {
            return Err(Error::Dimension(format!(
                "cannot stack a {}-row block next to {rows}-row blocks",
                b.rows
            )));
        }
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for b in blocks {
                data.extend_from_slice(b.row(i));
            }
        }
        RealMatrix::new(rows, cols, data)
    }

    /// Columns `start..end` as a new matrix.
    pub fn columns(&self, start: usize, end: usize) -> Result<RealMatrix> {
        if start >= end || end > self.cols {
            return Err(Error::Dimension(format!(
                "column range {start}..{end} outside 0..{}",
                self.cols
            )));
        }
        let mut data = Vec::with_capacity(self.rows * (end - start));
        for i in 0..self.rows {
            data.extend_from_slice(&self.row(i)[start..end]);
        }
        RealMatrix::new(self.rows, end - start, data)
    }

    /// Entries in column-major order; generator columns become contiguous.
    pub fn to_column_major(&self) -> Vec<f64> {
        self.transpose().data
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        &self.data[i * self.cols + j]
    }
}

impl fmt::Debug for RealMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RealMatrix {}x{} ", self.rows, self.cols)?;
        f.debug_list()
            .entries((0..self.rows).map(|i| self.row(i)))
            .finish()
    }
}

/// LU determinant of the `n x n` row-major matrix in `a`, destroying `a`.
///
/// Partial pivoting picks the first row holding the largest magnitude in the
/// pivot column, so identical input always produces identical output.
pub fn det_in_place(a: &mut [f64], n: usize) -> f64 {
    debug_assert_eq!(a.len(), n * n);
    let mut det = 1.0;
    for k in 0..n {
        let mut piv = k;
        let mut best = a[k * n + k].abs();
        for i in k + 1..n {
            let v = a[i * n + k].abs();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if piv != k {
            for j in k..n {
                a.swap(k * n + j, piv * n + j);
            }
            det = -det;
        }
        let p = a[k * n + k];
        det *= p;
        for i in k + 1..n {
            let f = a[i * n + k] / p;
            if f == 0.0 {
                continue;
            }
            for j in k + 1..n {
                a[i * n + j] -= f * a[k * n + j];
            }
        }
    }
    det
}

pub fn determinant(m: &RealMatrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "determinant of a non-square {}x{} matrix",
            m.rows, m.cols
        )));
    }
    let mut scratch = m.data.clone();
    Ok(det_in_place(&mut scratch, m.rows))
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
pub fn invert(m: &RealMatrix) -> Result<RealMatrix> {
    let det = determinant(m)?;
    if det.abs() <= SINGULARITY_TOL {
        return Err(Error::Singular { det });
    }
    let n = m.rows;
    let mut a = m.data.clone();
    let mut inv = RealMatrix::identity(n).data;
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&x, &y| a[x * n + k].abs().total_cmp(&a[y * n + k].abs()))
            .unwrap_or(k);
        if piv != k {
            for j in 0..n {
                a.swap(k * n + j, piv * n + j);
                inv.swap(k * n + j, piv * n + j);
            }
        }
        let p = a[k * n + k];
        if p == 0.0 {
            return Err(Error::Singular { det });
        }
        for j in 0..n {
            a[k * n + j] /= p;
            inv[k * n + j] /= p;
        }
        for i in 0..n {
            if i == k {
                continue;
            }
            let f = a[i * n + k];
            if f == 0.0 {
                continue;
            }
            for j in 0..n {
                a[i * n + j] -= f * a[k * n + j];
                inv[i * n + j] -= f * inv[k * n + j];
            }
        }
    }
    RealMatrix::new(n, n, inv)
}

/// Numerical rank: singular values at or below `RANK_TOL * σ_max` count as zero.
pub fn rank(m: &RealMatrix) -> usize {
    let sv = m.to_nalgebra().singular_values();
    let smax = sv.iter().fold(0.0_f64, |a, &b| a.max(b));
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * smax).count()
}

/// The generator pair `{A, B}` of a discrete-time system `x' = A x + B u`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemModel {
    pub name: String,
    a: RealMatrix,
    b: RealMatrix,
}

impl SystemModel {
    pub fn new(name: impl Into<String>, a: RealMatrix, b: RealMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension(format!(
                "A must be square, got {}x{}",
                a.rows, a.cols
            )));
        }
        if b.rows != a.rows {
            return Err(Error::Dimension(format!(
                "B has {} rows but A is {}x{}",
                b.rows, a.rows, a.cols
            )));
        }
        Ok(SystemModel {
            name: name.into(),
            a,
            b,
        })
    }

    pub fn a(&self) -> &RealMatrix {
        &self.a
    }

    pub fn b(&self) -> &RealMatrix {
        &self.b
    }

    /// State dimension.
    pub fn n(&self) -> usize {
        self.a.rows
    }

    /// Input dimension.
    pub fn r(&self) -> usize {
        self.b.cols
    }

    /// `{A⁻¹, A⁻¹B}`, whose reachable zonotope is the controllable region of `self`.
    pub fn inverse_pair(&self) -> Result<SystemModel> {
        let a_inv = invert(&self.a)?;
        let b = a_inv.mul(&self.b)?;
        SystemModel::new(format!("{}^-1", self.name), a_inv, b)
    }

    /// The similar system `{T A T⁻¹, T B}`.
    pub fn transformed(&self, t: &RealMatrix) -> Result<SystemModel> {
        let t_inv = invert(t)?;
        let a = t.mul(&self.a)?.mul(&t_inv)?;
        let b = t.mul(&self.b)?;
        SystemModel::new(self.name.clone(), a, b)
    }
}

/// `P_N = [B, AB, ..., A^{N-1}B]`, built by repeated multiplication.
pub fn controllability_matrix(model: &SystemModel, horizon: usize) -> Result<RealMatrix> {
    if horizon == 0 {
        return Err(Error::EmptyHorizon);
    }
    let mut blocks = Vec::with_capacity(horizon);
    blocks.push(model.b.clone());
    for _ in 1..horizon {
        let next = model.a.mul(blocks.last().expect("nonempty"))?;
        blocks.push(next);
    }
    RealMatrix::hstack(&blocks)
}

/// Diagonalization `W A W⁻¹ = diag(λ)` of a matrix with distinct positive
/// real eigenvalues, sorted ascending.
///
/// Columns of `w_inv` are unit-norm eigenvectors whose first nonzero
/// component is positive.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub w: RealMatrix,
    pub w_inv: RealMatrix,
    pub det_w_abs: f64,
    /// 1-norm condition estimate `‖W‖₁‖W⁻¹‖₁` of the eigenvector basis.
    pub condition: f64,
}

impl Spectrum {
    /// `Γ = W B`.
    pub fn gamma(&self, b: &RealMatrix) -> Result<RealMatrix> {
        self.w.mul(b)
    }

    /// Entries of `Γ` for a single-input `B`.
    pub fn beta(&self, b: &RealMatrix) -> Result<Vec<f64>> {
        if b.cols != 1 {
            return Err(Error::Dimension(format!(
                "beta coefficients need a single-input B, got {} columns",
                b.cols
            )));
        }
        Ok(self.gamma(b)?.column(0))
    }
}

fn norm1(m: &RealMatrix) -> f64 {
    (0..m.cols)
        .map(|j| (0..m.rows).map(|i| m[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Eigendecomposition for the spectral fast path.
///
/// `separation_tol` defaults to `1e-9 * max|λ|`. Any complex, clustered, or
/// non-positive eigenvalue is reported as [`Error::SpectralUnsupported`].
pub fn eig_real_distinct(a: &RealMatrix, separation_tol: Option<f64>) -> Result<Spectrum> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "eigendecomposition of a non-square {}x{} matrix",
            a.rows, a.cols
        )));
    }
    let n = a.rows;
    let na = a.to_nalgebra();
    let schur = nalgebra::linalg::Schur::try_new(na.clone(), f64::EPSILON, 100_000)
        .ok_or(Error::SpectralUnsupported(SpectralReason::IllConditioned))?;
    let eigs = schur.complex_eigenvalues();
    let scale = eigs.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
    let tol = separation_tol.unwrap_or(DEFAULT_SEPARATION_FACTOR * scale);

    let mut lambdas = Vec::with_capacity(n);
    let mut clustered = false;
    for z in eigs.iter() {
        if z.im.abs() > tol.max(f64::EPSILON * scale) {
            return Err(Error::SpectralUnsupported(SpectralReason::Complex));
        }
        // A conjugate pair this close to the real axis is a split double root.
        if z.im != 0.0 {
            clustered = true;
        }
        lambdas.push(z.re);
    }
    lambdas.sort_by(f64::total_cmp);
    if clustered || lambdas.windows(2).any(|w| w[1] - w[0] <= tol) {
        return Err(Error::SpectralUnsupported(SpectralReason::Repeated));
    }
    if lambdas[0] <= 0.0 {
        return Err(Error::SpectralUnsupported(SpectralReason::NonPositive));
    }

    let mut vecs = Vec::with_capacity(n * n);
    for &lambda in &lambdas {
        vecs.push(null_vector(&na, lambda));
    }
    let mut data = vec![0.0; n * n];
    for (j, v) in vecs.iter().enumerate() {
        for i in 0..n {
            data[i * n + j] = v[i];
        }
    }
    let w_inv = RealMatrix::new(n, n, data)?;
    let w =
        invert(&w_inv).map_err(|_| Error::SpectralUnsupported(SpectralReason::IllConditioned))?;

    let recon = w.mul(a)?.mul(&w_inv)?;
    let mut err = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { lambdas[i] } else { 0.0 };
            err = err.max((recon[(i, j)] - target).abs());
        }
    }
    if err >= RECONSTRUCTION_TOL * a.max_abs() {
        return Err(Error::SpectralUnsupported(SpectralReason::IllConditioned));
    }

    let det_w_abs = determinant(&w)?.abs();
    let condition = norm1(&w) * norm1(&w_inv);
    Ok(Spectrum {
        eigenvalues: lambdas,
        w,
        w_inv,
        det_w_abs,
        condition,
    })
}

/// Moduli of all (possibly complex) eigenvalues.
pub fn eigenvalue_moduli(a: &RealMatrix) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "eigenvalues of a non-square {}x{} matrix",
            a.rows, a.cols
        )));
    }
    let schur = nalgebra::linalg::Schur::try_new(a.to_nalgebra(), f64::EPSILON, 100_000)
        .ok_or(Error::SpectralUnsupported(SpectralReason::IllConditioned))?;
    Ok(schur
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .collect())
}

/// Unit right null vector of `A - λI`, sign-normalized.
fn null_vector(a: &DMatrix<f64>, lambda: f64) -> Vec<f64> {
    let n = a.nrows();
    let shifted = a - DMatrix::<f64>::identity(n, n) * lambda;
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .expect("nonempty");
    let mut v: Vec<f64> = v_t.row(idx).iter().copied().collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut v {
        *x /= norm;
    }
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-14) {
        if *first < 0.0 {
            for x in &mut v {
                *x = -*x;
            }
        }
    }
    v
}
