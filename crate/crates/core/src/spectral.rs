//! Fast path for single-input pairs whose state matrix has distinct positive
//! real eigenvalues.
//!
//! After diagonalizing, every generator determinant factors into `Π β_i`
//! times a quasi-Vandermonde determinant `F = det[λ_i^{k_j}]`, which is
//! positive when both `λ` and `k` are strictly increasing. The horizon sum
//! `V_N = Σ_{0 ≤ k_1 < ... < k_n ≤ N-1} F` then obeys a cofactor recursion
//! over subsets of the eigenvalues, and has a closed-form limit when all
//! eigenvalues lie in `(0, 1)`.

use crate::error::{Error, Result};
use crate::generic::{Horizon, Method, VolumeResult};
use crate::linalg::{det_in_place, eig_real_distinct, SystemModel};

/// `|β_i| ≤ BETA_ZERO_TOL * max|β|` marks an uncontrollable mode.
pub const BETA_ZERO_TOL: f64 = 1e-12;

/// The closed form requires `λ_max ≤ 1 - INFINITE_MARGIN`.
pub const INFINITE_MARGIN: f64 = 1e-9;

/// A basis whose condition estimate exceeds this gets a warning note.
pub const CONDITION_WARN: f64 = 1e8;

fn check_ascending_positive(lambdas: &[f64]) -> Result<()> {
    if lambdas.is_empty() {
        return Err(Error::ContractViolation("no eigenvalues given".into()));
    }
    if let Some(l) = lambdas.iter().find(|l| !l.is_finite() || **l <= 0.0) {
        return Err(Error::ContractViolation(format!(
            "eigenvalue {l} is not a positive finite real"
        )));
    }
    if let Some(w) = lambdas.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::ContractViolation(format!(
            "eigenvalues must be strictly ascending, found {} before {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// `det[λ_i^{k_j}]` for strictly ascending positive `λ` and strictly
/// ascending exponents `k`.
pub fn quasi_vandermonde(lambdas: &[f64], exponents: &[u32]) -> Result<f64> {
    if lambdas.len() != exponents.len() {
        return Err(Error::ContractViolation(format!(
            "{} bases but {} exponents",
            lambdas.len(),
            exponents.len()
        )));
    }
    check_ascending_positive(lambdas)?;
    if let Some(w) = exponents.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::ContractViolation(format!(
            "exponents must be strictly ascending, found {} before {}",
            w[0], w[1]
        )));
    }
    let n = lambdas.len();
    let mut m = Vec::with_capacity(n * n);
    for &l in lambdas {
        for &k in exponents {
            m.push(l.powi(k as i32));
        }
    }
    Ok(det_in_place(&mut m, n))
}

/// Running values `V^S_k` for every nonempty subset `S` of the eigenvalues.
///
/// Subsets are bitmasks over the ascending eigenvalue list. A subset of size
/// `s` starts at step `s - 1` with value 0 (no `s`-tuples fit below
/// exponent `s - 1`), and each [`tick`](Self::tick) advances every subset by
/// one step:
///
/// `V^S_k = V^S_{k-1} + Σ_j (-1)^{s+j} λ_j^{k-1} V^{S∖λ_j}_{k-1}`.
///
/// Within a tick sizes are processed in ascending order, so the smaller
/// subsets read by a size-`s` update are already at step `k - 1`. After `g`
/// ticks a size-`s` subset sits at step `s - 1 + g`; in particular its
/// first tick reproduces the plain Vandermonde determinant.
#[derive(Debug, Clone)]
pub struct SpectralTable {
    lambdas: Vec<f64>,
    values: Vec<f64>,
    by_size: Vec<Vec<usize>>,
    powers: Vec<Vec<f64>>,
    ticks: usize,
    mult_count: u64,
}

impl SpectralTable {
    pub fn new(lambdas: &[f64]) -> Result<Self> {
        check_ascending_positive(lambdas)?;
        let n = lambdas.len();
        if n >= usize::BITS as usize - 1 {
            return Err(Error::ContractViolation(format!(
                "{n} eigenvalues is too many for a subset table"
            )));
        }
        let full = 1usize << n;
        let mut values = vec![0.0; full];
        values[0] = 1.0;
        let mut by_size = vec![Vec::new(); n + 1];
        for mask in 1..full {
            by_size[mask.count_ones() as usize].push(mask);
        }
        Ok(SpectralTable {
            lambdas: lambdas.to_vec(),
            values,
            by_size,
            powers: lambdas.iter().map(|&l| vec![1.0, l]).collect(),
            ticks: 0,
            mult_count: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    pub fn ticks(&self) -> usize {
        self.ticks
    }

    /// Current step of subsets with `size` elements.
    pub fn step_of(&self, size: usize) -> usize {
        size - 1 + self.ticks
    }

    /// Current `V^S` for subset `mask`.
    pub fn value(&self, mask: usize) -> f64 {
        self.values[mask]
    }

    pub fn full_mask(&self) -> usize {
        (1 << self.n()) - 1
    }

    /// Number of nonempty subsets tracked.
    pub fn len(&self) -> usize {
        self.values.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Multiplications spent so far: power updates plus one per cofactor term.
    pub fn mult_count(&self) -> u64 {
        self.mult_count
    }

    fn power(&mut self, i: usize, e: usize) -> f64 {
        let pw = &mut self.powers[i];
        while pw.len() <= e {
            let next = pw[pw.len() - 1] * self.lambdas[i];
            pw.push(next);
            self.mult_count += 1;
        }
        pw[e]
    }

    pub fn tick(&mut self) {
        self.ticks += 1;
        let g = self.ticks;
        let n = self.n();
        for s in 1..=n {
            // step k = s - 1 + g uses λ^{k-1}
            let e = s + g - 2;
            for idx in 0..self.by_size[s].len() {
                let mask = self.by_size[s][idx];
                let mut inc = 0.0;
                let mut pos = 0;
                for j in 0..n {
                    if mask & (1 << j) == 0 {
                        continue;
                    }
                    pos += 1;
                    let term = self.power(j, e) * self.values[mask & !(1 << j)];
                    if (s + pos) % 2 == 0 {
                        inc += term;
                    } else {
                        inc -= term;
                    }
                }
                self.mult_count += s as u64;
                self.values[mask] += inc;
            }
        }
    }

    /// Advances until the full set reaches `horizon`; returns `V^{λ_1..λ_n}_horizon`.
    pub fn run_to(&mut self, horizon: usize) -> f64 {
        let full = self.full_mask();
        while self.step_of(self.n()) < horizon {
            self.tick();
        }
        self.values[full]
    }
}

/// `V^{λ_1..λ_n}_N` and the multiplications it took.
pub fn vandermonde_sum(lambdas: &[f64], horizon: usize) -> Result<(f64, u64)> {
    let n = lambdas.len();
    if horizon < n {
        check_ascending_positive(lambdas)?;
        return Ok((0.0, 0));
    }
    let mut table = SpectralTable::new(lambdas)?;
    let v = table.run_to(horizon);
    Ok((v, table.mult_count()))
}

/// Zonotope volume of a single-input pair through its diagonal form:
/// `|det W|⁻¹ · |Π β_i| · V_N`.
pub fn volume_spectral(model: &SystemModel, horizon: usize) -> Result<VolumeResult> {
    if horizon == 0 {
        return Err(Error::EmptyHorizon);
    }
    if model.r() != 1 {
        return Err(Error::InvalidQuery(format!(
            "spectral recursion needs a single input, model has {}",
            model.r()
        )));
    }
    let n = model.n();
    let spectrum = eig_real_distinct(model.a(), None)?;
    let beta = spectrum.beta(model.b())?;
    let mut res = VolumeResult::new(Method::Spectral, Horizon::Finite(horizon));
    if spectrum.condition > CONDITION_WARN {
        res = res.note(format!(
            "eigenvector basis condition estimate {:.3e}",
            spectrum.condition
        ));
    }

    let bmax = beta.iter().fold(0.0_f64, |m, b| m.max(b.abs()));
    if let Some(i) = beta.iter().position(|b| b.abs() <= BETA_ZERO_TOL * bmax) {
        return Ok(res.note(format!(
            "uncontrollable mode: eigenvalue {} has zero input coefficient",
            spectrum.eigenvalues[i]
        )));
    }
    if horizon < n {
        return Ok(res.note(format!(
            "rank-deficient: {horizon} generators cannot span {n} dimensions"
        )));
    }

    let (v, mults) = vandermonde_sum(&spectrum.eigenvalues, horizon)?;
    let beta_prod: f64 = beta.iter().product::<f64>().abs();
    res.volume = beta_prod / spectrum.det_w_abs * v;
    res.mult_count = mults;
    Ok(res)
}

/// `Φ = Π_{i<j} (λ_j - λ_i)/(1 - λ_i λ_j) · Π_i 1/(1 - λ_i)`, the limit of
/// `V_N` as `N → ∞`, together with its operation count (multiplications and
/// divisions).
pub fn volume_infinite_counted(lambdas: &[f64]) -> Result<(f64, u64)> {
    if lambdas.is_empty() {
        return Err(Error::Domain("no eigenvalues given".into()));
    }
    if let Some(l) = lambdas
        .iter()
        .find(|&&l| !(l > 0.0 && l <= 1.0 - INFINITE_MARGIN))
    {
        return Err(Error::Domain(format!(
            "eigenvalue {l} outside (0, 1 - {INFINITE_MARGIN:e}]; the series diverges"
        )));
    }
    if let Some(w) = lambdas.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::Domain(format!(
            "eigenvalues must be strictly ascending, found {} before {}",
            w[0], w[1]
        )));
    }
    let n = lambdas.len();
    let mut phi = 1.0;
    let mut ops = 0u64;
    for i in 0..n {
        for j in i + 1..n {
            phi *= (lambdas[j] - lambdas[i]) / (1.0 - lambdas[i] * lambdas[j]);
            ops += 3;
        }
    }
    for &l in lambdas {
        phi *= 1.0 / (1.0 - l);
        ops += 2;
    }
    Ok((phi, ops))
}

pub fn volume_infinite(lambdas: &[f64]) -> Result<f64> {
    volume_infinite_counted(lambdas).map(|(phi, _)| phi)
}

/// Runs the subset recursion until the estimated tail of `V_N` drops below
/// `rel_tol` of the running value. Returns `(V_N, N)`.
///
/// The increments of `V_N` decay like `λ_max^N` times a polynomial, so the
/// remaining tail is bounded by roughly `increment / (1 - λ_max)`.
pub fn converge_sum(lambdas: &[f64], rel_tol: f64, max_horizon: usize) -> Result<(f64, usize)> {
    let mut table = SpectralTable::new(lambdas)?;
    let lmax = *lambdas.last().expect("nonempty");
    if lmax >= 1.0 {
        return Err(Error::Domain(format!(
            "eigenvalue {lmax} >= 1; the series diverges"
        )));
    }
    let full = table.full_mask();
    let n = table.n();
    let mut prev = table.run_to(n);
    let mut calm = 0;
    while table.step_of(n) < max_horizon {
        table.tick();
        let v = table.value(full);
        let tail = (v - prev).abs() / (1.0 - lmax);
        prev = v;
        if tail <= rel_tol * v.abs() {
            calm += 1;
            // increments can dip before the dominant mode takes over
            if calm >= n + 2 {
                return Ok((v, table.step_of(n)));
            }
        } else {
            calm = 0;
        }
    }
    Err(Error::Domain(format!(
        "no convergence within {max_horizon} steps"
    )))
}
