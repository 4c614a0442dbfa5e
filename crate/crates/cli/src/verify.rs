//! Seeded property checks over random models.

use std::fmt;
use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use zonovol::generic::first_full_horizon;
use zonovol::spectral::converge_sum;
use zonovol::{
    binomial, invert, quasi_vandermonde, volume_exact_model, volume_infinite, volume_recursive,
    volume_spectral, Error, RealMatrix, SpectralTable, SystemModel,
};

use crate::error::CliError;

pub const LEMMA_INSTANCES: usize = 10_000;
pub const MAX_DIM: usize = 5;
const EQUIV_TOL: f64 = 1e-8;
const COVARIANCE_TOL: f64 = 1e-8;
const CONVERGENCE_TOL: f64 = 1e-6;
/// Failures kept per property for the report.
const KEEP_FAILURES: usize = 5;

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    pub trials: usize,
    pub dims: RangeInclusive<usize>,
    /// Feeds one descending eigenvalue list to the positivity check.
    pub inject_ordering_fault: bool,
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.trials == 0 {
            return Err(CliError::Usage("--trials must be at least 1".into()));
        }
        let (lo, hi) = (*self.dims.start(), *self.dims.end());
        if lo == 0 || lo > hi || hi > MAX_DIM {
            return Err(CliError::Usage(format!(
                "--dims must satisfy 1 <= lo <= hi <= {MAX_DIM}, got {lo}:{hi}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub checked: usize,
    pub passed: usize,
    pub failures: Vec<String>,
}

impl PropertyOutcome {
    fn new(name: &'static str) -> Self {
        PropertyOutcome {
            name,
            checked: 0,
            passed: 0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, outcome: Result<(), String>) {
        self.checked += 1;
        match outcome {
            Ok(()) => self.passed += 1,
            Err(msg) => {
                if self.failures.len() < KEEP_FAILURES {
                    self.failures.push(msg);
                }
            }
        }
    }

    pub fn failed(&self) -> usize {
        self.checked - self.passed
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub trials: usize,
    pub properties: Vec<PropertyOutcome>,
}

impl VerifyReport {
    pub fn total_failures(&self) -> usize {
        self.properties.iter().map(PropertyOutcome::failed).sum()
    }

    pub fn all_passed(&self) -> bool {
        self.total_failures() == 0
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "seed {}, {} trials per dimension",
            self.seed, self.trials
        )?;
        for p in &self.properties {
            let status = if p.failed() == 0 { "ok" } else { "FAIL" };
            writeln!(
                f,
                "{:<24} {:>6}/{:<6} {status}",
                p.name, p.passed, p.checked
            )?;
            for msg in &p.failures {
                writeln!(f, "    {msg}")?;
            }
        }
        write!(f, "{} failure(s)", self.total_failures())
    }
}

fn rel_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn engine(e: Error) -> String {
    match e.root() {
        Error::ContractViolation(msg) => format!("contract violation: {msg}"),
        _ => e.to_string(),
    }
}

struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    fn matrix(&mut self, rows: usize, cols: usize) -> RealMatrix {
        let data = (0..rows * cols)
            .map(|_| self.rng.random_range(-1.0..1.0))
            .collect();
        RealMatrix::new(rows, cols, data).expect("finite entries")
    }

    fn near_identity(&mut self, n: usize) -> RealMatrix {
        let mut t = self.matrix(n, n).to_rows();
        for (i, row) in t.iter_mut().enumerate() {
            for v in row.iter_mut() {
                *v *= 0.3;
            }
            row[i] += 1.0;
        }
        RealMatrix::from_rows(&t).expect("finite entries")
    }

    /// Sorted draws from `[lo, hi)` at least `gap` apart.
    fn separated(&mut self, n: usize, lo: f64, hi: f64, gap: f64) -> Vec<f64> {
        loop {
            let mut v: Vec<f64> = (0..n).map(|_| self.rng.random_range(lo..hi)).collect();
            v.sort_by(f64::total_cmp);
            if v.windows(2).all(|w| w[1] - w[0] >= gap) {
                return v;
            }
        }
    }

    fn with_spectrum(&mut self, lambdas: &[f64]) -> SystemModel {
        let n = lambdas.len();
        let t = self.near_identity(n);
        let a = t
            .mul(&RealMatrix::from_diagonal(lambdas).expect("finite"))
            .and_then(|m| m.mul(&invert(&t)?))
            .expect("invertible perturbation of the identity");
        let b = self.matrix(n, 1);
        SystemModel::new("random", a, b).expect("consistent shapes")
    }

    fn general(&mut self, n: usize, r: usize) -> SystemModel {
        let a = self.matrix(n, n);
        let b = self.matrix(n, r);
        SystemModel::new("random", a, b).expect("consistent shapes")
    }
}

pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifyReport, CliError> {
    cfg.validate()?;
    let mut gen = Gen {
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
    };
    let mut equivalence = PropertyOutcome::new("method_equivalence");
    let mut positivity = PropertyOutcome::new("lemma_positivity");
    let mut monotone = PropertyOutcome::new("horizon_monotonicity");
    let mut covariance = PropertyOutcome::new("linear_map_covariance");
    let mut convergence = PropertyOutcome::new("convergence");
    let mut counters = PropertyOutcome::new("counter_laws");

    for n in cfg.dims.clone() {
        for _ in 0..cfg.trials {
            let lambdas = gen.separated(n, 0.2, 1.4, 0.08);
            let model = gen.with_spectrum(&lambdas);
            let horizon = gen.rng.random_range(n..=n + 8);
            equivalence.record(check_equivalence(&model, horizon));
            counters.record(check_counters(&model, horizon, true));

            let r = gen.rng.random_range(1..=2);
            let general = gen.general(n, r);
            let n0 = first_full_horizon(n, r);
            let horizon = gen.rng.random_range(n0..=n0 + 5);
            equivalence.record(check_exact_vs_recursive(&general, horizon));
            counters.record(check_counters(&general, horizon, false));
            monotone.record(check_monotone(&general, horizon));

            let t = gen.near_identity(n);
            covariance.record(check_covariance(&general, &t, horizon));

            let stable = gen.separated(n, 0.05, 0.9, 0.05);
            convergence.record(check_convergence(&stable));
        }
    }

    for i in 0..LEMMA_INSTANCES {
        let n = gen.rng.random_range(1..=6);
        let mut lambdas = gen.separated(n, 0.05, 2.0, 0.05);
        let mut ks = Vec::with_capacity(n);
        let mut k = 0u32;
        for _ in 0..n {
            k += gen.rng.random_range(1..4u32);
            ks.push(k - 1);
        }
        if cfg.inject_ordering_fault && i == 0 {
            lambdas.reverse();
            if n == 1 {
                lambdas = vec![1.5, 0.5];
                ks = vec![0, 1];
            }
        }
        positivity.record(match quasi_vandermonde(&lambdas, &ks) {
            Ok(d) if d > 0.0 => Ok(()),
            Ok(d) => Err(format!("det {d:e} <= 0 for λ={lambdas:?}, k={ks:?}")),
            Err(e) => Err(engine(e)),
        });
    }

    Ok(VerifyReport {
        seed: cfg.seed,
        trials: cfg.trials,
        properties: vec![
            equivalence,
            positivity,
            monotone,
            covariance,
            convergence,
            counters,
        ],
    })
}

fn check_equivalence(model: &SystemModel, horizon: usize) -> Result<(), String> {
    let exact = volume_exact_model(model, horizon).map_err(engine)?.volume;
    let rec = volume_recursive(model, horizon).map_err(engine)?.volume;
    let spectral = volume_spectral(model, horizon).map_err(engine)?.volume;
    for (name, v) in [("recursive", rec), ("spectral", spectral)] {
        let gap = rel_gap(v, exact);
        if gap > EQUIV_TOL {
            return Err(format!(
                "n={} N={horizon}: {name} {v:e} vs exact {exact:e} (gap {gap:.2e})",
                model.n()
            ));
        }
    }
    Ok(())
}

fn check_exact_vs_recursive(model: &SystemModel, horizon: usize) -> Result<(), String> {
    let exact = volume_exact_model(model, horizon).map_err(engine)?.volume;
    let rec = volume_recursive(model, horizon).map_err(engine)?.volume;
    let gap = rel_gap(rec, exact);
    if gap > EQUIV_TOL {
        return Err(format!(
            "n={} r={} N={horizon}: recursive {rec:e} vs exact {exact:e}",
            model.n(),
            model.r()
        ));
    }
    Ok(())
}

fn expected_recursive_count(n: usize, r: usize, horizon: usize) -> u64 {
    let n0 = first_full_horizon(n, r);
    let c = |a: usize, b: usize| binomial(a as u64, b as u64);
    let mut total = c(r * n0, n);
    if horizon > n0 {
        total += c(r * (n0 + 1), n);
    }
    for step in n0 + 2..=horizon {
        for j in 1..=r {
            for k in 1..=r {
                if j + k <= n {
                    total += c(r, j) * c(r * (step - 2), n - j - k) * c(r, k);
                }
            }
        }
    }
    total
}

fn check_counters(model: &SystemModel, horizon: usize, spectral: bool) -> Result<(), String> {
    let (n, r) = (model.n(), model.r());
    let exact = volume_exact_model(model, horizon).map_err(engine)?;
    // a rank-deficient generator set short-circuits before enumeration
    if exact.volume > 0.0 && exact.det_count != binomial((r * horizon) as u64, n as u64) {
        return Err(format!("exact n_d {} at N={horizon}", exact.det_count));
    }
    let rec = volume_recursive(model, horizon).map_err(engine)?;
    let want = expected_recursive_count(n, r, horizon);
    if rec.det_count != want {
        return Err(format!(
            "recursive n_d {} != {want} at n={n} r={r} N={horizon}",
            rec.det_count
        ));
    }
    if spectral {
        let spectral = volume_spectral(model, horizon).map_err(engine)?;
        let (nn, hh) = (n as u64, horizon as u64);
        // the power-table term n(N - 2) needs N >= 2
        let want = (nn * hh + nn * (1 << (n - 1)) * (hh - nn + 1)).saturating_sub(2 * nn);
        if horizon >= 2 && spectral.volume > 0.0 && spectral.mult_count != want {
            return Err(format!(
                "spectral n_p {} != {want} at n={n} N={horizon}",
                spectral.mult_count
            ));
        }
    }
    Ok(())
}

fn check_monotone(model: &SystemModel, horizon: usize) -> Result<(), String> {
    let mut prev = 0.0;
    for h in 1..=horizon {
        let v = volume_exact_model(model, h).map_err(engine)?.volume;
        if v < prev * (1.0 - 1e-12) {
            return Err(format!("V({h}) = {v:e} < V({}) = {prev:e}", h - 1));
        }
        prev = v;
    }
    Ok(())
}

fn check_covariance(model: &SystemModel, t: &RealMatrix, horizon: usize) -> Result<(), String> {
    let base = volume_exact_model(model, horizon).map_err(engine)?.volume;
    let moved = model.transformed(t).map_err(engine)?;
    let v = volume_exact_model(&moved, horizon).map_err(engine)?.volume;
    let det_t = zonovol::determinant(t).map_err(engine)?.abs();
    let gap = rel_gap(v, det_t * base);
    if gap > COVARIANCE_TOL {
        return Err(format!(
            "V(TZ) = {v:e}, |det T| V(Z) = {:e} (gap {gap:.2e})",
            det_t * base
        ));
    }
    Ok(())
}

fn check_convergence(lambdas: &[f64]) -> Result<(), String> {
    let phi = volume_infinite(lambdas).map_err(engine)?;
    let (v, horizon) = converge_sum(lambdas, 1e-12, 100_000).map_err(engine)?;
    let gap = rel_gap(v, phi);
    if gap > CONVERGENCE_TOL {
        return Err(format!(
            "λ={lambdas:?}: V_{horizon} = {v:e} vs closed form {phi:e}"
        ));
    }
    let mut table = SpectralTable::new(lambdas).map_err(engine)?;
    let full = table.full_mask();
    let n = table.n();
    let mut prev = table.run_to(n);
    while table.step_of(n) < horizon {
        table.tick();
        let cur = table.value(full);
        if cur < prev * (1.0 - 1e-12) || cur > phi * (1.0 + 1e-9) {
            return Err(format!(
                "λ={lambdas:?}: V_{} = {cur:e} breaks 0 <= V_(N-1) <= V_N <= {phi:e}",
                table.step_of(n)
            ));
        }
        prev = cur;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(fault: bool) -> VerifyConfig {
        VerifyConfig {
            seed: 7,
            trials: 3,
            dims: 1..=3,
            inject_ordering_fault: fault,
        }
    }

    #[test]
    fn clean_run_passes() {
        let report = run_verify(&cfg(false)).unwrap();
        assert!(report.all_passed(), "{report}");
        let lemma = report
            .properties
            .iter()
            .find(|p| p.name == "lemma_positivity")
            .unwrap();
        assert_eq!(lemma.checked, LEMMA_INSTANCES);
    }

    #[test]
    fn ordering_fault_surfaces() {
        let report = run_verify(&cfg(true)).unwrap();
        assert_eq!(report.total_failures(), 1);
        let lemma = report
            .properties
            .iter()
            .find(|p| p.name == "lemma_positivity")
            .unwrap();
        assert!(
            lemma.failures[0].starts_with("contract violation"),
            "{:?}",
            lemma.failures
        );
    }

    #[test]
    fn zero_trials_is_usage() {
        let mut c = cfg(false);
        c.trials = 0;
        assert!(matches!(run_verify(&c), Err(CliError::Usage(_))));
    }
}
