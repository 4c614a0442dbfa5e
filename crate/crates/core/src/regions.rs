//! Reachable and controllable region volumes of `x_{k+1} = A x_k + B u_k`
//! under `‖u_k‖∞ ≤ 1`.
//!
//! The engines measure zonotopes with generator coefficients in `[0, 1]`;
//! the symmetric input box doubles every edge, so region volumes carry a
//! factor `2ⁿ`. That factor is applied here and nowhere else. Controllable
//! regions are the reachable regions of the inverse pair `{A⁻¹, A⁻¹B}`,
//! which for a finite horizon is the same as scaling by `|det A|^{-N}`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::generic::{volume_exact_model, volume_recursive, Horizon, Method, VolumeResult};
use crate::linalg::{determinant, eig_real_distinct, eigenvalue_moduli, SystemModel};
use crate::spectral::{volume_infinite_counted, volume_spectral, BETA_ZERO_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Reachable,
    Controllable,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::Reachable => "reachable",
            Region::Controllable => "controllable",
        })
    }
}

impl FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reachable" => Ok(Region::Reachable),
            "controllable" => Ok(Region::Controllable),
            _ => Err(Error::InvalidQuery(format!("unknown region '{s}'"))),
        }
    }
}

/// A concrete engine, or `Auto` to let the model decide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    Use(Method),
    Auto,
}

impl fmt::Display for MethodChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MethodChoice::Use(m) => m.fmt(f),
            MethodChoice::Auto => f.write_str("auto"),
        }
    }
}

impl FromStr for MethodChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            Ok(MethodChoice::Auto)
        } else {
            s.parse().map(MethodChoice::Use)
        }
    }
}

impl From<Method> for MethodChoice {
    fn from(m: Method) -> Self {
        MethodChoice::Use(m)
    }
}

fn region_factor(model: &SystemModel) -> f64 {
    2f64.powi(model.n() as i32)
}

/// Zonotope volume `V(E(P_N))` by the chosen engine, without the `2ⁿ` factor.
pub fn zonotope_volume(
    model: &SystemModel,
    horizon: usize,
    method: MethodChoice,
) -> Result<VolumeResult> {
    let method = match method {
        MethodChoice::Use(m) => m,
        MethodChoice::Auto => return auto_volume(model, horizon),
    };
    let res = match method {
        Method::Exact => volume_exact_model(model, horizon),
        Method::Recursive => volume_recursive(model, horizon),
        Method::Spectral => volume_spectral(model, horizon),
        Method::Analytic => Err(Error::InvalidQuery(
            "the analytic method only applies to an infinite horizon".into(),
        )),
    };
    res.map_err(|e| e.in_method(method.as_str()))
}

fn auto_volume(model: &SystemModel, horizon: usize) -> Result<VolumeResult> {
    if model.r() == 1 {
        match eig_real_distinct(model.a(), None) {
            Ok(_) => return volume_spectral(model, horizon).map_err(|e| e.in_method("spectral")),
            Err(Error::SpectralUnsupported(reason)) => {
                return volume_recursive(model, horizon)
                    .map(|r| r.note(format!("auto: spectral path skipped ({reason})")))
                    .map_err(|e| e.in_method("recursive"));
            }
            Err(e) => return Err(e.in_method("spectral")),
        }
    }
    volume_recursive(model, horizon)
        .map(|r| r.note("auto: multi-input model uses the recursive engine"))
        .map_err(|e| e.in_method("recursive"))
}

/// Volume of the `N`-step reachable region: `2ⁿ V(E(P_N))`.
pub fn reachable_volume(
    model: &SystemModel,
    horizon: usize,
    method: MethodChoice,
) -> Result<VolumeResult> {
    if horizon == 0 {
        return Err(Error::EmptyHorizon);
    }
    let res = zonotope_volume(model, horizon, method)?.scaled(region_factor(model));
    if !res.volume.is_finite() {
        return Err(Error::Domain(format!(
            "volume at horizon {horizon} overflows double precision"
        ))
        .in_method(res.method.as_str()));
    }
    Ok(res)
}

/// Volume of the `N`-step controllable region: `|det A|^{-N}` times the
/// reachable volume.
///
/// When `|det A| > 1` the columns `A^k B` grow and turn nearly parallel, so
/// their determinants lose digits as `N` increases. The same region is then
/// measured as the reachable region of `{A⁻¹, A⁻¹B}`, whose generators decay.
pub fn controllable_volume(
    model: &SystemModel,
    horizon: usize,
    method: MethodChoice,
) -> Result<VolumeResult> {
    if horizon == 0 {
        return Err(Error::EmptyHorizon);
    }
    let det = determinant(model.a())?;
    if det.abs() <= crate::linalg::SINGULARITY_TOL {
        return Err(Error::Singular { det });
    }
    if det.abs() > 1.0 {
        return controllable_volume_inverse_pair(model, horizon, method);
    }
    // |det A|^{-N} via logs: powi overflows sooner for large N
    let factor = (-(horizon as f64) * det.abs().ln()).exp();
    let scaled = match reachable_volume(model, horizon, method) {
        Ok(reach) => Some(reach.scaled(factor)),
        Err(e) if matches!(e.root(), Error::Domain(_)) => None,
        Err(e) => return Err(e),
    };
    match scaled {
        Some(res) if res.volume.is_finite() && (res.volume > 0.0 || factor > 0.0) => Ok(res),
        // The reachable volume or the scale factor left double range; the
        // inverse pair measures the same region without the huge intermediate.
        _ => controllable_volume_inverse_pair(model, horizon, method).map(|r| {
            r.note("controllable volume computed on the inverse pair (scaling overflowed)")
        }),
    }
}

/// Controllable volume computed as the reachable volume of `{A⁻¹, A⁻¹B}`.
pub fn controllable_volume_inverse_pair(
    model: &SystemModel,
    horizon: usize,
    method: MethodChoice,
) -> Result<VolumeResult> {
    let inv = model.inverse_pair()?;
    reachable_volume(&inv, horizon, method)
}

/// Infinite-horizon reachable volume of a single-input pair whose
/// eigenvalues all lie in `(0, 1)`.
pub fn reachable_volume_infinite(model: &SystemModel) -> Result<VolumeResult> {
    infinite_closed_form(model).map_err(|e| e.in_method("analytic"))
}

/// Infinite-horizon controllable volume: the closed form applied to
/// `{A⁻¹, A⁻¹B}`. Needs every eigenvalue of `A` real, distinct and greater
/// than 1 in modulus.
pub fn controllable_volume_infinite(model: &SystemModel) -> Result<VolumeResult> {
    let run = || {
        for m in eigenvalue_moduli(model.a())? {
            if m <= 1.0 {
                return Err(Error::DivergentRegion { lambda: m });
            }
        }
        let inv = model.inverse_pair()?;
        infinite_closed_form(&inv)
    };
    run().map_err(|e| e.in_method("analytic"))
}

fn infinite_closed_form(model: &SystemModel) -> Result<VolumeResult> {
    if model.r() != 1 {
        return Err(Error::InvalidQuery(format!(
            "closed form needs a single input, model has {}",
            model.r()
        )));
    }
    let spectrum = eig_real_distinct(model.a(), None)?;
    if let Some(&l) = spectrum.eigenvalues.iter().find(|&&l| l >= 1.0) {
        return Err(Error::DivergentRegion { lambda: l });
    }
    let beta = spectrum.beta(model.b())?;
    let mut res = VolumeResult::new(Method::Analytic, Horizon::Infinite);
    let bmax = beta.iter().fold(0.0_f64, |m, b| m.max(b.abs()));
    if beta.iter().any(|b| b.abs() <= BETA_ZERO_TOL * bmax) {
        return Ok(res.note("uncontrollable mode: zero input coefficient"));
    }
    let (phi, ops) = volume_infinite_counted(&spectrum.eigenvalues)?;
    let beta_prod: f64 = beta.iter().product::<f64>().abs();
    res.volume = region_factor(model) * beta_prod / spectrum.det_w_abs * phi;
    res.mult_count = ops;
    Ok(res)
}

/// A fully specified region-volume question.
#[derive(Debug, Clone)]
pub struct RegionQuery {
    pub model: SystemModel,
    pub region: Region,
    pub horizon: Horizon,
    pub method: MethodChoice,
}

impl RegionQuery {
    /// Rejects the analytic method with a finite horizon, and an infinite
    /// horizon with anything but the analytic method (or auto).
    pub fn new(
        model: SystemModel,
        region: Region,
        horizon: Horizon,
        method: MethodChoice,
    ) -> Result<Self> {
        match (horizon, method) {
            (Horizon::Finite(_), MethodChoice::Use(Method::Analytic)) => {
                return Err(Error::InvalidQuery(
                    "the analytic method needs an infinite horizon".into(),
                ))
            }
            (Horizon::Infinite, MethodChoice::Use(m)) if m != Method::Analytic => {
                return Err(Error::InvalidQuery(format!(
                    "an infinite horizon needs the analytic method, not {m}"
                )))
            }
            (Horizon::Finite(0), _) => return Err(Error::EmptyHorizon),
            _ => {}
        }
        Ok(RegionQuery {
            model,
            region,
            horizon,
            method,
        })
    }

    pub fn run(&self) -> Result<VolumeResult> {
        match (self.region, self.horizon) {
            (Region::Reachable, Horizon::Finite(n)) => {
                reachable_volume(&self.model, n, self.method)
            }
            (Region::Controllable, Horizon::Finite(n)) => {
                controllable_volume(&self.model, n, self.method)
            }
            (Region::Reachable, Horizon::Infinite) => reachable_volume_infinite(&self.model),
            (Region::Controllable, Horizon::Infinite) => controllable_volume_infinite(&self.model),
        }
    }
}
