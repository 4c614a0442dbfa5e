//! Exact volumes of zonotopes generated by a matrix pair `{A, B}`, and of the
//! `N`-step reachable and controllable regions of `x_{k+1} = A x_k + B u_k`
//! with `‖u_k‖∞ ≤ 1`.
//!
//! Four engines are available, from most to least general:
//!
//! - [`volume_exact`]: sum of `|det|` over every `n`-subset of generators.
//! - [`volume_recursive`]: second-order recursion in the horizon; only the
//!   tuples touching both the first and the newest block are enumerated.
//! - [`volume_spectral`]: single input, distinct positive real eigenvalues;
//!   linear in the horizon.
//! - [`volume_infinite`]: closed form for the infinite horizon when every
//!   eigenvalue lies in `(0, 1)`.
//!
//! The [`regions`] module maps region questions onto these engines.

pub mod builtin;
pub mod combinatorics;
pub mod error;
pub mod generic;
pub mod linalg;
pub mod regions;
pub mod spectral;

pub use combinatorics::{binomial, cross, IndexTuple, TupleSet};
pub use error::{Error, Result, SpectralReason};
pub use generic::{
    volume_exact, volume_exact_model, volume_recursive, Horizon, Method, VolumeResult,
};
pub use linalg::{
    controllability_matrix, determinant, eig_real_distinct, invert, RealMatrix, Spectrum,
    SystemModel,
};
pub use regions::{
    controllable_volume, controllable_volume_infinite, controllable_volume_inverse_pair,
    reachable_volume, reachable_volume_infinite, MethodChoice, Region, RegionQuery,
};
pub use spectral::{quasi_vandermonde, volume_infinite, volume_spectral, SpectralTable};
