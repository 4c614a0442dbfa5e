//! The two companion-form systems used throughout the tests and benchmarks.

use crate::linalg::{RealMatrix, SystemModel};

/// Third-order single-input system with eigenvalues near
/// `{0.9517, 1.0000, 1.0083}`; used for reachable-region tables.
pub fn ex1() -> SystemModel {
    let a = RealMatrix::from_rows(&[[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.9596, -2.9196, 2.96]])
        .expect("valid matrix");
    let b = RealMatrix::column_vector(&[0.0, 0.0, 1.0]).expect("valid matrix");
    SystemModel::new("ex1", a, b).expect("valid model")
}

/// Fourth-order unstable single-input system with eigenvalues near
/// `{1.0407, 1.0755, 1.1589, 1.2049}`; used for controllable-region tables.
pub fn ex2() -> SystemModel {
    let a = RealMatrix::from_rows(&[
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [-1.5629, 5.6007, -7.5179, 4.48],
    ])
    .expect("valid matrix");
    let b = RealMatrix::column_vector(&[0.0, 0.0, 0.0, 1.0]).expect("valid matrix");
    SystemModel::new("ex2", a, b).expect("valid model")
}

/// Looks up a built-in model by name.
pub fn by_name(name: &str) -> Option<SystemModel> {
    match name {
        "ex1" => Some(ex1()),
        "ex2" => Some(ex2()),
        _ => None,
    }
}
