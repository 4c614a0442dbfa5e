//! Fixtures shared by the criterion benchmarks.

use zonovol::SystemModel;

/// Horizons of the reachable-region table for `ex1`.
pub const EX1_HORIZONS: [usize; 8] = [100, 200, 300, 400, 500, 600, 700, 800];

/// Horizons of the controllable-region table for `ex2`.
pub const EX2_HORIZONS: [usize; 8] = [50, 100, 150, 200, 250, 300, 350, 400];

pub fn models() -> [SystemModel; 2] {
    [zonovol::builtin::ex1(), zonovol::builtin::ex2()]
}
