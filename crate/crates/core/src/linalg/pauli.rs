//! Pauli matrices. The raising/lowering pair follows σ± = σx ± iσy, so the
//! off-diagonal entry is 2 rather than 1.

use super::matrix::{CMatrix, C64, I, ONE, ZERO};

pub fn identity2() -> CMatrix {
    CMatrix::identity(2)
}

pub fn sigma_x() -> CMatrix {
    CMatrix::from_rows(&[[ZERO, ONE], [ONE, ZERO]])
}

pub fn sigma_y() -> CMatrix {
    CMatrix::from_rows(&[[ZERO, -I], [I, ZERO]])
}

pub fn sigma_z() -> CMatrix {
    CMatrix::from_rows(&[[ONE, ZERO], [ZERO, -ONE]])
}

pub fn sigma_plus() -> CMatrix {
    CMatrix::from_rows(&[[ZERO, C64::new(2.0, 0.0)], [ZERO, ZERO]])
}

pub fn sigma_minus() -> CMatrix {
    CMatrix::from_rows(&[[ZERO, ZERO], [C64::new(2.0, 0.0), ZERO]])
}

/// `σ_1, σ_2, σ_3` indexed from zero.
pub fn sigma(k: usize) -> CMatrix {
    match k {
        0 => sigma_x(),
        1 => sigma_y(),
        2 => sigma_z(),
        _ => panic!("Pauli index {k} out of range"),
    }
}
