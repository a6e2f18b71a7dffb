//! Dense complex linear algebra for the small matrices used throughout.

pub mod eigen;
pub mod expm;
pub mod matrix;
pub mod pauli;
pub mod random;

pub use eigen::{hermitian_eigen, sqrt_hpd, HermitianEigen, HpdRoots};
pub use expm::expm;
pub use matrix::{CMatrix, C64, I, ONE, ZERO};
