pub mod bloch;
pub mod error;
pub mod factorization;
pub mod hamiltonian;
pub mod linalg;
pub mod ode;
pub mod oracle;
pub mod riccati;

pub use error::{Error, Result};
