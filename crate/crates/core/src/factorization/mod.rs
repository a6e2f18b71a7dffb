//! Factorization of the evolution operator as `U = U₁U₂`: a base factor
//! built from the Riccati coordinate `z` and a block-diagonal fiber factor.

pub mod effective;
pub mod phase;
pub mod solve;
pub mod unitarity;

pub use effective::{corner_bracket, effective_hamiltonian_hermitian, effective_hamiltonian_tilde, recursion_hamiltonian};
pub use phase::{PhaseSeries, PhaseTotals};
pub use solve::{
    hierarchical_solve, reconstruct_full, solve_factored, FactoredEvolution, FactoredSolution, FiberStrategy,
    SegmentFiber, SolveOptions,
};
pub use unitarity::{assemble_tilde_u1, gamma1_roots_column, gauge_from_z, gauge_unitarize, unitarity_closure, Closure, Gauge};
