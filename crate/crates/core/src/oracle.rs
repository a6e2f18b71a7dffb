//! Brute-force reference propagator for `iU̇ = H(t)U`, `U(0) = I`.
//!
//! Each step applies the exact exponential of the Hamiltonian sampled at the
//! step midpoint. That is second order for time-dependent `H`, exact for
//! constant `H`, and unitary to the precision of [`expm`].

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::linalg::{expm, CMatrix, I};
use crate::ode::Grid;

const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct PropagationResult {
    pub times: Vec<f64>,
    pub u_samples: Vec<CMatrix>,
    /// Largest Frobenius deviation from a run with twice the steps, over
    /// the shared grid points.
    pub est_error: f64,
}

impl PropagationResult {
    pub fn final_u(&self) -> &CMatrix {
        self.u_samples.last().expect("at least one sample")
    }
}

fn sample(h: &dyn Hamiltonian, t: f64) -> Result<CMatrix> {
    h.check(t)?;
    let m = h.eval(t);
    let resid = m.hermiticity_residual().unwrap_or(f64::INFINITY);
    if resid > HERMITIAN_TOL * m.norm_fro().max(1.0) {
        return Err(Error::Model { time: t, reason: format!("non-Hermitian sample (residual {resid:e})") });
    }
    Ok(m)
}

/// Midpoint-exponential samples on `grid`, starting from the identity.
pub fn propagate_grid(h: &dyn Hamiltonian, grid: &Grid) -> Result<Vec<CMatrix>> {
    let mut u = CMatrix::identity(h.dim());
    let mut out = Vec::with_capacity(grid.steps + 1);
    out.push(u.clone());
    for k in 0..grid.steps {
        let hm = sample(h, grid.time(k) + 0.5 * grid.step)?;
        u = &expm(&hm.scale(-I * grid.step)) * &u;
        out.push(u.clone());
    }
    Ok(out)
}

/// Propagates over `[0, t_end]` with `steps` midpoint-exponential steps and
/// estimates the error against a run with `2·steps`.
pub fn propagate(h: &dyn Hamiltonian, t_end: f64, steps: usize) -> Result<PropagationResult> {
    let grid = Grid::new(0.0, t_end, steps)?;
    let coarse = propagate_grid(h, &grid)?;
    let fine = propagate_grid(h, &Grid::new(0.0, t_end, 2 * steps)?)?;
    let est_error = coarse
        .iter()
        .enumerate()
        .map(|(k, u)| (u - &fine[2 * k]).norm_fro())
        .fold(0.0, f64::max);
    Ok(PropagationResult { times: grid.times(), u_samples: coarse, est_error })
}

/// Doubles the step count from `initial_steps` until the estimated error is
/// at most `tol`, giving up beyond `max_steps`.
pub fn propagate_to_tolerance(
    h: &dyn Hamiltonian,
    t_end: f64,
    tol: f64,
    initial_steps: usize,
    max_steps: usize,
) -> Result<PropagationResult> {
    let mut steps = initial_steps.max(1);
    loop {
        let result = propagate(h, t_end, steps)?;
        if result.est_error <= tol {
            return Ok(result);
        }
        if 2 * steps > max_steps {
            return Err(Error::Contract(format!(
                "oracle did not reach tolerance {tol:e} within {max_steps} steps (estimate {:e})",
                result.est_error
            )));
        }
        steps *= 2;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Distance {
    pub plain: f64,
    /// `min_φ ‖A − e^{iφ}B‖_F`
    pub phase_insensitive: f64,
}

pub fn compare(a: &CMatrix, b: &CMatrix) -> Result<Distance> {
    if a.shape() != b.shape() {
        return Err(Error::Contract(format!("cannot compare {:?} with {:?}", a.shape(), b.shape())));
    }
    let plain = (a - b).norm_fro();
    // the minimizing phase aligns B with A: φ = arg Tr(B†A)
    let overlap = b.inner(a);
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { crate::linalg::ONE };
    let phase_insensitive = (a - &b.scale(phase)).norm_fro();
    Ok(Distance { plain, phase_insensitive })
}
