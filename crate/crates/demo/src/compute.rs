//! Flat `f64` buffers for the page to plot. Every buffer starts with a small
//! header so JavaScript can slice it without extra calls.

use unitint::bloch::{crosscheck_pictures, PictureScenario};
use unitint::factorization::{solve_factored, FiberStrategy, SolveOptions};
use unitint::hamiltonian::{BlockedHamiltonian, So5Coefficients, So5Matrix, SpinHalfField};
use unitint::ode::Grid;

pub const BLOCH3_STRIDE: usize = 7;
pub const PHASE_STRIDE: usize = 4;
pub const BLOCH5_STRIDE: usize = 11;

fn field(bx: f64, by: f64, bz: f64, omega: f64) -> SpinHalfField {
    SpinHalfField::rotating([bx, by, bz], omega)
}

/// `[restarts, max_deviation, (t, m₁ m₂ m₃ from z, m₁ m₂ m₃ linear)…]`
pub fn bloch3(bx: f64, by: f64, bz: f64, omega: f64, t_end: f64, steps: usize, z_max: f64) -> unitint::Result<Vec<f64>> {
    let grid = Grid::new(0.0, t_end, steps)?;
    let r = crosscheck_pictures(&PictureScenario::SpinHalf(field(bx, by, bz, omega)), grid, z_max)?;
    let mut out = vec![r.restart_times.len() as f64, r.max_deviation];
    for ((t, a), b) in r.times.iter().zip(&r.riccati).zip(&r.linear) {
        out.push(*t);
        out.extend_from_slice(&a[..3]);
        out.extend_from_slice(&b[..3]);
    }
    Ok(out)
}

/// `[restarts, (t, μ, geometric, dynamical)…]`
pub fn spin_phases(bx: f64, by: f64, bz: f64, omega: f64, t_end: f64, steps: usize, z_max: f64) -> unitint::Result<Vec<f64>> {
    let h = BlockedHamiltonian::new(field(bx, by, bz, omega), 1)?;
    let grid = Grid::new(0.0, t_end, steps)?;
    let sol = solve_factored(&h, &SolveOptions::new(grid, FiberStrategy::Hierarchical).z_max(z_max))?;
    let p = sol.phases.as_ref().expect("n = 1 solutions carry phases");
    let mut out = vec![sol.trajectory.restarts.len() as f64];
    for (k, t) in sol.times().into_iter().enumerate() {
        out.extend_from_slice(&[t, p.mu_total[k], p.geometric[k], p.dynamical[k]]);
    }
    Ok(out)
}

/// `F` with `F₅₄ = c` and `F₂₁ = a`, the rest zero.
fn so5_field(c: f64, a: f64) -> So5Matrix {
    let mut f = [[0.0; 5]; 5];
    f[4][3] = c;
    f[3][4] = -c;
    f[1][0] = a;
    f[0][1] = -a;
    f
}

/// `[restart count, restart times…, max_deviation, (t, m from z, m linear)…]`
pub fn bloch5(c: f64, a: f64, t_end: f64, steps: usize, z_max: f64) -> unitint::Result<Vec<f64>> {
    let grid = Grid::new(0.0, t_end, steps)?;
    let coeffs = So5Coefficients::constant(so5_field(c, a));
    let r = crosscheck_pictures(&PictureScenario::So5(coeffs), grid, z_max)?;
    let mut out = vec![r.restart_times.len() as f64];
    out.extend_from_slice(&r.restart_times);
    out.push(r.max_deviation);
    for ((t, a), b) in r.times.iter().zip(&r.riccati).zip(&r.linear) {
        out.push(*t);
        out.extend_from_slice(a);
        out.extend_from_slice(b);
    }
    Ok(out)
}
