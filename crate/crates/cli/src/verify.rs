//! Seeded randomized invariant checks behind `unitint verify`.

use rand::Rng;
use unitint::bloch::{crosscheck_pictures, PictureScenario};
use unitint::factorization::{
    corner_bracket, effective_hamiltonian_hermitian, gamma1_roots_column, recursion_hamiltonian, solve_factored,
    unitarity_closure, FiberStrategy, SolveOptions,
};
use unitint::hamiltonian::{BlockedHamiltonian, Blocks, ConstantHamiltonian, So5Coefficients, SpinHalfField, TrigHamiltonian};
use unitint::linalg::random::{antisymmetric5_with, complex_with, rng, traceless_hermitian_with};
use unitint::linalg::{sqrt_hpd, CMatrix, C64, I};
use unitint::ode::Grid;
use unitint::riccati::{integrate_riccati, riccati_rhs, RiccatiOptions, RiccatiSegment};

/// Override name that applies to every check.
pub const ALL_CHECKS: &str = "*";

type Check = fn(u64, usize) -> unitint::Result<f64>;

pub struct InvariantCheck {
    pub name: &'static str,
    pub tolerance: f64,
    run: Check,
}

pub const CHECKS: &[InvariantCheck] = &[
    InvariantCheck { name: "closure", tolerance: 1e-10, run: closure },
    InvariantCheck { name: "gamma_roots", tolerance: 1e-12, run: gamma_roots },
    InvariantCheck { name: "hermiticity", tolerance: 1e-9, run: hermiticity },
    InvariantCheck { name: "trace_identity", tolerance: 1e-10, run: trace_identity },
    InvariantCheck { name: "gamma_dot", tolerance: 1e-7, run: gamma_dot },
    InvariantCheck { name: "phase_split", tolerance: 1e-7, run: phase_split },
    InvariantCheck { name: "unitarity", tolerance: 1e-8, run: unitarity },
    InvariantCheck { name: "picture_crosscheck", tolerance: 1e-6, run: picture_crosscheck },
];

/// Draws `(N, n)` with `2 ≤ N ≤ max_dim` and `1 ≤ n ≤ N/2`.
fn dims(r: &mut impl Rng, max_dim: usize) -> (usize, usize) {
    let dim = r.gen_range(2..=max_dim.max(2));
    (dim, r.gen_range(1..=dim / 2))
}

fn closure(seed: u64, max_dim: usize) -> unitint::Result<f64> {
    let mut r = rng(seed);
    let (dim, n) = dims(&mut r, max_dim);
    let z = complex_with(&mut r, dim - n, n).scale_real(r.gen_range(0.1..3.0));
    let cl = unitarity_closure(&z)?;
    Ok((&z + &(&cl.gamma1 * &cl.w)).max_abs())
}

fn gamma_roots(seed: u64, max_dim: usize) -> unitint::Result<f64> {
    let mut r = rng(seed);
    let dim = r.gen_range(2..=max_dim.max(2));
    let z = complex_with(&mut r, dim - 1, 1).scale_real(r.gen_range(0.1..3.0));
    let gamma1 = unitarity_closure(&z)?.gamma1;
    let (s, si) = gamma1_roots_column(&z)?;
    let eig = sqrt_hpd(&gamma1)?;
    Ok((&s - &eig.sqrt).max_abs().max((&si - &eig.inv_sqrt).max_abs()).max((&(&s * &s) - &gamma1).max_abs()))
}

fn hermiticity(seed: u64, max_dim: usize) -> unitint::Result<f64> {
    let mut r = rng(seed);
    let (dim, n) = dims(&mut r, max_dim);
    let blocks = Blocks::from_matrix(&traceless_hermitian_with(&mut r, dim), n);
    let z = complex_with(&mut r, dim - n, n);
    let zdot = riccati_rhs(&blocks, &z)?;
    let (u, l) = effective_hamiltonian_hermitian(&blocks, &z, &zdot)?;
    Ok(u.hermiticity_residual().unwrap_or(f64::INFINITY).max(l.hermiticity_residual().unwrap_or(f64::INFINITY)))
}

fn trace_identity(seed: u64, max_dim: usize) -> unitint::Result<f64> {
    let mut r = rng(seed);
    let dim = r.gen_range(2..=max_dim.max(2));
    let blocks = Blocks::from_matrix(&traceless_hermitian_with(&mut r, dim), 1);
    let z = complex_with(&mut r, dim - 1, 1);
    let rec = recursion_hamiltonian(&blocks, &z)?;
    Ok((rec.trace() + C64::new(corner_bracket(&blocks, &z)?, 0.0)).norm())
}

/// Five-point differences of `γ = 1 + |z|²` against `i γ (V†z − z†V)`.
fn gamma_dot(seed: u64, max_dim: usize) -> unitint::Result<f64> {
    let mut r = rng(seed);
    let dim = r.gen_range(2..=max_dim.max(2));
    let hm = traceless_hermitian_with(&mut r, dim);
    let blocks = Blocks::from_matrix(&hm, 1);
    let h = BlockedHamiltonian::new(ConstantHamiltonian(hm), 1)?;
    let grid = Grid::new(0.0, 0.2, 2000)?;
    let mut close = |_: &Grid, _: &RiccatiSegment| Ok(CMatrix::identity(dim));
    let traj = integrate_riccati(&h, &RiccatiOptions::new(grid).z_max(1e6), &mut close)?;
    let gamma = |k: usize| 1.0 + traj.z_at(k).norm_fro().powi(2);
    let mut worst: f64 = 0.0;
    for k in (250..2000).step_by(250) {
        let fd = (8.0 * (gamma(k + 1) - gamma(k - 1)) - (gamma(k + 2) - gamma(k - 2))) / (12.0 * grid.step);
        let vz = (&blocks.coupling.adjoint() * traj.z_at(k))[(0, 0)];
        worst = worst.max((fd - (I * gamma(k) * (vz - vz.conj())).re).abs());
    }
    Ok(worst)
}

fn phase_split(seed: u64, max_dim: usize) -> unitint::Result<f64> {
    let mut r = rng(seed);
    let dim = r.gen_range(2..=max_dim.max(2));
    let h = BlockedHamiltonian::new(TrigHamiltonian::random(dim, 2, r.gen_range(0.5..2.0), 1.0, seed), 1)?;
    let grid = Grid::new(0.0, 1.0, 500)?;
    let sol = solve_factored(&h, &SolveOptions::new(grid, FiberStrategy::Hierarchical))?;
    let p = sol.phases.as_ref().expect("hierarchical runs carry phases");
    Ok((0..p.len()).map(|k| (p.geometric[k] + p.dynamical_integrated[k] - p.mu_total[k]).abs()).fold(0.0, f64::max))
}

fn unitarity(seed: u64, max_dim: usize) -> unitint::Result<f64> {
    let mut r = rng(seed);
    let (dim, n) = dims(&mut r, max_dim);
    let h = BlockedHamiltonian::new(TrigHamiltonian::random(dim, 2, r.gen_range(0.5..2.0), 1.0, seed), n)?;
    let strategy = if n == 1 && r.gen_bool(0.5) { FiberStrategy::Hierarchical } else { FiberStrategy::Direct };
    let grid = Grid::new(0.0, 1.0, 200)?;
    let sol = solve_factored(&h, &SolveOptions::new(grid, strategy).z_max(3.0))?;
    let us = sol.u_samples()?;
    Ok(us.iter().map(|u| u.unitarity_residual().unwrap_or(f64::INFINITY)).fold(0.0, f64::max))
}

fn picture_crosscheck(seed: u64, _: usize) -> unitint::Result<f64> {
    let mut r = rng(seed);
    let grid = Grid::new(0.0, 1.0, 1000)?;
    let scenario = if seed.is_multiple_of(2) {
        PictureScenario::So5(So5Coefficients::constant(antisymmetric5_with(&mut r)))
    } else {
        let b: [f64; 3] = std::array::from_fn(|_| r.gen_range(-2.0..2.0));
        PictureScenario::SpinHalf(SpinHalfField::rotating(b, r.gen_range(0.0..2.0)))
    };
    Ok(crosscheck_pictures(&scenario, grid, 3.0)?.max_deviation)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckSummary {
    pub name: &'static str,
    pub tolerance: f64,
    pub worst: f64,
    pub worst_seed: u64,
    /// Seeds whose residual exceeded the tolerance or whose run errored.
    pub failing: Vec<u64>,
}

impl CheckSummary {
    pub fn pass(&self) -> bool {
        self.failing.is_empty()
    }
}

/// Runs every check on seeds `seed..seed + count`. `overrides` replaces the
/// named default tolerances, later entries winning.
pub fn verify(seed: u64, count: usize, max_dim: usize, overrides: &[(String, f64)]) -> Vec<CheckSummary> {
    CHECKS
        .iter()
        .map(|check| {
            let tolerance =
                overrides.iter().rev().find(|(n, _)| n == check.name || n == ALL_CHECKS).map_or(check.tolerance, |(_, t)| *t);
            let mut summary =
                CheckSummary { name: check.name, tolerance, worst: 0.0, worst_seed: seed, failing: Vec::new() };
            for s in seed..seed + count as u64 {
                let residual = (check.run)(s, max_dim).unwrap_or(f64::INFINITY);
                if residual > summary.worst || residual.is_nan() {
                    summary.worst = residual;
                    summary.worst_seed = s;
                }
                if !(residual <= tolerance) {
                    summary.failing.push(s);
                }
            }
            summary
        })
        .collect()
}

pub fn render_table(summaries: &[CheckSummary]) -> String {
    let mut out = format!("{:<20} {:>10} {:>12} {:>10}  {}\n", "check", "tolerance", "worst", "seed", "status");
    for s in summaries {
        out.push_str(&format!(
            "{:<20} {:>10.1e} {:>12.3e} {:>10}  {}\n",
            s.name,
            s.tolerance,
            s.worst,
            s.worst_seed,
            if s.pass() { "ok" } else { "FAIL" }
        ));
    }
    for s in summaries.iter().filter(|s| !s.pass()) {
        let seeds: Vec<String> = s.failing.iter().map(u64::to_string).collect();
        out.push_str(&format!("{} failed for seeds {}\n", s.name, seeds.join(" ")));
    }
    out
}
