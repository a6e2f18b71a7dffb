//! Stereographic Bloch pictures: the SU(2) three-vector and the SO(5)
//! five-vector, their linear equations of motion, and a cross-check of the
//! nonlinear Riccati path against the linear one.

use crate::error::{Error, Result};
use crate::factorization::{solve_factored, FactoredSolution, FiberStrategy, SolveOptions};
use crate::hamiltonian::{build_so5, BlockedHamiltonian, So5Coefficients, So5Matrix, SpinHalfField};
use crate::linalg::pauli::sigma;
use crate::linalg::{CMatrix, C64, I};
use crate::ode::{rk4_step, Grid};
use crate::oracle::propagate_grid;
use crate::riccati::{RiccatiForm, So5RiccatiState};

/// Precession constant of `ṁ = −κ B⃗×m⃗` for `H = −½σ⃗·B⃗` under the map
/// [`project2`]. [`measure_kappa`] recovers it from oracle trajectories.
pub const SU2_KAPPA: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector3(pub [f64; 3]);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector5(pub [f64; 5]);

impl BlochVector3 {
    pub const NORTH: Self = Self([0.0, 0.0, 1.0]);

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

impl BlochVector5 {
    pub const NORTH: Self = Self([0.0, 0.0, 0.0, 0.0, 1.0]);

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// `m₊ = m₁ + i m₂ = −2z*/(1+|z|²)`, `m₃ = (1−|z|²)/(1+|z|²)`.
pub fn project2(z: C64) -> BlochVector3 {
    let zz = z.norm_sqr();
    let d = 1.0 + zz;
    let plus = z.conj() * (-2.0 / d);
    BlochVector3([plus.re, plus.im, (1.0 - zz) / d])
}

/// Inverse of [`project2`], undefined at the south pole `m₃ = −1`.
pub fn unproject2(m: &BlochVector3) -> Result<C64> {
    let d = 1.0 + m.0[2];
    if d <= 1e-14 {
        return Err(Error::Singular { value: d, threshold: 1e-14 });
    }
    Ok(-C64::new(m.0[0], m.0[1]).conj() / d)
}

/// `m_μ = −2z_μ/(1+z·z)`, `m₅ = (1−z·z)/(1+z·z)`.
pub fn project5(z: &[f64; 4]) -> BlochVector5 {
    let zz: f64 = z.iter().map(|x| x * x).sum();
    let d = 1.0 + zz;
    BlochVector5([-2.0 * z[0] / d, -2.0 * z[1] / d, -2.0 * z[2] / d, -2.0 * z[3] / d, (1.0 - zz) / d])
}

/// Inverse of [`project5`], undefined at `m₅ = −1`.
pub fn unproject5(m: &BlochVector5) -> Result<[f64; 4]> {
    let d = 1.0 + m.0[4];
    if d <= 1e-14 {
        return Err(Error::Singular { value: d, threshold: 1e-14 });
    }
    Ok(std::array::from_fn(|mu| -m.0[mu] / d))
}

/// Bloch vector of the state `U|N⟩` of a 2×2 evolution operator. Agrees
/// with [`project2`] on `z` whenever `U = U₁U₂`, but has no pole.
pub fn bloch3_from_u(u: &CMatrix) -> Result<BlochVector3> {
    if u.shape() != (2, 2) {
        return Err(Error::Contract("SU(2) Bloch vector needs a 2x2 operator".into()));
    }
    let (a, b) = (u[(0, 1)], u[(1, 1)]);
    let d = a.norm_sqr() + b.norm_sqr();
    let plus = a.conj() * b * (-2.0 / d);
    Ok(BlochVector3([plus.re, plus.im, (b.norm_sqr() - a.norm_sqr()) / d]))
}

/// Five-vector of the lower two columns of a 4×4 SO(5) evolution operator.
pub fn bloch5_from_u(u: &CMatrix) -> Result<BlochVector5> {
    if u.shape() != (4, 4) {
        return Err(Error::Contract("SO(5) Bloch vector needs a 4x4 operator".into()));
    }
    let top = u.block(0, 2, 2, 2);
    let bottom = u.block(2, 2, 2, 2);
    // W = z/(1 + z·z) for z = z₄I − i z_iσ_i
    let w = &top * &bottom.adjoint();
    let z4 = w.trace().re * 0.5;
    let zi: [f64; 3] = std::array::from_fn(|i| ((&sigma(i) * &w).trace() * (I * 0.5)).re);
    let zs = So5RiccatiState { z4, zi }.to_array();
    let m5 = (&bottom.adjoint() * &bottom).trace().re - 1.0;
    Ok(BlochVector5([-2.0 * zs[0], -2.0 * zs[1], -2.0 * zs[2], -2.0 * zs[3], m5]))
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// `ṁ = −κ B⃗×m⃗` with `κ = SU2_KAPPA`.
pub fn bloch3_rhs(b: &[f64; 3], m: &[f64; 3]) -> [f64; 3] {
    cross(b, m).map(|x| -SU2_KAPPA * x)
}

/// `ṁ_μ = 2F_{μν}m_ν`
pub fn bloch5_rhs(f: &So5Matrix, m: &[f64; 5]) -> [f64; 5] {
    std::array::from_fn(|mu| 2.0 * (0..5).map(|nu| f[mu][nu] * m[nu]).sum::<f64>())
}

pub fn integrate_bloch3(field: &SpinHalfField, m0: BlochVector3, grid: &Grid) -> Result<Vec<BlochVector3>> {
    let mut f = |t: f64, m: &[f64; 3]| Ok(bloch3_rhs(&field.field_at(t), m));
    let mut m = m0.0;
    let mut out = vec![m0];
    for k in 0..grid.steps {
        m = rk4_step(&mut f, grid.time(k), &m, grid.step)?;
        out.push(BlochVector3(m));
    }
    Ok(out)
}

pub fn integrate_bloch5(coeffs: &So5Coefficients, m0: BlochVector5, grid: &Grid) -> Result<Vec<BlochVector5>> {
    let mut f = |t: f64, m: &[f64; 5]| Ok(bloch5_rhs(&coeffs.at(t)?, m));
    let mut m = m0.0;
    let mut out = vec![m0];
    for k in 0..grid.steps {
        m = rk4_step(&mut f, grid.time(k), &m, grid.step)?;
        out.push(BlochVector5(m));
    }
    Ok(out)
}

/// Least-squares fit of `κ` in `ṁ = −κ B⃗×m⃗` along the oracle trajectory of
/// the state `U(t)|N⟩`, with `ṁ` from centered differences.
pub fn measure_kappa(field: &SpinHalfField, grid: &Grid) -> Result<f64> {
    let us = propagate_grid(field, grid)?;
    let ms = us.iter().map(bloch3_from_u).collect::<Result<Vec<_>>>()?;
    let (mut num, mut den) = (0.0, 0.0);
    for k in 1..grid.steps {
        let mdot: [f64; 3] = std::array::from_fn(|i| (ms[k + 1].0[i] - ms[k - 1].0[i]) / (2.0 * grid.step));
        let bxm = cross(&field.field_at(grid.time(k)), &ms[k].0);
        num -= (0..3).map(|i| mdot[i] * bxm[i]).sum::<f64>();
        den += bxm.iter().map(|x| x * x).sum::<f64>();
    }
    if den == 0.0 {
        return Err(Error::Contract("κ is undetermined when B⃗×m⃗ vanishes along the path".into()));
    }
    Ok(num / den)
}

#[derive(Clone)]
pub enum PictureScenario {
    SpinHalf(SpinHalfField),
    So5(So5Coefficients),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrosscheckReport {
    pub times: Vec<f64>,
    /// Bloch vectors mapped from the Riccati solution (padded with zeros
    /// to five components for SU(2)).
    pub riccati: Vec<[f64; 5]>,
    pub linear: Vec<[f64; 5]>,
    pub max_deviation: f64,
    /// Largest `|‖m‖ − 1|` along the linear path.
    pub norm_drift: f64,
    /// Largest deviation of centered-difference `ṁ` along the Riccati
    /// path from the linear right-hand side, over interior points.
    pub fd_residual: f64,
    pub restart_times: Vec<f64>,
    /// Fitted SU(2) precession constant.
    pub kappa: Option<f64>,
}

fn pad3(m: &BlochVector3) -> [f64; 5] {
    [m.0[0], m.0[1], m.0[2], 0.0, 0.0]
}

/// Bloch vectors along a factorized solution: stereographic image of `z`
/// on the first Riccati segment, the homogeneous map of `U` after restarts.
fn mapped_path(sol: &FactoredSolution, so5: bool) -> Result<Vec<[f64; 5]>> {
    (0..=sol.trajectory.grid.steps)
        .map(|k| {
            let z = sol.trajectory.z_at(k);
            if sol.trajectory.locate(k).0 == 0 {
                if so5 {
                    Ok(project5(&So5RiccatiState::from_matrix(z)?.to_array()).0)
                } else {
                    Ok(pad3(&project2(z[(0, 0)])))
                }
            } else {
                let u = sol.u_at(k)?;
                if so5 {
                    Ok(bloch5_from_u(&u)?.0)
                } else {
                    Ok(pad3(&bloch3_from_u(&u)?))
                }
            }
        })
        .collect()
}

fn restart_times(sol: &FactoredSolution) -> Vec<f64> {
    sol.trajectory.restarts.iter().map(|r| r.time).collect()
}

/// Integrates the Riccati path and the linear Bloch path from the north
/// pole and compares them pointwise.
pub fn crosscheck_pictures(scenario: &PictureScenario, grid: Grid, z_max: f64) -> Result<CrosscheckReport> {
    let times = grid.times();
    let dist = |a: &[f64; 5], b: &[f64; 5]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();

    let (riccati, linear, rhs_at, restarts, kappa): (Vec<[f64; 5]>, Vec<[f64; 5]>, Box<dyn Fn(f64, &[f64; 5]) -> Result<[f64; 5]>>, Vec<f64>, Option<f64>) =
        match scenario {
            PictureScenario::SpinHalf(field) => {
                let h = BlockedHamiltonian::new(field.clone(), 1)?;
                let opts = SolveOptions::new(grid, FiberStrategy::Hierarchical).z_max(z_max);
                let sol = solve_factored(&h, &opts)?;
                let linear = integrate_bloch3(field, BlochVector3::NORTH, &grid)?.iter().map(pad3).collect();
                let kappa = measure_kappa(field, &grid).ok();
                let field = field.clone();
                let rhs = move |t: f64, m: &[f64; 5]| {
                    let d = bloch3_rhs(&field.field_at(t), &[m[0], m[1], m[2]]);
                    Ok([d[0], d[1], d[2], 0.0, 0.0])
                };
                (mapped_path(&sol, false)?, linear, Box::new(rhs), restart_times(&sol), kappa)
            }
            PictureScenario::So5(coeffs) => {
                let h = build_so5(coeffs.clone())?;
                let opts = SolveOptions::new(grid, FiberStrategy::Direct)
                    .z_max(z_max)
                    .form(RiccatiForm::So5(coeffs.clone()));
                let sol = solve_factored(&h, &opts)?;
                let linear = integrate_bloch5(coeffs, BlochVector5::NORTH, &grid)?.iter().map(|m| m.0).collect();
                let coeffs = coeffs.clone();
                let rhs = move |t: f64, m: &[f64; 5]| Ok(bloch5_rhs(&coeffs.at(t)?, m));
                (mapped_path(&sol, true)?, linear, Box::new(rhs), restart_times(&sol), None)
            }
        };

    let max_deviation = riccati.iter().zip(&linear).map(|(a, b)| dist(a, b)).fold(0.0, f64::max);
    let norm_drift = linear
        .iter()
        .map(|m| (m.iter().map(|x| x * x).sum::<f64>().sqrt() - 1.0).abs())
        .fold(0.0, f64::max);
    let mut fd_residual: f64 = 0.0;
    for k in 1..grid.steps {
        let fd: [f64; 5] = std::array::from_fn(|i| (riccati[k + 1][i] - riccati[k - 1][i]) / (2.0 * grid.step));
        fd_residual = fd_residual.max(dist(&fd, &rhs_at(times[k], &riccati[k])?));
    }
    Ok(CrosscheckReport { times, riccati, linear, max_deviation, norm_drift, fd_residual, restart_times: restarts, kappa })
}
