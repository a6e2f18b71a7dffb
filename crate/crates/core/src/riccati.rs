//! Base-manifold dynamics: the matrix Riccati equation
//! `iż = H̃^(N−n) z + V − z (V†z + H̃^(n))` for the `(N−n)×n` coordinate `z`,
//! and its four-real-parameter form for the SO(5) two-qubit Hamiltonian.
//!
//! `z` diverges where the evolving subspace leaves the coordinate chart
//! anchored at the identity. Integration then restarts: the evolution
//! accumulated so far is materialized by a [`SegmentClosure`] and `z` is
//! re-anchored at zero, which is exact because `U(t) = U_seg(t) · U(t_r)`.

use crate::error::{Error, Result};
use crate::hamiltonian::{BlockedHamiltonian, Blocks, So5Coefficients, So5Matrix};
use crate::linalg::pauli::{identity2, sigma};
use crate::linalg::{CMatrix, C64, I};
use crate::ode::{rk4_step, Grid, OdeState};

pub const DEFAULT_Z_MAX: f64 = 10.0;

/// A segment must span at least this many steps before it may restart.
pub const MIN_STEPS_PER_SEGMENT: usize = 4;

/// `ż = −i [H̃top z + V − z (V† z + H̃bot)]`
pub fn riccati_rhs(blocks: &Blocks, z: &CMatrix) -> Result<CMatrix> {
    let expect = (blocks.top.rows(), blocks.bottom.rows());
    if z.shape() != expect {
        return Err(Error::Contract(format!(
            "z has shape {:?}, blocks require {:?}",
            z.shape(),
            expect
        )));
    }
    let v = &blocks.coupling;
    let inner = &(&v.adjoint() * z) + &blocks.bottom;
    let bracket = &(&(&blocks.top * z) + v) - &(z * &inner);
    Ok(bracket.scale(-I))
}

/// `ż_μ = F_{5μ}(1 − z_νz_ν) + 2F_{μν}z_ν + 2F_{5ν}z_νz_μ`, with `ν` summed
/// over the four components. The state is `[z₁, z₂, z₃, z₄]`.
pub fn so5_rhs(f: &So5Matrix, z: &[f64; 4]) -> [f64; 4] {
    let zz: f64 = z.iter().map(|x| x * x).sum();
    let f5z: f64 = (0..4).map(|nu| f[4][nu] * z[nu]).sum();
    std::array::from_fn(|mu| {
        let rot: f64 = (0..4).map(|nu| f[mu][nu] * z[nu]).sum();
        f[4][mu] * (1.0 - zz) + 2.0 * rot + 2.0 * f5z * z[mu]
    })
}

/// The four real coordinates of the SO(5) base point, `z = z₄I − i z_iσ_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct So5RiccatiState {
    pub z4: f64,
    pub zi: [f64; 3],
}

impl So5RiccatiState {
    pub fn from_array(z: &[f64; 4]) -> Self {
        Self { z4: z[3], zi: [z[0], z[1], z[2]] }
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.zi[0], self.zi[1], self.zi[2], self.z4]
    }

    pub fn to_matrix(&self) -> CMatrix {
        let mut m = identity2().scale_real(self.z4);
        for (i, zi) in self.zi.iter().enumerate() {
            m -= &sigma(i).scale(I * *zi);
        }
        m
    }

    /// Inverts [`to_matrix`](Self::to_matrix); fails when `m` is not of the
    /// real quaternionic form.
    pub fn from_matrix(m: &CMatrix) -> Result<Self> {
        if m.shape() != (2, 2) {
            return Err(Error::Contract("SO(5) z must be 2x2".into()));
        }
        let z4 = m.trace() * 0.5;
        let zi: [C64; 3] = std::array::from_fn(|i| (&sigma(i) * m).trace() * (I * 0.5));
        let state = Self { z4: z4.re, zi: zi.map(|c| c.re) };
        let resid = (&state.to_matrix() - m).norm_fro();
        if resid > 1e-12 * m.norm_fro().max(1.0) {
            return Err(Error::Contract(format!("z is not of the form z₄I − i z_iσ_i (residual {resid:e})")));
        }
        Ok(state)
    }
}

pub fn so5_z_matrix(z: &[f64; 4]) -> CMatrix {
    So5RiccatiState::from_array(z).to_matrix()
}

/// How the Riccati equation is represented during integration.
#[derive(Clone)]
pub enum RiccatiForm {
    /// The generic matrix equation on the Hamiltonian's blocks.
    Matrix,
    /// The four-real SO(5) form driven directly by `F_{μν}(t)`.
    So5(So5Coefficients),
}

#[derive(Clone)]
pub struct RiccatiOptions {
    pub grid: Grid,
    pub z_max: f64,
    pub form: RiccatiForm,
    /// Accumulate a step-doubling estimate of the global error.
    pub estimate_error: bool,
}

impl RiccatiOptions {
    pub fn new(grid: Grid) -> Self {
        Self { grid, z_max: DEFAULT_Z_MAX, form: RiccatiForm::Matrix, estimate_error: false }
    }

    pub fn z_max(mut self, z_max: f64) -> Self {
        self.z_max = z_max;
        self
    }

    pub fn form(mut self, form: RiccatiForm) -> Self {
        self.form = form;
        self
    }

    pub fn estimate_error(mut self, on: bool) -> Self {
        self.estimate_error = on;
        self
    }
}

/// Samples of `z` (and `ż`) between two restarts; `z[j]` lives at grid index
/// `start + j` and `z[0]` is zero.
#[derive(Debug, Clone)]
pub struct RiccatiSegment {
    pub start: usize,
    pub z: Vec<CMatrix>,
    pub zdot: Vec<CMatrix>,
}

impl RiccatiSegment {
    pub fn end(&self) -> usize {
        self.start + self.z.len() - 1
    }

    pub fn steps(&self) -> usize {
        self.z.len() - 1
    }
}

#[derive(Debug, Clone)]
pub struct Restart {
    pub time: f64,
    pub index: usize,
    /// Full evolution operator `U(t_r)` at the restart.
    pub accumulated: CMatrix,
}

#[derive(Debug, Clone)]
pub struct RiccatiTrajectory {
    pub grid: Grid,
    pub dim: usize,
    pub segments: Vec<RiccatiSegment>,
    pub restarts: Vec<Restart>,
    /// `U(t_end)` assembled across all segments.
    pub final_evolution: CMatrix,
    /// Step-doubling error estimate (zero unless requested).
    pub est_error: f64,
}

impl RiccatiTrajectory {
    pub fn times(&self) -> Vec<f64> {
        self.grid.times()
    }

    /// Segment index and local offset of grid index `k`. Restart indices
    /// belong to the segment that starts there.
    pub fn locate(&self, k: usize) -> (usize, usize) {
        let s = self.segments.partition_point(|seg| seg.start <= k).saturating_sub(1);
        (s, k - self.segments[s].start)
    }

    pub fn z_at(&self, k: usize) -> &CMatrix {
        let (s, j) = self.locate(k);
        &self.segments[s].z[j]
    }

    pub fn z_samples(&self) -> Vec<CMatrix> {
        (0..=self.grid.steps).map(|k| self.z_at(k).clone()).collect()
    }

    /// Evolution operator accumulated before segment `s` starts.
    pub fn accumulated_before(&self, s: usize) -> CMatrix {
        if s == 0 {
            CMatrix::identity(self.dim)
        } else {
            self.restarts[s - 1].accumulated.clone()
        }
    }
}

/// Materializes the evolution operator of a finished segment,
/// `U_seg(t_end of segment)` with `U_seg(t_start) = I`.
pub trait SegmentClosure {
    fn close(&mut self, grid: &Grid, segment: &RiccatiSegment) -> Result<CMatrix>;
}

impl<F> SegmentClosure for F
where
    F: FnMut(&Grid, &RiccatiSegment) -> Result<CMatrix>,
{
    fn close(&mut self, grid: &Grid, segment: &RiccatiSegment) -> Result<CMatrix> {
        self(grid, segment)
    }
}

#[derive(Clone)]
enum State {
    Matrix(CMatrix),
    So5([f64; 4]),
}

impl State {
    fn matrix(&self) -> CMatrix {
        match self {
            State::Matrix(z) => z.clone(),
            State::So5(z) => so5_z_matrix(z),
        }
    }
}

impl OdeState for State {
    fn add_scaled(&self, a: f64, other: &Self) -> Self {
        match (self, other) {
            (State::Matrix(x), State::Matrix(y)) => State::Matrix(x.add_scaled(a, y)),
            (State::So5(x), State::So5(y)) => State::So5(x.add_scaled(a, y)),
            _ => unreachable!("mixed Riccati state forms"),
        }
    }

    fn distance(&self, other: &Self) -> f64 {
        match (self, other) {
            (State::Matrix(x), State::Matrix(y)) => x.distance(y),
            (State::So5(x), State::So5(y)) => so5_z_matrix(x).distance(&so5_z_matrix(y)),
            _ => unreachable!("mixed Riccati state forms"),
        }
    }
}

/// Integrates the Riccati equation with classical RK4 on `opts.grid`,
/// restarting whenever `‖z‖_F` would exceed `opts.z_max`.
pub fn integrate_riccati(
    h: &BlockedHamiltonian,
    opts: &RiccatiOptions,
    closure: &mut dyn SegmentClosure,
) -> Result<RiccatiTrajectory> {
    if !(opts.z_max > 1.0) {
        return Err(Error::Contract(format!("Z_max must exceed 1 (got {})", opts.z_max)));
    }
    let dim = h.dim();
    let n = h.block_size();
    if let RiccatiForm::So5(_) = opts.form {
        if dim != 4 || n != 2 {
            return Err(Error::Contract("the SO(5) Riccati form needs N = 4, n = 2".into()));
        }
    }
    let grid = opts.grid;
    let zero = match opts.form {
        RiccatiForm::Matrix => State::Matrix(CMatrix::zeros(dim - n, n)),
        RiccatiForm::So5(_) => State::So5([0.0; 4]),
    };

    let mut rhs = |t: f64, s: &State| -> Result<State> {
        match (s, &opts.form) {
            (State::Matrix(z), _) => Ok(State::Matrix(riccati_rhs(&h.blocks_at(t)?, z)?)),
            (State::So5(z), RiccatiForm::So5(coeffs)) => Ok(State::So5(so5_rhs(&coeffs.at(t)?, z))),
            _ => unreachable!(),
        }
    };

    let new_segment = |start: usize, rhs: &mut dyn FnMut(f64, &State) -> Result<State>| -> Result<RiccatiSegment> {
        let d = rhs(grid.time(start), &zero)?;
        Ok(RiccatiSegment { start, z: vec![zero.matrix()], zdot: vec![d.matrix()] })
    };

    let mut segments = Vec::new();
    let mut restarts = Vec::new();
    let mut accumulated = CMatrix::identity(dim);
    let mut segment = new_segment(0, &mut rhs)?;
    let mut state = zero.clone();
    let mut est_error = 0.0;
    let mut k = 0;

    while k < grid.steps {
        let t = grid.time(k);
        let next = rk4_step(&mut rhs, t, &state, grid.step)?;
        let z_next = next.matrix();

        if z_next.norm_fro() > opts.z_max || !z_next.norm_fro().is_finite() {
            let since = k - segment.start;
            if since < MIN_STEPS_PER_SEGMENT {
                return Err(Error::Stiffness { time: t, level: dim, steps_since_restart: since });
            }
            let u_seg = closure.close(&grid, &segment)?;
            accumulated = &u_seg * &accumulated;
            restarts.push(Restart { time: t, index: k, accumulated: accumulated.clone() });
            segments.push(segment);
            segment = new_segment(k, &mut rhs)?;
            state = zero.clone();
            continue;
        }

        if opts.estimate_error {
            let half = 0.5 * grid.step;
            let mid = rk4_step(&mut rhs, t, &state, half)?;
            let fine = rk4_step(&mut rhs, t + half, &mid, half)?;
            est_error += next.distance(&fine) / 15.0;
        }

        let zdot = rhs(grid.time(k + 1), &next)?.matrix();
        segment.z.push(z_next);
        segment.zdot.push(zdot);
        state = next;
        k += 1;
    }

    let u_seg = closure.close(&grid, &segment)?;
    let final_evolution = &u_seg * &accumulated;
    segments.push(segment);
    Ok(RiccatiTrajectory { grid, dim, segments, restarts, final_evolution, est_error })
}
