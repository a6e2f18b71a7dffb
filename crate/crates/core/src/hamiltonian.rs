//! Time-dependent Hamiltonians (ħ = 1) and their `(N − n, n)` block partition.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::pauli::{identity2, sigma};
use crate::linalg::random::{rng, traceless_hermitian_with};
use crate::linalg::{CMatrix, C64, I, ZERO};

/// Tolerance for the Hermitian/traceless checks, relative to `max(1, ‖H‖_F)`.
pub const MODEL_TOL: f64 = 1e-10;

/// Antisymmetry tolerance for SO(5) coefficient matrices.
pub const ANTISYMMETRY_TOL: f64 = 1e-12;

pub trait Hamiltonian: Send + Sync {
    fn dim(&self) -> usize;

    fn eval(&self, t: f64) -> CMatrix;

    /// Model-specific validity check at `t`, beyond Hermiticity.
    fn check(&self, _t: f64) -> Result<()> {
        Ok(())
    }
}

impl<H: Hamiltonian + ?Sized> Hamiltonian for Arc<H> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn eval(&self, t: f64) -> CMatrix {
        (**self).eval(t)
    }

    fn check(&self, t: f64) -> Result<()> {
        (**self).check(t)
    }
}

/// Diagonal and coupling blocks of a Hamiltonian partitioned as
/// `[[top, coupling], [coupling†, bottom]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Blocks {
    pub top: CMatrix,
    pub coupling: CMatrix,
    pub bottom: CMatrix,
}

impl Blocks {
    pub fn from_matrix(h: &CMatrix, n: usize) -> Self {
        let dim = h.rows();
        assert!(n >= 1 && n < dim, "block size {n} invalid for dimension {dim}");
        let m = dim - n;
        Self {
            top: h.block(0, 0, m, m),
            coupling: h.block(0, m, m, n),
            bottom: h.block(m, m, n, n),
        }
    }

    pub fn assemble(&self) -> CMatrix {
        CMatrix::from_blocks(&self.top, &self.coupling, &self.coupling.adjoint(), &self.bottom)
    }

    pub fn dim(&self) -> usize {
        self.top.rows() + self.bottom.rows()
    }

    pub fn block_size(&self) -> usize {
        self.bottom.rows()
    }
}

/// A Hamiltonian together with the block size `n` of its lower fiber block.
#[derive(Clone)]
pub struct BlockedHamiltonian {
    inner: Arc<dyn Hamiltonian>,
    n: usize,
}

impl fmt::Debug for BlockedHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlockedHamiltonian").field("dim", &self.dim()).field("n", &self.n).finish()
    }
}

impl BlockedHamiltonian {
    pub fn new(h: impl Hamiltonian + 'static, n: usize) -> Result<Self> {
        Self::from_arc(Arc::new(h), n)
    }

    pub fn from_arc(inner: Arc<dyn Hamiltonian>, n: usize) -> Result<Self> {
        let dim = inner.dim();
        if dim < 2 || n < 1 || 2 * n > dim {
            return Err(Error::Contract(format!(
                "block size n = {n} requires N >= 2 and 1 <= n <= N/2 (N = {dim})"
            )));
        }
        Ok(Self { inner, n })
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn block_size(&self) -> usize {
        self.n
    }

    pub fn hamiltonian(&self) -> &Arc<dyn Hamiltonian> {
        &self.inner
    }

    /// Evaluates and validates `H(t)`.
    pub fn eval(&self, t: f64) -> Result<CMatrix> {
        self.inner.check(t)?;
        let h = self.inner.eval(t);
        let scale = h.norm_fro().max(1.0);
        let herm = h.hermiticity_residual().unwrap_or(f64::INFINITY);
        if herm > MODEL_TOL * scale {
            return Err(Error::Model { time: t, reason: format!("H is not Hermitian (‖H − H†‖ = {herm:e})") });
        }
        let tr = h.trace().norm();
        if tr > MODEL_TOL * scale {
            return Err(Error::Model { time: t, reason: format!("H is not traceless (|Tr H| = {tr:e})") });
        }
        Ok(h)
    }

    pub fn blocks_at(&self, t: f64) -> Result<Blocks> {
        Ok(Blocks::from_matrix(&self.eval(t)?, self.n))
    }
}

/// Wraps a closure as a Hamiltonian.
pub struct FnHamiltonian<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(f64) -> CMatrix + Send + Sync> FnHamiltonian<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(f64) -> CMatrix + Send + Sync> Hamiltonian for FnHamiltonian<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, t: f64) -> CMatrix {
        (self.f)(t)
    }
}

#[derive(Debug, Clone)]
pub struct ConstantHamiltonian(pub CMatrix);

impl Hamiltonian for ConstantHamiltonian {
    fn dim(&self) -> usize {
        self.0.rows()
    }

    fn eval(&self, _t: f64) -> CMatrix {
        self.0.clone()
    }
}

type FieldFn = dyn Fn(f64) -> [f64; 3] + Send + Sync;

/// Spin-1/2 in a magnetic field: `H(t) = −½ σ⃗·B⃗(t)`.
#[derive(Clone)]
pub struct SpinHalfField {
    field: Arc<FieldFn>,
}

impl SpinHalfField {
    pub fn new(field: impl Fn(f64) -> [f64; 3] + Send + Sync + 'static) -> Self {
        Self { field: Arc::new(field) }
    }

    pub fn constant(b: [f64; 3]) -> Self {
        Self::new(move |_| b)
    }

    /// Transverse components rotate about the z axis at angular rate `omega`.
    pub fn rotating(b: [f64; 3], omega: f64) -> Self {
        Self::new(move |t| {
            let (s, c) = (omega * t).sin_cos();
            [b[0] * c - b[1] * s, b[0] * s + b[1] * c, b[2]]
        })
    }

    pub fn field_at(&self, t: f64) -> [f64; 3] {
        (self.field)(t)
    }
}

pub fn spin_half_matrix(b: [f64; 3]) -> CMatrix {
    let mut h = CMatrix::zeros(2, 2);
    for (k, bk) in b.iter().enumerate() {
        h += &sigma(k).scale_real(-0.5 * bk);
    }
    h
}

impl Hamiltonian for SpinHalfField {
    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, t: f64) -> CMatrix {
        spin_half_matrix(self.field_at(t))
    }
}

pub type So5Matrix = [[f64; 5]; 5];

type So5Fn = dyn Fn(f64) -> So5Matrix + Send + Sync;

/// Time-dependent real antisymmetric coefficients `F_{μν}` of the two-qubit
/// SO(5) Hamiltonian. Indices are zero-based: `F[4][3]` is `F₅₄`.
#[derive(Clone)]
pub struct So5Coefficients {
    f: Arc<So5Fn>,
}

impl So5Coefficients {
    pub fn new(f: impl Fn(f64) -> So5Matrix + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f) }
    }

    pub fn constant(f: So5Matrix) -> Self {
        Self::new(move |_| f)
    }

    /// `F(t) = F₀ + F₁ cos(ωt)`.
    pub fn harmonic(f0: So5Matrix, f1: So5Matrix, omega: f64) -> Self {
        Self::new(move |t| {
            let c = (omega * t).cos();
            let mut f = f0;
            for mu in 0..5 {
                for nu in 0..5 {
                    f[mu][nu] += c * f1[mu][nu];
                }
            }
            f
        })
    }

    /// Only `F₅₄ = c` (and `F₄₅ = −c`) nonzero.
    pub fn f54(c: f64) -> Self {
        let mut f = [[0.0; 5]; 5];
        f[4][3] = c;
        f[3][4] = -c;
        Self::constant(f)
    }

    pub fn raw(&self, t: f64) -> So5Matrix {
        (self.f)(t)
    }

    pub fn at(&self, t: f64) -> Result<So5Matrix> {
        let f = self.raw(t);
        let asym = antisymmetry_residual(&f);
        if asym > ANTISYMMETRY_TOL {
            return Err(Error::Model {
                time: t,
                reason: format!("SO(5) coefficients are not antisymmetric (max |F + Fᵀ| = {asym:e})"),
            });
        }
        Ok(f)
    }
}

pub fn antisymmetry_residual(f: &So5Matrix) -> f64 {
    let mut worst = 0.0f64;
    for mu in 0..5 {
        for nu in 0..5 {
            worst = worst.max((f[mu][nu] + f[nu][mu]).abs());
        }
    }
    worst
}

pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// The 4×4 two-qubit Hamiltonian
/// `F₂₁σ⁽²⁾_z − F₃₁σ⁽²⁾_y + F₃₂σ⁽²⁾_x − F_{4i}σ⁽¹⁾_zσ⁽²⁾_i + F_{5i}σ⁽¹⁾_xσ⁽²⁾_i − F₅₄σ⁽¹⁾_y`,
/// with qubit 1 as the outer tensor factor.
pub fn so5_matrix(f: &So5Matrix) -> CMatrix {
    let one = identity2();
    let (sx, sy, sz) = (sigma(0), sigma(1), sigma(2));
    let mut h = one.kron(&sz).scale_real(f[1][0]);
    h -= &one.kron(&sy).scale_real(f[2][0]);
    h += &one.kron(&sx).scale_real(f[2][1]);
    for i in 0..3 {
        h -= &sz.kron(&sigma(i)).scale_real(f[3][i]);
        h += &sx.kron(&sigma(i)).scale_real(f[4][i]);
    }
    h -= &sy.kron(&one).scale_real(f[4][3]);
    h
}

/// Block formulas for the SO(5) Hamiltonian:
/// `H^(1,2) = (∓F_{4k} − ½ε_{ijk}F_{ij})σ_k` (upper sign for the top block)
/// and `V = iF₅₄I + F_{5i}σ_i`.
pub fn so5_blocks_closed_form(f: &So5Matrix) -> Blocks {
    let mut top = CMatrix::zeros(2, 2);
    let mut bottom = CMatrix::zeros(2, 2);
    for k in 0..3 {
        let mut rot = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                rot += levi_civita(i, j, k) * f[i][j];
            }
        }
        top += &sigma(k).scale_real(-f[3][k] - 0.5 * rot);
        bottom += &sigma(k).scale_real(f[3][k] - 0.5 * rot);
    }
    let mut coupling = identity2().scale(I * f[4][3]);
    for i in 0..3 {
        coupling += &sigma(i).scale_real(f[4][i]);
    }
    Blocks { top, coupling, bottom }
}

pub struct So5Hamiltonian {
    coeffs: So5Coefficients,
}

impl So5Hamiltonian {
    pub fn coefficients(&self) -> &So5Coefficients {
        &self.coeffs
    }
}

impl Hamiltonian for So5Hamiltonian {
    fn dim(&self) -> usize {
        4
    }

    fn eval(&self, t: f64) -> CMatrix {
        so5_matrix(&self.coeffs.raw(t))
    }

    fn check(&self, t: f64) -> Result<()> {
        self.coeffs.at(t).map(|_| ())
    }
}

/// The SO(5) example as an `N = 4, n = 2` blocked Hamiltonian.
pub fn build_so5(coeffs: So5Coefficients) -> Result<BlockedHamiltonian> {
    coeffs.at(0.0)?;
    BlockedHamiltonian::new(So5Hamiltonian { coeffs }, 2)
}

/// `H(t) = A₀ + Σ_k (A_k cos kωt + B_k sin kωt)`.
#[derive(Debug, Clone)]
pub struct TrigHamiltonian {
    pub constant: CMatrix,
    pub cos_terms: Vec<CMatrix>,
    pub sin_terms: Vec<CMatrix>,
    pub omega: f64,
}

impl TrigHamiltonian {
    /// Traceless Hermitian coefficients drawn from a seeded generator,
    /// each scaled by `scale`.
    pub fn random(dim: usize, harmonics: usize, omega: f64, scale: f64, seed: u64) -> Self {
        let mut r = rng(seed);
        let draw = |r: &mut _| traceless_hermitian_with(r, dim).scale_real(scale);
        let constant = draw(&mut r);
        let mut cos_terms = Vec::with_capacity(harmonics);
        let mut sin_terms = Vec::with_capacity(harmonics);
        for _ in 0..harmonics {
            cos_terms.push(draw(&mut r));
            sin_terms.push(draw(&mut r));
        }
        Self { constant, cos_terms, sin_terms, omega }
    }
}

impl Hamiltonian for TrigHamiltonian {
    fn dim(&self) -> usize {
        self.constant.rows()
    }

    fn eval(&self, t: f64) -> CMatrix {
        let mut h = self.constant.clone();
        for (k, (a, b)) in self.cos_terms.iter().zip(&self.sin_terms).enumerate() {
            let (s, c) = ((k + 1) as f64 * self.omega * t).sin_cos();
            h += &a.scale_real(c);
            h += &b.scale_real(s);
        }
        h
    }
}

/// Piecewise-constant schedule. The value at `t` is that of the last piece
/// starting at or before `t`; times before the first start use the first piece.
#[derive(Debug, Clone)]
pub struct PiecewiseConstant {
    starts: Vec<f64>,
    values: Vec<CMatrix>,
}

impl PiecewiseConstant {
    pub fn new(pieces: Vec<(f64, CMatrix)>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::Contract("piecewise schedule needs at least one piece".into()));
        }
        let dim = pieces[0].1.rows();
        if pieces.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Contract("piece start times must be strictly increasing".into()));
        }
        if pieces.iter().any(|(_, m)| m.shape() != (dim, dim)) {
            return Err(Error::Contract("all pieces must be square of equal dimension".into()));
        }
        let (starts, values) = pieces.into_iter().unzip();
        Ok(Self { starts, values })
    }
}

impl Hamiltonian for PiecewiseConstant {
    fn dim(&self) -> usize {
        self.values[0].rows()
    }

    fn eval(&self, t: f64) -> CMatrix {
        let idx = self.starts.partition_point(|&s| s <= t).saturating_sub(1);
        self.values[idx].clone()
    }
}

/// A Hamiltonian known only on the half-step nodes `t₀ + k·h/2` of a grid.
///
/// Evaluation snaps to the nearest node when `t` is within `1e-6·h/2` of it;
/// elsewhere it interpolates linearly between neighbouring nodes, which is
/// only second-order accurate.
#[derive(Debug, Clone)]
pub struct SampledHamiltonian {
    t0: f64,
    half_step: f64,
    nodes: Vec<CMatrix>,
}

impl SampledHamiltonian {
    pub fn new(t0: f64, half_step: f64, nodes: Vec<CMatrix>) -> Self {
        assert!(!nodes.is_empty() && half_step > 0.0);
        Self { t0, half_step, nodes }
    }

    pub fn nodes(&self) -> &[CMatrix] {
        &self.nodes
    }
}

impl Hamiltonian for SampledHamiltonian {
    fn dim(&self) -> usize {
        self.nodes[0].rows()
    }

    fn eval(&self, t: f64) -> CMatrix {
        let x = (t - self.t0) / self.half_step;
        let last = self.nodes.len() - 1;
        let k = x.round();
        if (x - k).abs() < 1e-6 {
            return self.nodes[(k.max(0.0) as usize).min(last)].clone();
        }
        let lo = (x.floor().max(0.0) as usize).min(last);
        let hi = (lo + 1).min(last);
        let frac = (x - lo as f64).clamp(0.0, 1.0);
        self.nodes[lo].scale_real(1.0 - frac) + self.nodes[hi].scale_real(frac)
    }
}

/// Adds a real scalar multiple of the identity.
pub fn shift_identity(h: &CMatrix, shift: f64) -> CMatrix {
    h.axpy(C64::new(shift, 0.0), &CMatrix::identity(h.rows()))
}

/// Zero Hamiltonian of dimension `dim`.
pub fn zero_hamiltonian(dim: usize) -> ConstantHamiltonian {
    ConstantHamiltonian(CMatrix::from_vec(dim, dim, vec![ZERO; dim * dim]))
}
