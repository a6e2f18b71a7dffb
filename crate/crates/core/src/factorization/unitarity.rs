//! Nilpotent factors, the unitarity relations tying `w` and `γ₁, γ₂` to `z`,
//! and the block-diagonal gauge factor that makes `Ũ₁` unitary.

use crate::error::{Error, Result};
use crate::linalg::{sqrt_hpd, CMatrix, HpdRoots};

/// `w = −γ₁⁻¹z`, `γ₁ = I + zz†`, `γ₂ = I + z†z`.
#[derive(Debug, Clone)]
pub struct Closure {
    pub w: CMatrix,
    pub gamma1: CMatrix,
    pub gamma2: CMatrix,
}

pub fn unitarity_closure(z: &CMatrix) -> Result<Closure> {
    let zh = z.adjoint();
    let gamma1 = &CMatrix::identity(z.rows()) + &(z * &zh);
    let gamma2 = &CMatrix::identity(z.cols()) + &(&zh * z);
    let w = -(&gamma1.inverse()? * z);
    Ok(Closure { w, gamma1, gamma2 })
}

fn upper_factor(z: &CMatrix) -> CMatrix {
    let (m, n) = z.shape();
    CMatrix::from_blocks(&CMatrix::identity(m), z, &CMatrix::zeros(n, m), &CMatrix::identity(n))
}

fn lower_factor(w: &CMatrix) -> CMatrix {
    let (m, n) = w.shape();
    CMatrix::from_blocks(&CMatrix::identity(m), &CMatrix::zeros(m, n), &w.adjoint(), &CMatrix::identity(n))
}

/// `Ũ₁ = [[I, z], [0, I]] · [[I, 0], [w†, I]]`, which has unit determinant.
pub fn assemble_tilde_u1(z: &CMatrix) -> Result<CMatrix> {
    let closure = unitarity_closure(z)?;
    Ok(&upper_factor(z) * &lower_factor(&closure.w))
}

#[derive(Debug, Clone)]
pub struct Gauge {
    pub u1: CMatrix,
    /// `blockdiag(γ₁^{1/2}, γ₂^{−1/2})`
    pub b: CMatrix,
    pub roots1: HpdRoots,
    pub roots2: HpdRoots,
}

/// `U₁ = Ũ₁ b` with `b = blockdiag(γ₁^{1/2}, γ₂^{−1/2})`, the inverse square
/// root of `Ũ₁†Ũ₁ = blockdiag(γ₁⁻¹, γ₂)`.
pub fn gauge_unitarize(tilde_u1: &CMatrix, gamma1: &CMatrix, gamma2: &CMatrix) -> Result<Gauge> {
    let dim = gamma1.rows() + gamma2.rows();
    if tilde_u1.shape() != (dim, dim) {
        return Err(Error::Contract(format!(
            "Ũ₁ is {:?} but the γ blocks imply dimension {dim}",
            tilde_u1.shape()
        )));
    }
    let roots1 = sqrt_hpd(gamma1)?;
    let roots2 = sqrt_hpd(gamma2)?;
    let b = CMatrix::block_diag(&roots1.sqrt, &roots2.inv_sqrt);
    let u1 = tilde_u1 * &b;
    Ok(Gauge { u1, b, roots1, roots2 })
}

/// Everything derived from `z` alone, in one pass.
pub fn gauge_from_z(z: &CMatrix) -> Result<(Closure, Gauge)> {
    let closure = unitarity_closure(z)?;
    let tilde = &upper_factor(z) * &lower_factor(&closure.w);
    let gauge = gauge_unitarize(&tilde, &closure.gamma1, &closure.gamma2)?;
    Ok((closure, gauge))
}

/// Closed-form `γ₁^{1/2}` and `γ₁^{−1/2}` for a column `z`, with `γ = 1 + z†z`:
/// `I + zz†/(√γ + 1)` and `I − zz†/(√γ + γ)`.
pub fn gamma1_roots_column(z: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    if z.cols() != 1 {
        return Err(Error::Unsupported("closed-form γ₁ roots need a single column".into()));
    }
    let zzh = z * &z.adjoint();
    let gamma = 1.0 + z.norm_fro().powi(2);
    let s = gamma.sqrt();
    let id = CMatrix::identity(z.rows());
    Ok((&id + &zzh.scale_real(1.0 / (s + 1.0)), &id - &zzh.scale_real(1.0 / (s + gamma))))
}
