//! Effective Hamiltonians of the block-diagonal fiber factor.

use crate::error::{Error, Result};
use crate::hamiltonian::Blocks;
use crate::linalg::{sqrt_hpd, CMatrix, I};

fn check_shape(blocks: &Blocks, z: &CMatrix) -> Result<()> {
    if z.shape() != blocks.coupling.shape() {
        return Err(Error::Contract(format!(
            "z has shape {:?}, blocks require {:?}",
            z.shape(),
            blocks.coupling.shape()
        )));
    }
    Ok(())
}

/// Generators of `Ũ₂`: `(H̃top − zV†, H̃bot + V†z)`. Neither is Hermitian
/// nor traceless in general.
pub fn effective_hamiltonian_tilde(blocks: &Blocks, z: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    check_shape(blocks, z)?;
    let vh = blocks.coupling.adjoint();
    Ok((&blocks.top - &(z * &vh), &blocks.bottom + &(&vh * z)))
}

/// Hermitian generators of the unitarized fiber factor `U₂ = b⁻¹Ũ₂`.
///
/// Each block is `(i/2)[d/dt γ^{−1/2}, γ^{1/2}] + ½{γ^{−1/2} A γ^{1/2} + h.c.}`
/// with `A = H̃top − zV†` above and `A = H̃bot + z†V` below. The derivatives
/// of the roots come from `γ̇₁ = żz† + zż†` and `γ̇₂ = ż†z + z†ż`.
pub fn effective_hamiltonian_hermitian(blocks: &Blocks, z: &CMatrix, zdot: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    check_shape(blocks, z)?;
    check_shape(blocks, zdot)?;
    let zh = z.adjoint();
    let zdh = zdot.adjoint();
    let v = &blocks.coupling;

    let gamma1 = &CMatrix::identity(z.rows()) + &(z * &zh);
    let gamma2 = &CMatrix::identity(z.cols()) + &(&zh * z);
    let gdot1 = &(zdot * &zh) + &(z * &zdh);
    let gdot2 = &(&zdh * z) + &(&zh * zdot);

    let block = |gamma: &CMatrix, gdot: &CMatrix, a: &CMatrix| -> Result<CMatrix> {
        let roots = sqrt_hpd(gamma)?;
        let d_inv = roots.inv_sqrt_derivative(gdot);
        let geometric = d_inv.commutator(&roots.sqrt).scale(I * 0.5);
        let dynamic = (&(&roots.inv_sqrt * a) * &roots.sqrt).hermitian_part();
        Ok(&geometric + &dynamic)
    };

    let upper = block(&gamma1, &gdot1, &(&blocks.top - &(z * &v.adjoint())))?;
    let lower = block(&gamma2, &gdot2, &(&blocks.bottom + &(&zh * v)))?;
    Ok((upper, lower))
}

/// The traceful `(N−1)`-dimensional Hamiltonian passed down one level of the
/// `n = 1` hierarchy:
/// `H̃top − (zV† + Vz†)/(√γ+1) − z(z†V + V†z)z†/(2(√γ+1)²)`.
pub fn recursion_hamiltonian(blocks: &Blocks, z: &CMatrix) -> Result<CMatrix> {
    check_shape(blocks, z)?;
    if z.cols() != 1 {
        return Err(Error::Unsupported("the recursion Hamiltonian needs n = 1".into()));
    }
    let v = &blocks.coupling;
    let zh = z.adjoint();
    let s = (1.0 + z.norm_fro().powi(2)).sqrt() + 1.0;
    let cross = &(z * &v.adjoint()) + &(v * &zh);
    let re = (&zh * v)[(0, 0)].re;
    let outer = (z * &zh).scale_real(2.0 * re / (2.0 * s * s));
    Ok((&(&blocks.top - &cross.scale_real(1.0 / s)) - &outer).hermitian_part())
}

/// `H_NN + Re(V†z)`: the corner entry of the effective Hamiltonian when
/// `n = 1`, whose negative integral is the corner phase.
pub fn corner_bracket(blocks: &Blocks, z: &CMatrix) -> Result<f64> {
    check_shape(blocks, z)?;
    if z.cols() != 1 {
        return Err(Error::Unsupported("the corner phase needs n = 1".into()));
    }
    Ok(blocks.bottom[(0, 0)].re + (&blocks.coupling.adjoint() * z)[(0, 0)].re)
}
