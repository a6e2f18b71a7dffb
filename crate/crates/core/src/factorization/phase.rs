//! The `n = 1` corner phase and its split into geometric and dynamical parts.
//!
//! All phases are integrated rather than read off as arguments, so they are
//! continuous reals with no `2π` wrapping.

use crate::error::{Error, Result};
use crate::hamiltonian::{BlockedHamiltonian, Blocks};
use crate::linalg::CMatrix;
use crate::ode::{hermite, simpson_cumulative, Grid};
use crate::riccati::RiccatiSegment;

use super::effective::corner_bracket;
use super::unitarity::gauge_from_z;

/// Blocks and `z` on the grid points of one segment and at the midpoints
/// between them (`z` there from cubic Hermite interpolation).
#[derive(Debug, Clone)]
pub struct SegmentSamples {
    pub node_blocks: Vec<Blocks>,
    pub mid_blocks: Vec<Blocks>,
    pub z_nodes: Vec<CMatrix>,
    pub z_mids: Vec<CMatrix>,
}

impl SegmentSamples {
    pub fn collect(h: &BlockedHamiltonian, grid: &Grid, seg: &RiccatiSegment) -> Result<Self> {
        let m = seg.steps();
        let step = grid.step;
        let mut node_blocks = Vec::with_capacity(m + 1);
        let mut mid_blocks = Vec::with_capacity(m);
        let mut z_mids = Vec::with_capacity(m);
        for j in 0..=m {
            let t = grid.time(seg.start + j);
            node_blocks.push(h.blocks_at(t)?);
            if j < m {
                mid_blocks.push(h.blocks_at(t + 0.5 * step)?);
                z_mids.push(hermite(&seg.z[j], &seg.zdot[j], &seg.z[j + 1], &seg.zdot[j + 1], step, 0.5));
            }
        }
        Ok(Self { node_blocks, mid_blocks, z_nodes: seg.z.clone(), z_mids })
    }
}

/// Running phases over a stretch of grid points, all starting at zero
/// (or continuing from the previous stretch when concatenated).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PhaseSeries {
    /// `μ_total(t) = −∫[H_NN + Re(V†z)]`; the fiber corner is `e^{iμ_total}`.
    pub mu_total: Vec<f64>,
    pub geometric: Vec<f64>,
    /// `μ_total − geometric`
    pub dynamical: Vec<f64>,
    /// `−∫(U₁†HU₁)_NN`, computed from the unitarized factor itself.
    pub dynamical_integrated: Vec<f64>,
    /// `Im μ` of the complex phase `μ = −2∫(H_NN + V†z)`; it equals
    /// `ln(1 + z†z)` and restarts from zero with every Riccati segment.
    pub im_mu: Vec<f64>,
}

impl PhaseSeries {
    pub fn len(&self) -> usize {
        self.mu_total.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu_total.is_empty()
    }

    pub fn last(&self) -> Option<(f64, f64, f64)> {
        Some((*self.mu_total.last()?, *self.geometric.last()?, *self.dynamical.last()?))
    }

    /// Appends `next`, shifting its continuous phases so they start where
    /// `self` ends. The first sample of `next` replaces the last of `self`.
    pub fn extend_continuous(&mut self, next: &PhaseSeries) {
        if self.is_empty() {
            *self = next.clone();
            return;
        }
        let shift = |acc: &mut Vec<f64>, add: &[f64]| {
            let base = acc.pop().expect("non-empty");
            acc.extend(add.iter().map(|x| x + base));
        };
        shift(&mut self.mu_total, &next.mu_total);
        shift(&mut self.geometric, &next.geometric);
        shift(&mut self.dynamical, &next.dynamical);
        shift(&mut self.dynamical_integrated, &next.dynamical_integrated);
        self.im_mu.pop();
        self.im_mu.extend_from_slice(&next.im_mu);
    }
}

/// `γ⁻¹[z†(H̃top − H_NN)z + (z†V + V†z)(1 − γ/2)]`
pub fn geometric_integrand(blocks: &Blocks, z: &CMatrix) -> f64 {
    let zh = z.adjoint();
    let hnn = blocks.bottom[(0, 0)].re;
    let gamma = 1.0 + z.norm_fro().powi(2);
    let quad = (&(&zh * &blocks.top) * z)[(0, 0)].re - hnn * (gamma - 1.0);
    let cross = 2.0 * (&zh * &blocks.coupling)[(0, 0)].re;
    (quad + cross * (1.0 - 0.5 * gamma)) / gamma
}

/// `(U₁†HU₁)_NN` from the gauge-unitarized factor.
pub fn dynamical_integrand(blocks: &Blocks, z: &CMatrix) -> Result<f64> {
    let (_, gauge) = gauge_from_z(z)?;
    let last = blocks.dim() - 1;
    let transformed = &(&gauge.u1.adjoint() * &blocks.assemble()) * &gauge.u1;
    Ok(transformed[(last, last)].re)
}

/// Phases over one Riccati segment, starting from zero.
pub fn segment_phases(samples: &SegmentSamples, step: f64) -> Result<PhaseSeries> {
    if samples.z_nodes[0].cols() != 1 {
        return Err(Error::Unsupported("corner phases are defined for n = 1 only".into()));
    }
    let eval = |blocks: &[Blocks], zs: &[CMatrix]| -> Result<[Vec<f64>; 4]> {
        let mut out: [Vec<f64>; 4] = Default::default();
        for (b, z) in blocks.iter().zip(zs) {
            out[0].push(corner_bracket(b, z)?);
            out[1].push(geometric_integrand(b, z));
            out[2].push(dynamical_integrand(b, z)?);
            out[3].push(-2.0 * (&b.coupling.adjoint() * z)[(0, 0)].im);
        }
        Ok(out)
    };
    let nodes = eval(&samples.node_blocks, &samples.z_nodes)?;
    let mids = eval(&samples.mid_blocks, &samples.z_mids)?;
    let integral = |i: usize| simpson_cumulative(&nodes[i], &mids[i], step);

    let mu_total: Vec<f64> = integral(0).iter().map(|x| -x).collect();
    let geometric = integral(1);
    let dynamical = mu_total.iter().zip(&geometric).map(|(m, g)| m - g).collect();
    let dynamical_integrated = integral(2).iter().map(|x| -x).collect();
    Ok(PhaseSeries { mu_total, geometric, dynamical, dynamical_integrated, im_mu: integral(3) })
}

/// Per-level phase totals at the end of the evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseTotals {
    /// Dimension of the problem at this level.
    pub level: usize,
    pub mu_total: f64,
    pub geometric: f64,
    pub dynamical: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{complex_with, rng, traceless_hermitian_with};
    use crate::linalg::I;
    use proptest::prelude::*;

    #[test]
    fn continuous_concatenation() {
        let a = PhaseSeries {
            mu_total: vec![0.0, 1.0],
            geometric: vec![0.0, 0.5],
            dynamical: vec![0.0, 0.5],
            dynamical_integrated: vec![0.0, 0.5],
            im_mu: vec![0.0, 2.0],
        };
        let mut s = PhaseSeries::default();
        s.extend_continuous(&a);
        s.extend_continuous(&a);
        assert_eq!(s.mu_total, vec![0.0, 1.0, 2.0]);
        assert_eq!(s.geometric, vec![0.0, 0.5, 1.0]);
        assert_eq!(s.im_mu, vec![0.0, 0.0, 2.0]);
        assert_eq!(s.last(), Some((2.0, 1.0, 1.0)));
    }

    proptest! {
        /// The corner bracket splits exactly into the two integrands.
        #[test]
        fn bracket_splits(seed in any::<u64>(), dim in 2usize..7, zs in 0.01f64..4.0) {
            let mut r = rng(seed);
            let blocks = Blocks::from_matrix(&traceless_hermitian_with(&mut r, dim), 1);
            let z = complex_with(&mut r, dim - 1, 1).scale_real(zs);
            let bracket = corner_bracket(&blocks, &z).unwrap();
            let split = dynamical_integrand(&blocks, &z).unwrap() - geometric_integrand(&blocks, &z);
            prop_assert!((bracket - split).abs() < 1e-12 * (1.0 + zs * zs));
        }
    }

    #[test]
    fn geometric_integrand_is_minus_the_connection() {
        // (−iU₁†U̇₁)_NN by finite differences along ż = −i[...]
        let mut r = rng(8);
        let blocks = Blocks::from_matrix(&traceless_hermitian_with(&mut r, 3), 1);
        let z = complex_with(&mut r, 2, 1);
        let zdot = crate::riccati::riccati_rhs(&blocks, &z).unwrap();
        let u1 = |s: f64| gauge_from_z(&z.axpy(crate::linalg::C64::new(s, 0.0), &zdot)).unwrap().1.u1;
        let eps = 1e-5;
        let du = (&u1(eps) - &u1(-eps)).scale_real(0.5 / eps);
        let conn = (&u1(0.0).adjoint() * &du).scale(-I);
        assert!((conn[(2, 2)].re + geometric_integrand(&blocks, &z)).abs() < 1e-8);
        assert!(conn[(2, 2)].im.abs() < 1e-8);
    }
}
