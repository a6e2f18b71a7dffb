//! Hermitian eigendecomposition by cyclic Jacobi rotations, and the
//! positive-definite square roots built on it.

use super::matrix::{CMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Hermiticity tolerance applied to inputs, relative to `max(1, ‖M‖_F)`.
pub const HERMITIAN_INPUT_TOL: f64 = 1e-10;

/// Smallest eigenvalue accepted by [`sqrt_hpd`].
pub const HPD_EIGEN_FLOOR: f64 = 1e-12;

const MAX_SWEEPS: usize = 64;

/// `M = Q diag(values) Q†`, eigenvalues ascending, `Q` unitary.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// Rebuilds `Q f(Λ) Q†` for a real spectral function `f`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let q = &self.vectors;
        let n = q.rows();
        let mapped: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        CMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| q[(i, k)] * mapped[k] * q[(j, k)].conj()).sum()
        })
    }
}

pub fn hermitian_eigen(m: &CMatrix) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::Contract(format!(
            "eigendecomposition of non-square {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let scale = m.norm_fro().max(1.0);
    let herm = m.hermiticity_residual().unwrap_or(f64::INFINITY);
    if herm > HERMITIAN_INPUT_TOL * scale {
        return Err(Error::Contract(format!(
            "eigendecomposition input is not Hermitian: ‖M − M†‖_F = {herm:e}"
        )));
    }

    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = CMatrix::identity(n);
    let stop = 1e-17 * m.norm_fro();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

/// One complex Jacobi rotation annihilating `a[p][q]`.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let b = apq.norm();
    if b == 0.0 {
        return;
    }
    let phase = apq / b;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * b);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // G = diag(1, e^{-iφ}) · [[c, s], [-s, c]] on the (p, q) plane.
    let gpp = C64::new(c, 0.0);
    let gpq = C64::new(s, 0.0);
    let gqp = -phase.conj() * s;
    let gqq = phase.conj() * c;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * gpp + akq * gqp;
        a[(k, q)] = akp * gpq + akq * gqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = gpp.conj() * apk + gqp.conj() * aqk;
        a[(q, k)] = gpq.conj() * apk + gqq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * gpp + vkq * gqp;
        v[(k, q)] = vkp * gpq + vkq * gqq;
    }
}

/// Square root and inverse square root of a Hermitian positive-definite matrix.
#[derive(Debug, Clone)]
pub struct HpdRoots {
    pub eigen: HermitianEigen,
    pub sqrt: CMatrix,
    pub inv_sqrt: CMatrix,
}

impl HpdRoots {
    /// Time derivative of `M^{1/2}` given `Ṁ`.
    ///
    /// Solves `Ṡ S + S Ṡ = Ṁ` in the eigenbasis, where the Sylvester system
    /// is diagonal: `Ṡ'_{ij} = G_{ij} / (√λ_i + √λ_j)` with `G = Q† Ṁ Q`.
    pub fn sqrt_derivative(&self, mdot: &CMatrix) -> CMatrix {
        let q = &self.eigen.vectors;
        let g = &(&q.adjoint() * mdot) * q;
        let roots: Vec<f64> = self.eigen.values.iter().map(|l| l.sqrt()).collect();
        let n = roots.len();
        let sdot = CMatrix::from_fn(n, n, |i, j| g[(i, j)] / (roots[i] + roots[j]));
        &(q * &sdot) * &q.adjoint()
    }

    /// Time derivative of `M^{-1/2}`: `−M^{-1/2} Ṡ M^{-1/2}`.
    pub fn inv_sqrt_derivative(&self, mdot: &CMatrix) -> CMatrix {
        let sdot = self.sqrt_derivative(mdot);
        -(&(&self.inv_sqrt * &sdot) * &self.inv_sqrt)
    }
}

pub fn sqrt_hpd(m: &CMatrix) -> Result<HpdRoots> {
    let eigen = hermitian_eigen(m)?;
    if let Some(&low) = eigen.values.iter().find(|&&l| l <= HPD_EIGEN_FLOOR) {
        return Err(Error::Singular { value: low, threshold: HPD_EIGEN_FLOOR });
    }
    let sqrt = eigen.apply(f64::sqrt);
    let inv_sqrt = eigen.apply(|l| 1.0 / l.sqrt());
    Ok(HpdRoots { eigen, sqrt, inv_sqrt })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{random_hermitian, random_hpd};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn reconstruct(e: &HermitianEigen) -> CMatrix {
        e.apply(|l| l)
    }

    #[test]
    fn diagonal_input_is_sorted() {
        let e = hermitian_eigen(&CMatrix::diag_real(&[3.0, 1.0])).unwrap();
        assert_eq!(e.values, vec![1.0, 3.0]);
        assert!(e.vectors[(1, 0)].norm() > 0.999_999);
        assert!(e.vectors[(0, 1)].norm() > 0.999_999);
        assert!(e.vectors.is_unitary(1e-14));
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let e = hermitian_eigen(&CMatrix::identity(2)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0]);
        assert!(e.vectors.is_unitary(1e-14));
    }

    #[test]
    fn symmetric_two_by_two() {
        let m = CMatrix::from_real_rows(&[[2.0, 1.0], [1.0, 2.0]]);
        let e = hermitian_eigen(&m).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] - 3.0).abs() < 1e-14);
        // eigenvectors (1, ∓1)/√2 up to a phase
        let v0 = (e.vectors[(0, 0)], e.vectors[(1, 0)]);
        let v1 = (e.vectors[(0, 1)], e.vectors[(1, 1)]);
        assert!((v0.0.norm() - FRAC_1_SQRT_2).abs() < 1e-14);
        assert!((v0.0 + v0.1).norm() < 1e-14);
        assert!((v1.0 - v1.1).norm() < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(hermitian_eigen(&CMatrix::zeros(2, 3)), Err(Error::Contract(_))));
        let nh = CMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        assert!(matches!(hermitian_eigen(&nh), Err(Error::Contract(_))));
    }

    #[test]
    fn sqrt_examples() {
        let r = sqrt_hpd(&CMatrix::identity(3)).unwrap();
        assert!((&r.sqrt - &CMatrix::identity(3)).norm_fro() < 1e-15);
        let r = sqrt_hpd(&CMatrix::diag_real(&[4.0, 9.0])).unwrap();
        assert!((&r.sqrt - &CMatrix::diag_real(&[2.0, 3.0])).norm_fro() < 1e-14);
        // I + z z† with z = (1, 0)ᵀ
        let r = sqrt_hpd(&CMatrix::diag_real(&[2.0, 1.0])).unwrap();
        assert!((&r.sqrt - &CMatrix::diag_real(&[2f64.sqrt(), 1.0])).norm_fro() < 1e-14);
    }

    #[test]
    fn sqrt_reports_offending_eigenvalue() {
        let err = sqrt_hpd(&CMatrix::diag_real(&[1.0, -0.5])).unwrap_err();
        assert_eq!(err, Error::Singular { value: -0.5, threshold: HPD_EIGEN_FLOOR });
    }

    #[test]
    fn sqrt_derivative_matches_finite_difference() {
        let m = random_hpd(4, 11);
        let mdot = random_hermitian(4, 12);
        let roots = sqrt_hpd(&m).unwrap();
        let eps = 1e-5;
        let plus = sqrt_hpd(&m.axpy(C64::new(eps, 0.0), &mdot)).unwrap();
        let minus = sqrt_hpd(&m.axpy(C64::new(-eps, 0.0), &mdot)).unwrap();
        let fd = (&plus.sqrt - &minus.sqrt).scale_real(0.5 / eps);
        assert!((&fd - &roots.sqrt_derivative(&mdot)).norm_fro() < 1e-8);
        let fd_inv = (&plus.inv_sqrt - &minus.inv_sqrt).scale_real(0.5 / eps);
        assert!((&fd_inv - &roots.inv_sqrt_derivative(&mdot)).norm_fro() < 1e-8);
    }

    proptest! {
        #[test]
        fn decomposition_reconstructs(dim in 1usize..=8, seed in any::<u64>()) {
            let m = random_hermitian(dim, seed);
            let e = hermitian_eigen(&m).unwrap();
            prop_assert!(e.vectors.is_unitary(1e-12));
            prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
            let err = (&reconstruct(&e) - &m).norm_fro();
            prop_assert!(err <= 1e-12 * m.norm_fro().max(1.0), "err {}", err);
        }

        #[test]
        fn hpd_roots_square_and_invert(dim in 1usize..=8, seed in any::<u64>()) {
            let m = random_hpd(dim, seed);
            let r = sqrt_hpd(&m).unwrap();
            let scale = m.norm_fro();
            prop_assert!(r.sqrt.is_hermitian(1e-12 * scale));
            prop_assert!((&(&r.sqrt * &r.sqrt) - &m).norm_fro() <= 1e-12 * scale);
            prop_assert!((&(&r.sqrt * &r.inv_sqrt) - &CMatrix::identity(dim)).norm_fro() <= 1e-12 * scale);
        }
    }
}
