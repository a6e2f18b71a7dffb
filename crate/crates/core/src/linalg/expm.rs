//! Matrix exponential by scaling and squaring around a Taylor series.

use super::matrix::{CMatrix, C64};

/// `‖M / 2^k‖₁` is pushed below this before the series is summed.
const SCALED_NORM_BOUND: f64 = 0.5;
const MAX_TERMS: usize = 40;

pub fn expm(m: &CMatrix) -> CMatrix {
    assert!(m.is_square(), "expm of a non-square matrix");
    let n = m.rows();
    let norm = m.norm_one();
    let mut squarings = 0u32;
    let mut scaled_norm = norm;
    while scaled_norm >= SCALED_NORM_BOUND {
        scaled_norm *= 0.5;
        squarings += 1;
    }
    let a = m.scale_real(0.5f64.powi(squarings as i32));

    let mut sum = CMatrix::identity(n);
    let mut term = CMatrix::identity(n);
    for k in 1..=MAX_TERMS {
        term = (&term * &a).scale(C64::new(1.0 / k as f64, 0.0));
        sum += &term;
        if term.norm_one() <= f64::EPSILON * 1e-2 * sum.norm_one() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::{I, ZERO};
    use crate::linalg::pauli::{identity2, sigma_minus, sigma_plus, sigma_x};
    use crate::linalg::random::random_hermitian;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn zero_gives_identity() {
        assert_eq!(expm(&CMatrix::zeros(3, 3)), CMatrix::identity(3));
    }

    #[test]
    fn pauli_rotation() {
        // exp(iθσx) = cos θ I + i sin θ σx
        for &theta in &[0.3, FRAC_PI_2, 2.0, 7.5] {
            let e = expm(&sigma_x().scale(I * theta));
            let expect = identity2().scale_real(theta.cos()) + sigma_x().scale(I * theta.sin());
            assert!((&e - &expect).norm_fro() < 1e-13, "theta {theta}");
        }
        let e = expm(&sigma_x().scale(I * FRAC_PI_2));
        assert!((&e - &sigma_x().scale(I)).norm_fro() < 1e-14);
    }

    #[test]
    fn nilpotent_factors_are_unit_triangular() {
        let z = C64::new(5.0, 0.0);
        let e = expm(&sigma_plus().scale(z * 0.5));
        assert_eq!(e, CMatrix::from_rows(&[[C64::new(1.0, 0.0), z], [ZERO, C64::new(1.0, 0.0)]]));
        let w = C64::new(0.3, -1.2);
        let l = expm(&sigma_minus().scale(w * 0.5));
        assert_eq!(l[(0, 1)], ZERO);
        assert_eq!(l[(0, 0)], C64::new(1.0, 0.0));
        assert_eq!(l[(1, 1)], C64::new(1.0, 0.0));
        assert!((l[(1, 0)] - w).norm() < 1e-15);
    }

    #[test]
    fn diagonal_matches_scalar_exponential() {
        let d = CMatrix::diag(&[C64::new(3.0, 1.0), C64::new(-20.0, 0.5)]);
        let e = expm(&d);
        assert!((e[(0, 0)] - C64::new(3.0, 1.0).exp()).norm() < 1e-12 * 20.1);
        assert!((e[(1, 1)] - C64::new(-20.0, 0.5).exp()).norm() < 1e-20);
    }

    proptest! {
        #[test]
        fn anti_hermitian_exponent_is_unitary(dim in 1usize..=8, seed in any::<u64>(), s in 0.01f64..20.0) {
            let h = random_hermitian(dim, seed);
            let u = expm(&h.scale(-I * s));
            prop_assert!(u.is_unitary(1e-12), "residual {:?}", u.unitarity_residual());
        }
    }
}
