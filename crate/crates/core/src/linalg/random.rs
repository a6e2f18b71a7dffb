//! Seeded random matrices. Entries are uniform on [-1, 1] in both real and
//! imaginary parts; a given seed yields identical output on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::matrix::{CMatrix, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_with(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
}

pub fn hermitian_with(rng: &mut impl Rng, dim: usize) -> CMatrix {
    complex_with(rng, dim, dim).hermitian_part()
}

pub fn traceless_hermitian_with(rng: &mut impl Rng, dim: usize) -> CMatrix {
    let h = hermitian_with(rng, dim);
    let shift = h.trace().re / dim as f64;
    h.axpy(C64::new(-shift, 0.0), &CMatrix::identity(dim))
}

pub fn random_complex(rows: usize, cols: usize, seed: u64) -> CMatrix {
    complex_with(&mut rng(seed), rows, cols)
}

pub fn random_hermitian(dim: usize, seed: u64) -> CMatrix {
    hermitian_with(&mut rng(seed), dim)
}

pub fn random_traceless_hermitian(dim: usize, seed: u64) -> CMatrix {
    traceless_hermitian_with(&mut rng(seed), dim)
}

/// `A A† + I / 2`, comfortably positive-definite.
pub fn random_hpd(dim: usize, seed: u64) -> CMatrix {
    let a = random_complex(dim, dim, seed);
    (&a * &a.adjoint()).axpy(C64::new(0.5, 0.0), &CMatrix::identity(dim))
}

/// Real antisymmetric 5×5 matrix with entries uniform on [-1, 1].
pub fn antisymmetric5_with(rng: &mut impl Rng) -> [[f64; 5]; 5] {
    let mut f = [[0.0; 5]; 5];
    for mu in 0..5 {
        for nu in (mu + 1)..5 {
            let x = rng.gen_range(-1.0..=1.0);
            f[mu][nu] = x;
            f[nu][mu] = -x;
        }
    }
    f
}
