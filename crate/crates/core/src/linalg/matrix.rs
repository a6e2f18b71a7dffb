use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense complex matrix stored in row-major order.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        assert_eq!(data.len(), rows * cols, "entry count must equal rows * cols");
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_vec(rows, cols, vec![ZERO; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn scalar(n: usize, c: C64) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { c } else { ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::from_vec(rows, cols, data)
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.as_ref().len(), cols, "ragged rows");
            data.extend_from_slice(r.as_ref());
        }
        Self::from_vec(rows.len(), cols, data)
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        Self::from_fn(rows.len(), cols, |i, j| C64::new(rows[i].as_ref()[j], 0.0))
    }

    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i] } else { ZERO })
    }

    pub fn diag_real(entries: &[f64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { C64::new(entries[i], 0.0) } else { ZERO })
    }

    /// Column vector from a slice.
    pub fn column(entries: &[C64]) -> Self {
        Self::from_vec(entries.len(), 1, entries.to_vec())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_vec(self.rows, self.cols, self.data.iter().map(|x| x * c).collect())
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self::from_vec(self.rows, self.cols, self.data.iter().map(|x| x * s).collect())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self::from_vec(self.rows, self.cols, self.data.iter().map(|&x| f(x)).collect())
    }

    /// `self + a * other`
    pub fn axpy(&self, a: C64, other: &Self) -> Self {
        assert_eq!(self.shape(), other.shape(), "axpy shape mismatch");
        Self::from_vec(
            self.rows,
            self.cols,
            self.data.iter().zip(&other.data).map(|(x, y)| x + a * y).collect(),
        )
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// `(M + M†) / 2`
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_real(0.5)
    }

    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        assert!(r0 + nr <= self.rows && c0 + nc <= self.cols, "block out of range");
        Self::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Self) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols, "block out of range");
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }

    /// Assembles `[[tl, tr], [bl, br]]`.
    pub fn from_blocks(tl: &Self, tr: &Self, bl: &Self, br: &Self) -> Self {
        assert_eq!(tl.rows, tr.rows, "block rows mismatch");
        assert_eq!(bl.rows, br.rows, "block rows mismatch");
        assert_eq!(tl.cols, bl.cols, "block cols mismatch");
        assert_eq!(tr.cols, br.cols, "block cols mismatch");
        let mut m = Self::zeros(tl.rows + bl.rows, tl.cols + tr.cols);
        m.set_block(0, 0, tl);
        m.set_block(0, tl.cols, tr);
        m.set_block(tl.rows, 0, bl);
        m.set_block(tl.rows, tl.cols, br);
        m
    }

    pub fn block_diag(a: &Self, b: &Self) -> Self {
        let mut m = Self::zeros(a.rows + b.rows, a.cols + b.cols);
        m.set_block(0, 0, a);
        m.set_block(a.rows, a.cols, b);
        m
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            self[(i / other.rows, j / other.cols)] * other[(i % other.rows, j % other.cols)]
        })
    }

    /// Frobenius inner product `Tr(self† other)`.
    pub fn inner(&self, other: &Self) -> C64 {
        assert_eq!(self.shape(), other.shape(), "inner product shape mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_residual().is_some_and(|r| r <= tol)
    }

    /// `‖M†M − I‖_F`, or `None` for non-square input.
    pub fn unitarity_residual(&self) -> Option<f64> {
        if !self.is_square() {
            return None;
        }
        Some((&(&self.adjoint() * self) - &Self::identity(self.rows)).norm_fro())
    }

    pub fn hermiticity_residual(&self) -> Option<f64> {
        if !self.is_square() {
            return None;
        }
        Some((self - &self.adjoint()).norm_fro())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual().is_some_and(|r| r <= tol)
    }

    pub fn is_traceless(&self, tol: f64) -> bool {
        self.is_square() && self.trace().norm() <= tol
    }

    /// Gauss-Jordan inverse with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Contract(format!(
                "inverse of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&p, &q| a[(p, col)].norm().total_cmp(&a[(q, col)].norm()))
                .unwrap_or(col);
            let pv = a[(pivot, col)];
            if pv.norm() <= 1e-14 * scale {
                return Err(Error::Singular { value: pv.norm(), threshold: 1e-14 * scale });
            }
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let r = ONE / pv;
            for j in 0..n {
                a[(col, j)] *= r;
                inv[(col, j)] *= r;
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = a[(i, col)];
                if f == ZERO {
                    continue;
                }
                for j in 0..n {
                    let aj = a[(col, j)];
                    let ij = inv[(col, j)];
                    a[(i, j)] -= f * aj;
                    inv[(i, j)] -= f * ij;
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, p: usize, q: usize) {
        for j in 0..self.cols {
            self.data.swap(p * self.cols + j, q * self.cols + j);
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let c = self[(i, j)];
                write!(f, "{:+.6e}{:+.6e}i  ", c.re, c.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        self.axpy(ONE, rhs)
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        self.axpy(-ONE, rhs)
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;

    fn neg(self) -> CMatrix {
        self.scale_real(-1.0)
    }
}

impl Mul<C64> for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: C64) -> CMatrix {
        self.scale(rhs)
    }
}

impl Mul<f64> for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: f64) -> CMatrix {
        self.scale_real(rhs)
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<CMatrix> for CMatrix {
            type Output = CMatrix;
            fn $method(self, rhs: CMatrix) -> CMatrix {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&CMatrix> for CMatrix {
            type Output = CMatrix;
            fn $method(self, rhs: &CMatrix) -> CMatrix {
                (&self).$method(rhs)
            }
        }
        impl $tr<CMatrix> for &CMatrix {
            type Output = CMatrix;
            fn $method(self, rhs: CMatrix) -> CMatrix {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned_binop!(Mul, mul);
forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);

impl Mul<C64> for CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: C64) -> CMatrix {
        self.scale(rhs)
    }
}

impl Mul<f64> for CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: f64) -> CMatrix {
        self.scale_real(rhs)
    }
}

impl Neg for CMatrix {
    type Output = CMatrix;

    fn neg(self) -> CMatrix {
        -&self
    }
}

impl AddAssign<&CMatrix> for CMatrix {
    fn add_assign(&mut self, rhs: &CMatrix) {
        assert_eq!(self.shape(), rhs.shape(), "add shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&CMatrix> for CMatrix {
    fn sub_assign(&mut self, rhs: &CMatrix) {
        assert_eq!(self.shape(), rhs.shape(), "sub shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}
