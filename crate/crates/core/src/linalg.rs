//! Dense complex linear algebra.
//!
//! [`ComplexMatrix`] is a plain row-major buffer. Eigendecompositions go
//! through `nalgebra`; everything else (products, Kronecker products, the
//! multi-factor contractions used by the optimizers) is written out here.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::states::{QuantumState, StateData};
use crate::{tol, Error, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Wraps row-major `data`; fails unless `data.len() == rows * cols`.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Real diagonal matrix.
    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m.data[i * n + i] = C64::new(*v, 0.0);
        }
        m
    }

    /// Outer product `|u⟩⟨v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn scale(&self, s: f64) -> Self {
        self.scale_complex(C64::new(s, 0.0))
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, other: &Self, s: f64) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |M - M†|` over entries; infinite for non-square input.
    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self.get(i, j) + self.get(j, i).conj()) * 0.5
        })
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        self.data
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let other_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `{A, B} = AB + BA`.
    pub fn anticommutator(&self, other: &Self) -> Self {
        &self.matmul(other) + &other.matmul(self)
    }

    pub fn kron(&self, other: &Self) -> Self {
        tensor_product(self, other)
    }

    fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j))
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale(-1.0)
    }
}

/// Kronecker product: `(a⊗b)[i·p + k, j·q + l] = a[i,j]·b[k,l]` for `b` of shape `p×q`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (p, q) = (b.rows, b.cols);
    let mut out = ComplexMatrix::zeros(a.rows * p, a.cols * q);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a.get(i, j);
            if aij == ZERO {
                continue;
            }
            for k in 0..p {
                for l in 0..q {
                    out.set(i * p + k, j * q + l, aij * b.get(k, l));
                }
            }
        }
    }
    out
}

/// Kronecker product of a list, left to right; the 1×1 identity for an empty list.
pub fn tensor_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, f| tensor_product(&acc, f))
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    /// `V Λ V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|x| x)
    }

    /// `V f(Λ) V†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, lambda) in self.eigenvalues.iter().enumerate() {
            let fl = f(*lambda);
            if fl == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = v.get(i, k) * fl;
                for j in 0..n {
                    let cur = out.get(i, j);
                    out.set(i, j, cur + vik * v.get(j, k).conj());
                }
            }
        }
        out
    }

    /// Eigenvector of the largest eigenvalue, phase-fixed so that its
    /// largest-magnitude component (first one on ties) is real and positive.
    pub fn top_eigenvector(&self) -> Vec<C64> {
        let n = self.eigenvalues.len();
        let mut v = self.eigenvectors.column(n - 1);
        fix_phase(&mut v);
        v
    }
}

/// Multiplies `v` by a phase making its leading largest-magnitude component real positive.
pub fn fix_phase(v: &mut [C64]) {
    let mut best = 0;
    let mut best_norm = -1.0;
    for (i, z) in v.iter().enumerate() {
        let n = z.norm();
        if n > best_norm + 1e-12 {
            best = i;
            best_norm = n;
        }
    }
    if best_norm > 0.0 {
        let phase = v[best].conj() / best_norm;
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// The input must be Hermitian within [`tol::HERMITIAN_INPUT`] relative to
/// its largest entry; its Hermitian part is what gets diagonalized.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEig> {
    let err = m.hermiticity_error();
    if err > tol::HERMITIAN_INPUT * m.max_abs().max(1.0) {
        return Err(Error::NonHermitianInput(err));
    }
    let n = m.rows();
    let eig = SymmetricEigen::new(m.hermitian_part().to_nalgebra());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

/// Smallest eigenvalue; `m` counts as PSD iff this is at least [`tol::PSD`].
pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eig(m)?.eigenvalues[0])
}

pub fn is_psd(m: &ComplexMatrix) -> Result<bool> {
    Ok(min_eigenvalue(m)? >= tol::PSD)
}

/// `⟨ψ|op|ψ⟩` for pure input, `Tr(ρ·op)` for densities. The imaginary part
/// (at most [`tol::IMAGINARY`] for Hermitian `op`) is discarded.
pub fn expectation(state: &QuantumState, op: &ComplexMatrix) -> Result<f64> {
    let d = state.dim();
    if op.rows() != d || op.cols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: op.rows(),
        });
    }
    let value = match state.data() {
        StateData::Pure(psi) => inner(psi, &op.apply(psi)),
        StateData::Density(rho) => {
            let mut acc = ZERO;
            for i in 0..d {
                for j in 0..d {
                    acc += rho.get(i, j) * op.get(j, i);
                }
            }
            acc
        }
    };
    debug_assert!(value.im.abs() <= tol::IMAGINARY * op.max_abs().max(1.0));
    Ok(value.re)
}

/// `‖op|ψ⟩‖₂` for a pure state.
pub fn vector_norm_applied(state: &QuantumState, op: &ComplexMatrix) -> Result<f64> {
    let psi = state.as_pure().ok_or(Error::DensityInput)?;
    if op.cols() != psi.len() {
        return Err(Error::DimensionMismatch {
            expected: psi.len(),
            found: op.cols(),
        });
    }
    Ok(norm(&op.apply(psi)))
}

/// `⟨u|v⟩`, conjugate-linear in `u`.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    debug_assert_eq!(u.len(), v.len());
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>())
}

pub fn normalize(v: &mut [C64]) -> f64 {
    let n = norm(v);
    if n > 0.0 {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
    n
}

/// Applies `op` to the contiguous factor block `lo..hi` of a vector whose
/// tensor factors have dimensions `dims` (first factor most significant).
pub fn apply_on_factors(
    v: &[C64],
    dims: &[usize],
    lo: usize,
    hi: usize,
    op: &ComplexMatrix,
) -> Vec<C64> {
    let left: usize = dims[..lo].iter().product();
    let mid: usize = dims[lo..hi].iter().product();
    let right: usize = dims[hi..].iter().product();
    assert_eq!(v.len(), left * mid * right);
    assert_eq!((op.rows(), op.cols()), (mid, mid));
    let mut out = vec![ZERO; v.len()];
    for l in 0..left {
        let base = l * mid * right;
        for i in 0..mid {
            let dst = &mut out[base + i * right..base + (i + 1) * right];
            for j in 0..mid {
                let a = op.get(i, j);
                if a == ZERO {
                    continue;
                }
                let src = &v[base + j * right..base + (j + 1) * right];
                for (o, s) in dst.iter_mut().zip(src) {
                    *o += a * s;
                }
            }
        }
    }
    out
}

/// Reduced cross operator `M = Tr_rest |φ⟩⟨ψ|` on the factor block `lo..hi`,
/// so that `⟨ψ|(A ⊗ 1)|φ⟩ = Tr(A·M)` for any `A` on that block.
pub fn partial_cross(phi: &[C64], psi: &[C64], dims: &[usize], lo: usize, hi: usize) -> ComplexMatrix {
    let left: usize = dims[..lo].iter().product();
    let mid: usize = dims[lo..hi].iter().product();
    let right: usize = dims[hi..].iter().product();
    assert_eq!(phi.len(), left * mid * right);
    assert_eq!(psi.len(), phi.len());
    let mut m = ComplexMatrix::zeros(mid, mid);
    for l in 0..left {
        let base = l * mid * right;
        for b in 0..mid {
            let pb = &phi[base + b * right..base + (b + 1) * right];
            for a in 0..mid {
                let pa = &psi[base + a * right..base + (a + 1) * right];
                let s: C64 = pb.iter().zip(pa).map(|(x, y)| x * y.conj()).sum();
                let cur = m.get(b, a);
                m.set(b, a, cur + s);
            }
        }
    }
    m
}

/// Partial trace of a density matrix over every factor outside `lo..hi`.
pub fn reduced_density(rho: &ComplexMatrix, dims: &[usize], lo: usize, hi: usize) -> ComplexMatrix {
    let left: usize = dims[..lo].iter().product();
    let mid: usize = dims[lo..hi].iter().product();
    let right: usize = dims[hi..].iter().product();
    let mut out = ComplexMatrix::zeros(mid, mid);
    for a in 0..mid {
        for b in 0..mid {
            let mut s = ZERO;
            for l in 0..left {
                for r in 0..right {
                    let i = (l * mid + a) * right + r;
                    let j = (l * mid + b) * right + r;
                    s += rho.get(i, j);
                }
            }
            out.set(a, b, s);
        }
    }
    out
}

/// Pauli matrices in the fixed (x, y, z) order.
pub fn pauli(index: usize) -> ComplexMatrix {
    let (o, i, z) = (ZERO, C64::new(0.0, 1.0), ONE);
    let data = match index {
        0 => vec![o, z, z, o],
        1 => vec![o, -i, i, o],
        2 => vec![z, o, o, -z],
        _ => panic!("Pauli index {index} out of range"),
    };
    ComplexMatrix { rows: 2, cols: 2, data }
}

pub fn sigma_x() -> ComplexMatrix {
    pauli(0)
}

pub fn sigma_y() -> ComplexMatrix {
    pauli(1)
}

pub fn sigma_z() -> ComplexMatrix {
    pauli(2)
}
