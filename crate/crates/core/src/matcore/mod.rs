//! Dense real symmetric and rectangular matrices, spectra, rank notions and
//! the eigenvector-perturbation operators.

mod io;
mod spectrum;

pub use io::{read_rect_matrix, read_sym_matrix, write_rect_matrix, write_sym_matrix};
pub use spectrum::{projector_distance, relative_rank, spectral_gap, tj_operator, ProjectorDistance, RelativeRank, Spectrum};

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative tolerance used when accepting a matrix as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Eigenvalues above `-PSD_TOL * ||A||` are treated as zero.
pub const PSD_TOL: f64 = 1e-10;

/// Dense real symmetric matrix. The upper triangle is authoritative on input;
/// the stored matrix is always exactly symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    /// Validates symmetry within `SYMMETRY_TOL * max|entry|` and mirrors the
    /// upper triangle into the lower one.
    pub fn from_dmatrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() == 0 {
            return Err(Error::invalid("dim", "must be at least 1"));
        }
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("entries", "must be finite"));
        }
        let scale = m.amax();
        let tol = SYMMETRY_TOL * scale;
        let d = m.nrows();
        for i in 0..d {
            for j in (i + 1)..d {
                let diff = (m[(i, j)] - m[(j, i)]).abs();
                if diff > tol {
                    return Err(Error::NotSymmetric { row: i, col: j, diff });
                }
            }
        }
        Ok(Self::symmetrize_upper(m))
    }

    pub fn from_row_slice(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Self::from_dmatrix(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        assert!(!diag.is_empty(), "diagonal must be nonempty");
        SymMatrix(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn identity(dim: usize) -> Self {
        SymMatrix(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        SymMatrix(DMatrix::zeros(dim, dim))
    }

    /// The rank-one matrix `v vᵀ`.
    pub fn outer(v: &DVector<f64>) -> Self {
        SymMatrix(v * v.transpose())
    }

    /// Wraps a matrix the caller knows to be symmetric up to round-off; the
    /// upper triangle wins.
    pub(crate) fn symmetrize_upper(mut m: DMatrix<f64>) -> Self {
        let d = m.nrows();
        for i in 0..d {
            for j in (i + 1)..d {
                m[(j, i)] = m[(i, j)];
            }
        }
        SymMatrix(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.0.amax()
    }

    /// Eigenvalues in descending order (no eigenvectors).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.0.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    /// Operator (spectral) norm: the largest absolute eigenvalue.
    pub fn op_norm(&self) -> f64 {
        self.0
            .symmetric_eigenvalues()
            .iter()
            .fold(0.0_f64, |acc, x| acc.max(x.abs()))
    }

    pub fn eig(&self) -> Result<Spectrum> {
        Spectrum::of(self)
    }

    /// `trace(A) / ||A||` for a nonzero positive semidefinite `A`.
    pub fn effective_rank(&self) -> Result<f64> {
        let ev = self.eigenvalues();
        let norm = ev.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
        if norm == 0.0 {
            return Err(Error::Zero("matrix"));
        }
        let min = *ev.last().expect("dim >= 1");
        if min < -PSD_TOL * norm {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
        let trace: f64 = ev.iter().map(|&x| x.max(0.0)).sum();
        Ok((trace / norm).clamp(1.0, self.dim() as f64))
    }

    /// `vᵀ A v`.
    pub fn quad_form(&self, v: &DVector<f64>) -> f64 {
        v.dot(&(&self.0 * v))
    }

    /// `T A T` for symmetric `T`.
    pub fn congruence(&self, t: &SymMatrix) -> SymMatrix {
        Self::symmetrize_upper(&t.0 * &self.0 * &t.0)
    }

    /// `A²`.
    pub fn square(&self) -> SymMatrix {
        Self::symmetrize_upper(&self.0 * &self.0)
    }

    pub fn scale(&self, c: f64) -> SymMatrix {
        SymMatrix(&self.0 * c)
    }

    /// In-place `self += c * other`.
    pub fn add_scaled(&mut self, c: f64, other: &SymMatrix) {
        self.0.zip_apply(&other.0, |a, b| *a += c * b);
    }
}

impl Add for &SymMatrix {
    type Output = SymMatrix;
    fn add(self, rhs: &SymMatrix) -> SymMatrix {
        SymMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &SymMatrix {
    type Output = SymMatrix;
    fn sub(self, rhs: &SymMatrix) -> SymMatrix {
        SymMatrix(&self.0 - &rhs.0)
    }
}

impl Mul<f64> for &SymMatrix {
    type Output = SymMatrix;
    fn mul(self, rhs: f64) -> SymMatrix {
        self.scale(rhs)
    }
}

/// Dense rectangular real matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct RectMatrix(DMatrix<f64>);

impl RectMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(Error::invalid("shape", "rows and cols must be positive"));
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("entries", "must be finite"));
        }
        Ok(RectMatrix(m))
    }

    pub fn from_row_slice(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(rows, cols, entries))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn column(&self, k: usize) -> DVector<f64> {
        self.0.column(k).into_owned()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    /// Largest singular value.
    pub fn op_norm(&self) -> f64 {
        self.0.singular_values().max()
    }

    /// `‖B‖_F² / ‖B‖²`.
    pub fn stable_rank(&self) -> Result<f64> {
        let norm = self.op_norm();
        if norm == 0.0 {
            return Err(Error::Zero("matrix"));
        }
        let fro = self.frobenius_norm();
        let bound = self.rows().min(self.cols()) as f64;
        Ok(((fro * fro) / (norm * norm)).clamp(1.0, bound))
    }

    /// `B Bᵀ`.
    pub fn gram_rows(&self) -> SymMatrix {
        SymMatrix::symmetrize_upper(&self.0 * self.0.transpose())
    }

    /// Symmetric embedding `[[0, W], [Wᵀ, 0]]` whose eigenvalues are the
    /// singular values of `W` with both signs, padded with zeros.
    pub fn hermitian_dilation(&self) -> SymMatrix {
        let (r, c) = (self.rows(), self.cols());
        let mut out = DMatrix::zeros(r + c, r + c);
        out.view_mut((0, r), (r, c)).copy_from(&self.0);
        out.view_mut((r, 0), (c, r)).copy_from(&self.0.transpose());
        SymMatrix(out)
    }
}

pub fn op_norm(a: &SymMatrix) -> f64 {
    a.op_norm()
}

pub fn effective_rank(a: &SymMatrix) -> Result<f64> {
    a.effective_rank()
}

pub fn stable_rank(b: &RectMatrix) -> Result<f64> {
    b.stable_rank()
}

pub fn hermitian_dilation(w: &RectMatrix) -> SymMatrix {
    w.hermitian_dilation()
}
