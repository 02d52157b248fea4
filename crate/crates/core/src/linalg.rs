//! Dense complex linear algebra: SVD-based ranks, null spaces,
//! pseudo-inverses and subspace intersections.
//!
//! Every rank decision goes through a [`Tolerance`], a cutoff on singular
//! values relative to the largest one. Decompositions are backed by
//! `nalgebra` and are deterministic given the input bits.

use std::fmt;
use std::ops::{Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative singular-value cutoff used for every numerical rank decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    rel_rank_eps: f64,
}

impl Tolerance {
    pub const DEFAULT_EPS: f64 = 1e-9;

    pub fn new(rel_rank_eps: f64) -> Result<Self> {
        if rel_rank_eps > 0.0 && rel_rank_eps < 1.0 {
            Ok(Tolerance { rel_rank_eps })
        } else {
            Err(Error::InvalidInput(format!(
                "relative rank tolerance must lie in (0, 1), got {rel_rank_eps}"
            )))
        }
    }

    pub fn rel_rank_eps(&self) -> f64 {
        self.rel_rank_eps
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel_rank_eps: Self::DEFAULT_EPS,
        }
    }
}

/// Dense complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn from_row_slice(rows: usize, cols: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Self::from_inner(DMatrix::from_row_slice(rows, cols, entries))
    }

    pub fn from_inner(inner: DMatrix<Complex64>) -> Result<Self> {
        let m = ComplexMatrix(inner);
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        ComplexMatrix(DMatrix::from_fn(rows, cols, f))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        ComplexMatrix(DMatrix::identity(n, n))
    }

    /// Real diagonal matrix.
    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn is_empty(&self) -> bool {
        self.rows() == 0 || self.cols() == 0
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    /// Entries in row-major order.
    pub fn row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix(self.0.adjoint())
    }

    pub fn scale(&self, factor: f64) -> Self {
        ComplexMatrix(self.0.map(|z| z * factor))
    }

    /// Largest absolute entry; zero for an empty matrix.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn column(&self, j: usize) -> ComplexMatrix {
        ComplexMatrix(self.0.columns(j, 1).into_owned())
    }

    /// The `count` columns starting at `start`.
    pub fn columns(&self, start: usize, count: usize) -> ComplexMatrix {
        ComplexMatrix(self.0.columns(start, count).into_owned())
    }

    pub fn rows_range(&self, start: usize, count: usize) -> ComplexMatrix {
        ComplexMatrix(self.0.rows(start, count).into_owned())
    }

    /// Selects the given rows and columns.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> ComplexMatrix {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.0[(rows[i], cols[j])])
    }

    /// Scales every nonzero column to unit Euclidean norm.
    pub fn normalize_columns(&self) -> ComplexMatrix {
        let mut m = self.0.clone();
        for mut col in m.column_iter_mut() {
            let n = col.norm();
            if n > 0.0 {
                col /= Complex64::new(n, 0.0);
            }
        }
        ComplexMatrix(m)
    }

    /// Horizontal concatenation. All blocks must share `rows`.
    pub fn hstack(rows: usize, blocks: &[&ComplexMatrix]) -> Result<ComplexMatrix> {
        let cols: usize = blocks.iter().map(|b| b.cols()).sum();
        let mut out = DMatrix::zeros(rows, cols);
        let mut at = 0;
        for b in blocks {
            if b.rows() != rows {
                return Err(Error::InvalidInput(format!(
                    "cannot stack a block with {} rows into {rows} rows",
                    b.rows()
                )));
            }
            out.columns_mut(at, b.cols()).copy_from(&b.0);
            at += b.cols();
        }
        Ok(ComplexMatrix(out))
    }

    /// Vertical concatenation. All blocks must share `cols`.
    pub fn vstack(cols: usize, blocks: &[&ComplexMatrix]) -> Result<ComplexMatrix> {
        let rows: usize = blocks.iter().map(|b| b.rows()).sum();
        let mut out = DMatrix::zeros(rows, cols);
        let mut at = 0;
        for b in blocks {
            if b.cols() != cols {
                return Err(Error::InvalidInput(format!(
                    "cannot stack a block with {} columns into {cols} columns",
                    b.cols()
                )));
            }
            out.rows_mut(at, b.rows()).copy_from(&b.0);
            at += b.rows();
        }
        Ok(ComplexMatrix(out))
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidInput("matrix has non-finite entries".into()))
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix {}x{} ", self.rows(), self.cols())?;
        f.debug_list()
            .entries(
                (0..self.rows())
                    .map(|i| (0..self.cols()).map(|j| self.0[(i, j)]).collect::<Vec<_>>()),
            )
            .finish()
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols(), rhs.rows(), "matrix product shape mismatch");
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.shape(),
            rhs.shape(),
            "matrix difference shape mismatch"
        );
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

/// Thin SVD with singular values sorted in decreasing order.
struct SortedSvd {
    u: DMatrix<Complex64>,
    singular: Vec<f64>,
    v: DMatrix<Complex64>,
}

fn sorted_svd(a: &DMatrix<Complex64>) -> SortedSvd {
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v = svd.v_t.expect("requested V^H").adjoint();
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let singular = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u = DMatrix::from_fn(u.nrows(), order.len(), |r, c| u[(r, order[c])]);
    let v = DMatrix::from_fn(v.nrows(), order.len(), |r, c| v[(r, order[c])]);
    SortedSvd { u, singular, v }
}

fn numerical_rank(singular: &[f64], tol: Tolerance) -> usize {
    match singular.first() {
        Some(&largest) if largest > 0.0 => singular
            .iter()
            .filter(|&&s| s > tol.rel_rank_eps * largest)
            .count(),
        _ => 0,
    }
}

/// Singular values in decreasing order.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    a.check_finite()?;
    if a.is_empty() {
        return Ok(Vec::new());
    }
    Ok(sorted_svd(&a.0).singular)
}

/// Number of singular values above `tol` times the largest one.
pub fn rank(a: &ComplexMatrix, tol: Tolerance) -> Result<usize> {
    let s = singular_values(a)?;
    Ok(numerical_rank(&s, tol))
}

/// Orthonormal basis of `{x : A x = 0}`, one column per kernel dimension.
pub fn null_space(a: &ComplexMatrix, tol: Tolerance) -> Result<ComplexMatrix> {
    a.check_finite()?;
    let n = a.cols();
    if n == 0 {
        return Err(Error::InvalidInput(
            "null space of a matrix without columns".into(),
        ));
    }
    if a.rows() == 0 {
        return Ok(ComplexMatrix::identity(n));
    }
    // Thin SVD of a wide matrix drops kernel directions; pad with zero rows
    // so V is square.
    let padded = if a.rows() < n {
        let mut p = DMatrix::zeros(n, n);
        p.rows_mut(0, a.rows()).copy_from(&a.0);
        p
    } else {
        a.0.clone()
    };
    let svd = sorted_svd(&padded);
    let r = numerical_rank(&svd.singular, tol);
    Ok(ComplexMatrix(svd.v.columns(r, n - r).into_owned()))
}

/// Orthonormal basis of the column space of `a`.
pub fn column_space(a: &ComplexMatrix, tol: Tolerance) -> Result<ComplexMatrix> {
    a.check_finite()?;
    if a.is_empty() {
        return Ok(ComplexMatrix::zeros(a.rows(), 0));
    }
    let svd = sorted_svd(&a.0);
    let r = numerical_rank(&svd.singular, tol);
    Ok(ComplexMatrix(svd.u.columns(0, r).into_owned()))
}

/// Orthonormal basis of the orthogonal complement of `span(a)` in `C^rows`.
pub fn orthogonal_complement(a: &ComplexMatrix, tol: Tolerance) -> Result<ComplexMatrix> {
    if a.cols() == 0 {
        return Ok(ComplexMatrix::identity(a.rows()));
    }
    null_space(&a.adjoint(), tol)
}

/// Moore-Penrose pseudo-inverse via the SVD, discarding singular values at
/// or below the relative cutoff.
pub fn pseudo_inverse(a: &ComplexMatrix, tol: Tolerance) -> Result<ComplexMatrix> {
    a.check_finite()?;
    if a.is_empty() {
        return Err(Error::InvalidInput(
            "pseudo-inverse of an empty matrix".into(),
        ));
    }
    let svd = sorted_svd(&a.0);
    let r = numerical_rank(&svd.singular, tol);
    let mut out = DMatrix::zeros(a.cols(), a.rows());
    for k in 0..r {
        let inv = Complex64::new(1.0 / svd.singular[k], 0.0);
        out += svd.v.column(k) * svd.u.column(k).adjoint() * inv;
    }
    Ok(ComplexMatrix(out))
}

/// Orthonormal basis of `span(a) ∩ span(b)`.
///
/// Both spans are first orthonormalized; a null vector `(x, y)` of
/// `[Qa, -Qb]` gives the common vector `Qa x = Qb y`.
pub fn subspace_intersection(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    tol: Tolerance,
) -> Result<ComplexMatrix> {
    if a.rows() != b.rows() {
        return Err(Error::InvalidInput(format!(
            "subspace intersection needs equal row counts, got {} and {}",
            a.rows(),
            b.rows()
        )));
    }
    let qa = column_space(a, tol)?;
    let qb = column_space(b, tol)?;
    if qa.cols() == 0 || qb.cols() == 0 {
        return Ok(ComplexMatrix::zeros(a.rows(), 0));
    }
    let stacked = ComplexMatrix::hstack(a.rows(), &[&qa, &qb.scale(-1.0)])?;
    let kernel = null_space(&stacked, tol)?;
    if kernel.cols() == 0 {
        return Ok(ComplexMatrix::zeros(a.rows(), 0));
    }
    let common = &qa * &kernel.rows_range(0, qa.cols());
    column_space(&common, tol)
}

/// Orthogonal projector onto `span(a)`.
pub fn projector(a: &ComplexMatrix, tol: Tolerance) -> Result<ComplexMatrix> {
    let q = column_space(a, tol)?;
    Ok(&q * &q.adjoint())
}

/// `log2 det(A)` for a Hermitian positive definite `A`.
pub fn log2_det_hpd(a: &ComplexMatrix) -> Result<f64> {
    a.check_finite()?;
    if a.rows() != a.cols() {
        return Err(Error::InvalidInput(
            "determinant of a non-square matrix".into(),
        ));
    }
    if a.rows() == 0 {
        return Ok(0.0);
    }
    let chol =
        a.0.clone()
            .cholesky()
            .ok_or_else(|| Error::InvalidInput("matrix is not positive definite".into()))?;
    let l = chol.l();
    if (0..a.rows()).any(|i| {
        l[(i, i)].re.is_nan() || l[(i, i)].re <= 0.0 || l[(i, i)].im.abs() > 1e-12 * l[(i, i)].re
    }) {
        return Err(Error::InvalidInput(
            "matrix is not positive definite".into(),
        ));
    }
    Ok(2.0 * (0..a.rows()).map(|i| l[(i, i)].re.log2()).sum::<f64>())
}
