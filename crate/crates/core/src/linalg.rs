//! Dense complex linear algebra for small operators.
//!
//! Matrices are stored row-major as `Complex64`. Everything here is sized for
//! few-qubit problems (dimension ≤ 64), so the eigensolver is a plain cyclic
//! Jacobi method on the hermitian matrix rather than a Householder/QR pipeline.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use thiserror::Error;

/// Absolute tolerance on `|M[i][j] - conj(M[j][i])|` for a matrix to count as hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Jacobi stops once the off-diagonal Frobenius norm drops below this fraction of `‖M‖_F`.
pub const JACOBI_REL_TOL: f64 = 1e-13;

/// Maximum number of cyclic Jacobi sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 100;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {op} needs {expected}, got {found}")]
    DimensionMismatch {
        op: &'static str,
        expected: String,
        found: String,
    },
    #[error("matrix is not hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },
    #[error("matrix dimensions must be positive")]
    Empty,
}

fn mismatch(op: &'static str, expected: impl fmt::Display, found: impl fmt::Display) -> LinalgError {
    LinalgError::DimensionMismatch {
        op,
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

fn check_finite(entries: &[Complex64]) -> Result<(), LinalgError> {
    match entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        Some(index) => Err(LinalgError::NonFinite { index }),
        None => Ok(()),
    }
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting bad lengths and NaN/infinity.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::Empty);
        }
        if data.len() != rows * cols {
            return Err(mismatch("from_vec", rows * cols, data.len()));
        }
        check_finite(&data)?;
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows. Panics on ragged input; intended for literals.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix literal");
        Self::from_vec(rows.len(), cols, rows.concat()).expect("invalid matrix literal")
    }

    /// Real-valued literal convenience.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![C0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C1;
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector::new((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise distance to `other`; panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|M[i][j] - conj(M[j][i])|`, or infinity for a non-square matrix.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_deviation() <= HERMITIAN_TOL
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(mismatch(
                "matmul",
                format!("{} rows", self.cols),
                format!("{} rows", other.rows),
            ));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &ComplexVector) -> Result<ComplexVector, LinalgError> {
        if self.cols != v.dim() {
            return Err(mismatch("mul_vec", self.cols, v.dim()));
        }
        Ok(ComplexVector::new(
            (0..self.rows)
                .map(|i| self.row(i).iter().zip(v.as_slice()).map(|(a, b)| a * b).sum())
                .collect(),
        ))
    }

    fn same_shape(&self, other: &Self, op: &'static str) -> Result<(), LinalgError> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(mismatch(
                op,
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", other.rows, other.cols),
            ));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, LinalgError> {
        self.same_shape(other, "add")?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, LinalgError> {
        self.same_shape(other, "sub")?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

// The operator impls panic on shape mismatch; use the `try_*` forms where the
// shapes are not known statically.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_add(rhs).expect("matrix sum shape mismatch")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_sub(rhs).expect("matrix difference shape mismatch")
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self
                .row(i)
                .iter()
                .map(|z| format!("{:>10.6}{:+.6}i", z.re, z.im))
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Dense complex column vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector(Vec<Complex64>);

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Self {
        Self(entries)
    }

    pub fn from_real(entries: &[f64]) -> Self {
        Self(entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Standard basis vector `e_index` of dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = vec![C0; dim];
        v[index] = C1;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Returns `self / ‖self‖`; a zero vector is returned unchanged.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        self.scale(Complex64::new(1.0 / n, 0.0))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self(self.0.iter().map(|&z| z * factor).collect())
    }

    /// `⟨self, other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn axpy(&self, alpha: Complex64, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + alpha * b).collect())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Kronecker product of two vectors.
    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.iter().flat_map(|a| other.0.iter().map(move |b| a * b)).collect())
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

/// Eigendecomposition of a hermitian matrix.
///
/// Eigenvalues ascend; `eigenvectors[k]` pairs with `eigenvalues[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub dim: usize,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<ComplexVector>,
    /// Largest `‖M v_k − λ_k v_k‖` over all pairs.
    pub max_residual: f64,
    /// Per-pair residual norms.
    pub residuals: Vec<f64>,
}

impl Spectrum {
    /// Residual bound `1e-10·(1 + ‖M‖_max·dim)` that every eigenpair must meet.
    pub fn residual_bound(matrix: &ComplexMatrix) -> f64 {
        1e-10 * (1.0 + matrix.max_abs() * matrix.rows() as f64)
    }

    /// Eigenvector matrix with eigenvector `k` in column `k`.
    pub fn eigenvector_matrix(&self) -> ComplexMatrix {
        let mut v = ComplexMatrix::zeros(self.dim, self.dim);
        for (k, vec) in self.eigenvectors.iter().enumerate() {
            for i in 0..self.dim {
                v[(i, k)] = vec[i];
            }
        }
        v
    }

    /// `V·diag(λ)·V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|x| x)
    }

    /// `V·diag(f(λ))·V†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for (lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let w = f(*lambda);
            for i in 0..self.dim {
                let vi = v[i] * w;
                for j in 0..self.dim {
                    out[(i, j)] += vi * v[j].conj();
                }
            }
        }
        out
    }

    /// Largest `|⟨v_i, v_j⟩ − δ_ij|`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, vi) in self.eigenvectors.iter().enumerate() {
            for (j, vj) in self.eigenvectors.iter().enumerate().skip(i) {
                let target = if i == j { C1 } else { C0 };
                worst = worst.max((vi.inner(vj) - target).norm());
            }
        }
        worst
    }

    /// True when eigenvalue `k` has a neighbour within `tol`.
    pub fn is_degenerate(&self, k: usize, tol: f64) -> bool {
        let e = &self.eigenvalues;
        (k > 0 && (e[k] - e[k - 1]).abs() <= tol) || (k + 1 < e.len() && (e[k + 1] - e[k]).abs() <= tol)
    }
}

/// Kronecker product `a ⊗ b`: block `(i, j)` is `a[i][j]·b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ai in 0..a.rows {
        for aj in 0..a.cols {
            let s = a[(ai, aj)];
            if s == C0 {
                continue;
            }
            for bi in 0..b.rows {
                for bj in 0..b.cols {
                    out[(ai * b.rows + bi, aj * b.cols + bj)] = s * b[(bi, bj)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a nonempty list of factors, left to right.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> Option<ComplexMatrix> {
    factors.into_iter().fold(None, |acc, m| match acc {
        None => Some(m.clone()),
        Some(prev) => Some(kron(&prev, m)),
    })
}

fn require_square_pair(a: &ComplexMatrix, b: &ComplexMatrix, op: &'static str) -> Result<(), LinalgError> {
    if !a.is_square() || !b.is_square() || a.rows != b.rows {
        return Err(mismatch(
            op,
            format!("square {}x{}", a.rows, a.rows),
            format!("{}x{} and {}x{}", a.rows, a.cols, b.rows, b.cols),
        ));
    }
    Ok(())
}

/// `[a, b] = a·b − b·a`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    require_square_pair(a, b, "commutator")?;
    Ok(&(a * b) - &(b * a))
}

/// Hilbert–Schmidt inner product `tr(a·b†)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64, LinalgError> {
    a.same_shape(b, "hs_inner")?;
    // tr(a b†) = Σ_ij a_ij conj(b_ij)
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x * y.conj()).sum())
}

/// The `n²×n²` swap permutation: `P·(u⊗v) = v⊗u`.
pub fn swap_permutation(n: usize) -> ComplexMatrix {
    assert!(n >= 1, "swap_permutation needs n >= 1");
    let mut p = ComplexMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            // |i⟩⊗|j⟩ sits at i·n + j and maps to |j⟩⊗|i⟩.
            p[(j * n + i, i * n + j)] = C1;
        }
    }
    p
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Eigenvalues are returned in ascending order, ties kept in the order of the
/// final diagonal. Each eigenvector's largest-magnitude component (lowest index
/// on ties within 1e-12) is made real and positive.
pub fn eigh(m: &ComplexMatrix) -> Result<Spectrum, LinalgError> {
    if !m.is_square() {
        return Err(mismatch("eigh", "square matrix", format!("{}x{}", m.rows, m.cols)));
    }
    check_finite(&m.data)?;
    let deviation = m.hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(LinalgError::NotHermitian { deviation });
    }

    let n = m.rows;
    // Work on the exactly hermitian part.
    let mut a = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let threshold = JACOBI_REL_TOL * a.frobenius_norm();

    let mut converged = false;
    let mut off = off_diagonal_norm(&a);
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        off = off_diagonal_norm(&a);
    }
    if !converged && off > threshold {
        return Err(LinalgError::NoConvergence {
            sweeps: JACOBI_MAX_SWEEPS,
            off_norm: off,
        });
    }

    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // sort_by is stable, so equal eigenvalues keep diagonal order.
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));

    let eigenvalues: Vec<f64> = order.iter().map(|&k| diag[k]).collect();
    let eigenvectors: Vec<ComplexVector> = order.iter().map(|&k| fix_phase(v.column(k))).collect();

    let residuals: Vec<f64> = eigenvalues
        .iter()
        .zip(&eigenvectors)
        .map(|(&lambda, vec)| {
            let mv = m.mul_vec(vec).expect("square");
            mv.axpy(Complex64::new(-lambda, 0.0), vec).norm()
        })
        .collect();
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);

    Ok(Spectrum {
        dim: n,
        eigenvalues,
        eigenvectors,
        max_residual,
        residuals,
    })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows;
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// One Jacobi rotation annihilating `a[p][q]`, accumulated into `v`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let n = a.rows;

    // Negligible next to both diagonal entries: drop it instead of rotating.
    if app.abs() + 1e3 * mag == app.abs() && aqq.abs() + 1e3 * mag == aqq.abs() {
        a[(p, q)] = C0;
        a[(q, p)] = C0;
        return;
    }

    // G = diag(1, e^{-iφ}) · [[c, s], [-s, c]] on the (p, q) plane, where
    // a[p][q] = |a_pq|·e^{iφ}. The phase factor makes the pivot real.
    let phase = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    // Smaller root of t² + 2θt − 1 = 0; for |θ| beyond ~1e154 t ≈ 1/(2θ).
    let t = if theta.abs() < 1e150 {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    } else {
        0.5 / theta
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = phase.conj() * (-s);
    let g_qq = phase.conj() * c;

    // A ← A·G
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    // A ← G†·A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = C0;
    a[(q, p)] = C0;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    // V ← V·G
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// Rotates `v` so its dominant component is real and positive.
fn fix_phase(v: ComplexVector) -> ComplexVector {
    let largest = v.as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if largest == 0.0 {
        return v;
    }
    let pivot = v
        .as_slice()
        .iter()
        .position(|z| z.norm() >= largest - 1e-12)
        .expect("max exists");
    let z = v[pivot];
    let rotation = z.conj() / z.norm();
    let mut out = v.scale(rotation).into_inner();
    out[pivot] = Complex64::new(z.norm(), 0.0);
    ComplexVector::new(out)
}

/// `exp(t·M)` for hermitian `M`, evaluated through its spectrum.
pub fn mat_exp_hermitian(m: &ComplexMatrix, t: f64) -> Result<ComplexMatrix, LinalgError> {
    let spectrum = eigh(m)?;
    Ok(spectrum.reconstruct_with(|lambda| (t * lambda).exp()))
}
