//! Square real matrices with banded or row-compressed sparse storage,
//! direct band factorization, power-iteration spectral estimates, and the
//! matrix-class predicates used by the convergence certificates.

mod banded;
mod factor;
mod market;
mod sparse;
mod spectral;

pub use banded::Banded;
pub use factor::{factorize, FactorizedOperator};
pub use market::{read_matrix_market, read_vector, write_matrix_market, write_vector};
pub use sparse::Csr;
pub use spectral::{
    extreme_eigenvalues_sym, inverse_two_norm_estimate, two_norm_estimate, SpectralEstimate,
};

use crate::error::{Error, Result};

/// Relative tolerance used when testing imported matrices for symmetry.
/// Generated matrices must be symmetric to the bit.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
enum Storage {
    Banded(Banded),
    Sparse(Csr),
}

/// Square real matrix. Banded storage is the default for generated problems;
/// general sparse holds Matrix Market imports.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    storage: Storage,
    symmetric: bool,
}

impl Matrix {
    /// All-zero banded matrix; entries are set with [`Matrix::set`].
    pub fn zeros_banded(n: usize, kl: usize, ku: usize) -> Self {
        Matrix {
            storage: Storage::Banded(Banded::zeros(n, kl, ku)),
            symmetric: kl == ku,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros_banded(n, 0, 0);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let mut m = Matrix::zeros_banded(d.len(), 0, 0);
        for (i, &v) in d.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Tridiagonal matrix with constant bands.
    pub fn tridiagonal(n: usize, lower: f64, diag: f64, upper: f64) -> Self {
        let mut m = Matrix::zeros_banded(n, 1.min(n - 1), 1.min(n - 1));
        for i in 0..n {
            m.set(i, i, diag);
            if i + 1 < n {
                m.set(i + 1, i, lower);
                m.set(i, i + 1, upper);
            }
        }
        m.symmetric = lower == upper;
        m
    }

    /// Dense rows packed into a full-bandwidth banded store. Intended for
    /// small matrices (tests, certificates on toy instances).
    pub fn from_dense_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("dense rows must form a square".into()));
        }
        let mut m = Matrix::zeros_banded(n, n - 1, n - 1);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m.symmetric = m.check_symmetric(None);
        Ok(m)
    }

    /// General-sparse matrix from (row, col, value) triplets.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let csr = Csr::from_triplets(n, triplets)?;
        let mut m = Matrix {
            storage: Storage::Sparse(csr),
            symmetric: false,
        };
        m.symmetric = m.check_symmetric(None);
        Ok(m)
    }

    pub(crate) fn from_csr(csr: Csr, symmetric: bool) -> Self {
        Matrix {
            storage: Storage::Sparse(csr),
            symmetric,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        match &self.storage {
            Storage::Banded(b) => b.n(),
            Storage::Sparse(s) => s.n(),
        }
    }

    /// (lower, upper) bandwidths of the stored pattern.
    pub fn bandwidths(&self) -> (usize, usize) {
        match &self.storage {
            Storage::Banded(b) => (b.kl(), b.ku()),
            Storage::Sparse(s) => s.bandwidths(),
        }
    }

    pub fn is_banded(&self) -> bool {
        matches!(self.storage, Storage::Banded(_))
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match &self.storage {
            Storage::Banded(b) => b.get(i, j),
            Storage::Sparse(s) => s.get(i, j),
        }
    }

    /// Set an entry. Only banded matrices are mutable; the sparse kind is
    /// constructed once from triplets. Off-diagonal writes clear the
    /// symmetry hint.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        match &mut self.storage {
            Storage::Banded(b) => b.set(i, j, v),
            Storage::Sparse(_) => panic!("sparse matrices are immutable after construction"),
        }
        if i != j {
            self.symmetric = false;
        }
    }

    /// Symmetry hint carried by the matrix (set by constructors/generators).
    #[inline]
    pub fn symmetric_hint(&self) -> bool {
        self.symmetric
    }

    pub fn set_symmetric_hint(&mut self, flag: bool) {
        self.symmetric = flag;
    }

    /// Entrywise symmetry check: exact when `tol` is `None`, relative to the
    /// largest entry otherwise.
    pub fn check_symmetric(&self, tol: Option<f64>) -> bool {
        let bound = tol.map(|t| t * self.max_abs()).unwrap_or(0.0);
        let mut ok = true;
        self.for_each_entry(|i, j, v| {
            if i < j && (v - self.entry(j, i)).abs() > bound {
                ok = false;
            }
        });
        if ok {
            // entries present only below the diagonal must be mirrored too
            self.for_each_entry(|i, j, v| {
                if i > j && (v - self.entry(j, i)).abs() > bound {
                    ok = false;
                }
            });
        }
        ok
    }

    pub fn max_abs(&self) -> f64 {
        match &self.storage {
            Storage::Banded(b) => b.max_abs(),
            Storage::Sparse(s) => s.max_abs(),
        }
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        y.fill(0.0);
        match &self.storage {
            Storage::Banded(b) => b.matvec_into(x, y),
            Storage::Sparse(s) => s.matvec_into(x, y),
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n()];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_transpose_into(&self, x: &[f64], y: &mut [f64]) {
        y.fill(0.0);
        match &self.storage {
            Storage::Banded(b) => b.matvec_transpose_into(x, y),
            Storage::Sparse(s) => s.matvec_transpose_into(x, y),
        }
    }

    /// Checked product for the public operation surface.
    pub fn try_matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "matvec: matrix is {0}x{0}, vector has length {1}",
                self.n(),
                x.len()
            )));
        }
        Ok(self.matvec(x))
    }

    fn to_banded_storage(&self) -> Banded {
        match &self.storage {
            Storage::Banded(b) => b.clone(),
            Storage::Sparse(s) => s.to_banded(),
        }
    }

    pub(crate) fn banded_view(&self) -> std::borrow::Cow<'_, Banded> {
        match &self.storage {
            Storage::Banded(b) => std::borrow::Cow::Borrowed(b),
            Storage::Sparse(s) => std::borrow::Cow::Owned(s.to_banded()),
        }
    }

    /// Entrywise combination; the result is banded.
    fn combine(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Result<Matrix> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch(format!(
                "combine: {} vs {}",
                self.n(),
                other.n()
            )));
        }
        let a = self.banded_view();
        let b = other.banded_view();
        let out = a.combine(&b, f);
        let mut m = Matrix {
            storage: Storage::Banded(out),
            symmetric: false,
        };
        m.symmetric = self.symmetric && other.symmetric;
        Ok(m)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.combine(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.combine(other, |x, y| x - y)
    }

    pub fn scale(&self, s: f64) -> Matrix {
        let storage = match &self.storage {
            Storage::Banded(b) => {
                let mut out = b.clone();
                out.scale_in_place(s);
                Storage::Banded(out)
            }
            Storage::Sparse(csr) => Storage::Sparse(csr.map(|v| v * s)),
        };
        Matrix {
            storage,
            symmetric: self.symmetric,
        }
    }

    /// `self + shift * I`.
    pub fn shifted(&self, shift: f64) -> Matrix {
        match &self.storage {
            Storage::Banded(b) => {
                let mut out = b.clone();
                out.add_diagonal_in_place(shift);
                Matrix {
                    storage: Storage::Banded(out),
                    symmetric: self.symmetric,
                }
            }
            Storage::Sparse(_) => {
                let mut out = self.to_banded_storage();
                out.add_diagonal_in_place(shift);
                Matrix {
                    storage: Storage::Banded(out),
                    symmetric: self.symmetric,
                }
            }
        }
    }

    /// Entrywise absolute value |V|.
    pub fn abs_matrix(&self) -> Matrix {
        let storage = match &self.storage {
            Storage::Banded(b) => {
                let mut out = b.clone();
                out.map_in_place(f64::abs);
                Storage::Banded(out)
            }
            Storage::Sparse(csr) => Storage::Sparse(csr.map(f64::abs)),
        };
        Matrix {
            storage,
            symmetric: self.symmetric,
        }
    }

    /// Comparison matrix: |v_ii| on the diagonal, -|v_ij| off it.
    pub fn comparison_matrix(&self) -> Matrix {
        let n = self.n();
        let apply = |i: usize, j: usize, v: f64| if i == j { v.abs() } else { -v.abs() };
        let storage = match &self.storage {
            Storage::Banded(b) => {
                let mut res = Banded::zeros(n, b.kl(), b.ku());
                b.for_each_entry(|i, j, v| res.set(i, j, apply(i, j, v)));
                Storage::Banded(res)
            }
            Storage::Sparse(s) => {
                let mut trips = Vec::with_capacity(s.nnz());
                s.for_each_entry(|i, j, v| trips.push((i, j, apply(i, j, v))));
                Storage::Sparse(Csr::from_triplets(n, &trips).expect("pattern already validated"))
            }
        };
        Matrix {
            storage,
            symmetric: self.symmetric,
        }
    }

    /// Z-matrix test: every off-diagonal entry nonpositive.
    pub fn is_z_matrix(&self) -> bool {
        let mut ok = true;
        self.for_each_entry(|i, j, v| {
            if i != j && v > 0.0 {
                ok = false;
            }
        });
        ok
    }

    /// M-matrix test for Z-matrices via the positive-vector characterization:
    /// solve Vx = 1 and require every component of x to exceed 1e-12.
    /// Singular V yields false rather than an error.
    pub fn is_m_matrix(&self) -> bool {
        if !self.is_z_matrix() {
            return false;
        }
        let fact = match factorize(self, false) {
            Ok(f) => f,
            Err(_) => return false,
        };
        let mut x = vec![1.0; self.n()];
        fact.solve_into(&mut x);
        x.iter().all(|&v| v.is_finite() && v > 1e-12)
    }

    /// H+-matrix test: positive diagonal and comparison matrix is an M-matrix.
    pub fn is_h_plus_matrix(&self) -> bool {
        (0..self.n()).all(|i| self.entry(i, i) > 0.0) && self.comparison_matrix().is_m_matrix()
    }

    /// Visit stored entries in row-major order (structural zeros of the band
    /// included; callers filter if they care).
    pub fn for_each_entry(&self, f: impl FnMut(usize, usize, f64)) {
        match &self.storage {
            Storage::Banded(b) => b.for_each_entry(f),
            Storage::Sparse(s) => s.for_each_entry(f),
        }
    }

    /// Row-major dense copy; intended for small matrices and test oracles.
    pub fn to_dense_row_major(&self) -> Vec<f64> {
        let n = self.n();
        let mut out = vec![0.0; n * n];
        self.for_each_entry(|i, j, v| out[i * n + j] = v);
        out
    }
}
