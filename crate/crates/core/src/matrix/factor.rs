//! Direct factorization of banded matrices: Cholesky for symmetric positive
//! definite operators, LU with partial pivoting otherwise. Sparse matrices
//! are factorized through their band envelope; fill-reducing orderings are
//! out of scope.

use super::Matrix;
use crate::error::{Error, Result};

/// Pivots smaller than this fraction of the largest entry are treated as
/// exact singularity.
pub const PIVOT_RTOL: f64 = 1e-14;

#[derive(Debug, Clone)]
pub enum FactorizedOperator {
    Lu(BandLu),
    Cholesky(BandCholesky),
}

impl FactorizedOperator {
    pub fn n(&self) -> usize {
        match self {
            FactorizedOperator::Lu(f) => f.n,
            FactorizedOperator::Cholesky(f) => f.n,
        }
    }

    pub fn is_cholesky(&self) -> bool {
        matches!(self, FactorizedOperator::Cholesky(_))
    }

    /// Overwrite `b` with `A^{-1} b`.
    pub fn solve_into(&self, b: &mut [f64]) {
        match self {
            FactorizedOperator::Lu(f) => f.solve_into(b),
            FactorizedOperator::Cholesky(f) => f.solve_into(b),
        }
    }

    /// Overwrite `b` with `A^{-T} b`.
    pub fn solve_transpose_into(&self, b: &mut [f64]) {
        match self {
            FactorizedOperator::Lu(f) => f.solve_transpose_into(b),
            FactorizedOperator::Cholesky(f) => f.solve_into(b),
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_into(&mut x);
        x
    }
}

/// Factorize `a`. The Cholesky path is attempted only when `spd_hint` is set
/// and the band is symmetric in shape; any nonpositive pivot falls back to LU.
pub fn factorize(a: &Matrix, spd_hint: bool) -> Result<FactorizedOperator> {
    let band = a.banded_view();
    let max_abs = band.max_abs();
    if spd_hint && band.kl() == band.ku() {
        if let Some(chol) = BandCholesky::compute(&band, max_abs) {
            return Ok(FactorizedOperator::Cholesky(chol));
        }
    }
    BandLu::compute(&band, max_abs).map(FactorizedOperator::Lu)
}

/// Band LU with partial pivoting. Storage follows the usual band-factor
/// layout: `ld = 2*kl + ku + 1` rows per column, the extra `kl` rows holding
/// fill from row interchanges; entry (i, j) sits at
/// `data[j * ld + (kl + ku + i - j)]`.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    kv: usize, // kl + ku: width of the fully filled upper profile
    ld: usize,
    data: Vec<f64>,
    ipiv: Vec<usize>,
}

impl BandLu {
    fn compute(band: &super::banded::Banded, max_abs: f64) -> Result<Self> {
        let n = band.n();
        let kl = band.kl();
        let ku = band.ku();
        let kv = kl + ku;
        let ld = 2 * kl + ku + 1;
        let thresh = PIVOT_RTOL * max_abs;

        let mut data = vec![0.0; ld * n];
        for j in 0..n {
            let (i0, col) = band.col(j);
            for (t, &v) in col.iter().enumerate() {
                data[j * ld + (kv + (i0 + t) - j)] = v;
            }
        }

        let mut ipiv = vec![0usize; n];
        let mut mult = vec![0.0; kl + 1];
        let mut ju = 0usize;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let col = j * ld + kv;
            let mut jp = 0usize;
            let mut pmax = data[col].abs();
            for t in 1..=km {
                let v = data[col + t].abs();
                if v > pmax {
                    pmax = v;
                    jp = t;
                }
            }
            if pmax <= thresh {
                return Err(Error::SingularMatrix);
            }
            ipiv[j] = j + jp;
            ju = ju.max((j + ku + jp).min(n - 1));
            if jp != 0 {
                for c in j..=ju {
                    let base = c * ld + (kv + j - c);
                    data.swap(base, base + jp);
                }
            }
            if km > 0 {
                let piv = data[col];
                for t in 1..=km {
                    data[col + t] /= piv;
                    mult[t] = data[col + t];
                }
                for c in (j + 1)..=ju {
                    let base = c * ld + (kv + j - c);
                    let f = data[base];
                    if f != 0.0 {
                        for t in 1..=km {
                            data[base + t] -= mult[t] * f;
                        }
                    }
                }
            }
        }
        Ok(BandLu {
            n,
            kl,
            kv,
            ld,
            data,
            ipiv,
        })
    }

    fn solve_into(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        let (n, kl, kv, ld) = (self.n, self.kl, self.kv, self.ld);
        if kl > 0 {
            for j in 0..n {
                let p = self.ipiv[j];
                if p != j {
                    b.swap(j, p);
                }
                let km = kl.min(n - 1 - j);
                let bj = b[j];
                if bj != 0.0 {
                    let col = j * ld + kv;
                    for t in 1..=km {
                        b[j + t] -= self.data[col + t] * bj;
                    }
                }
            }
        }
        for j in (0..n).rev() {
            let col = j * ld + kv;
            b[j] /= self.data[col];
            let bj = b[j];
            if bj != 0.0 {
                let lm = kv.min(j);
                for t in 1..=lm {
                    b[j - t] -= self.data[col - t] * bj;
                }
            }
        }
    }

    fn solve_transpose_into(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        let (n, kl, kv, ld) = (self.n, self.kl, self.kv, self.ld);
        // U^T y = b (forward)
        for j in 0..n {
            let col = j * ld + kv;
            let lm = kv.min(j);
            let mut s = b[j];
            for t in 1..=lm {
                s -= self.data[col - t] * b[j - t];
            }
            b[j] = s / self.data[col];
        }
        // L^T x = y with interchanges replayed in reverse
        if kl > 0 {
            for j in (0..n).rev() {
                let km = kl.min(n - 1 - j);
                let col = j * ld + kv;
                let mut s = b[j];
                for t in 1..=km {
                    s -= self.data[col + t] * b[j + t];
                }
                b[j] = s;
                let p = self.ipiv[j];
                if p != j {
                    b.swap(j, p);
                }
            }
        }
    }
}

/// Band Cholesky A = L L^T, lower factor stored column-major with
/// `ld = p + 1`; entry L(i, j) sits at `data[j * ld + (i - j)]`.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    p: usize,
    data: Vec<f64>,
}

impl BandCholesky {
    /// Returns `None` when a pivot is nonpositive or negligible, signalling
    /// the caller to fall back to LU.
    fn compute(band: &super::banded::Banded, max_abs: f64) -> Option<Self> {
        let n = band.n();
        let p = band.kl();
        let ld = p + 1;
        let thresh = PIVOT_RTOL * max_abs;
        let mut data = vec![0.0; ld * n];
        for j in 0..n {
            let mut s = band.get(j, j);
            for k in j.saturating_sub(p)..j {
                let l = data[k * ld + (j - k)];
                s -= l * l;
            }
            if s <= thresh {
                return None;
            }
            let ljj = s.sqrt();
            data[j * ld] = ljj;
            for i in (j + 1)..(j + p + 1).min(n) {
                let mut s2 = band.get(i, j);
                for k in i.saturating_sub(p)..j {
                    s2 -= data[k * ld + (i - k)] * data[k * ld + (j - k)];
                }
                data[j * ld + (i - j)] = s2 / ljj;
            }
        }
        Some(BandCholesky { n, p, data })
    }

    fn solve_into(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        let (n, p, ld) = (self.n, self.p, self.p + 1);
        for k in 0..n {
            b[k] /= self.data[k * ld];
            let bk = b[k];
            if bk != 0.0 {
                for t in 1..=p.min(n - 1 - k) {
                    b[k + t] -= self.data[k * ld + t] * bk;
                }
            }
        }
        for k in (0..n).rev() {
            let mut s = b[k];
            for t in 1..=p.min(n - 1 - k) {
                s -= self.data[k * ld + t] * b[k + t];
            }
            b[k] = s / self.data[k * ld];
        }
    }
}
