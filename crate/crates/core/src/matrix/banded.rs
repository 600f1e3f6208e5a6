//! Column-major band storage.
//!
//! Entry `(i, j)` lives at `data[j * ld + (ku + i - j)]` with
//! `ld = kl + ku + 1`, valid for `j - ku <= i <= j + kl`. Everything outside
//! the band is an implicit structural zero.

#[derive(Debug, Clone, PartialEq)]
pub struct Banded {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<f64>,
}

impl Banded {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        assert!(n > 0, "matrix dimension must be positive");
        let kl = kl.min(n - 1);
        let ku = ku.min(n - 1);
        let ld = kl + ku + 1;
        Banded {
            n,
            kl,
            ku,
            data: vec![0.0; ld * n],
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn kl(&self) -> usize {
        self.kl
    }

    #[inline]
    pub fn ku(&self) -> usize {
        self.ku
    }

    #[inline]
    fn ld(&self) -> usize {
        self.kl + self.ku + 1
    }

    #[inline]
    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && i + self.ku >= j && j + self.kl >= i
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[j * self.ld() + (self.ku + i - j)]
        } else {
            0.0
        }
    }

    /// Panics when `(i, j)` falls outside the band; callers build matrices
    /// whose pattern is known up front.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(
            self.in_band(i, j),
            "entry ({i}, {j}) outside band (kl={}, ku={})",
            self.kl,
            self.ku
        );
        let ld = self.ld();
        self.data[j * ld + (self.ku + i - j)] = v;
    }

    /// Row range of stored entries in column `j`.
    #[inline]
    pub fn col_range(&self, j: usize) -> std::ops::Range<usize> {
        j.saturating_sub(self.ku)..(j + self.kl + 1).min(self.n)
    }

    /// Stored slice of column `j` together with the row index of its first
    /// element.
    #[inline]
    pub fn col(&self, j: usize) -> (usize, &[f64]) {
        let range = self.col_range(j);
        let ld = self.ld();
        let start = j * ld + (self.ku + range.start - j);
        (range.start, &self.data[start..start + range.len()])
    }

    /// y += A x, accumulating column by column so each y[i] receives its
    /// terms in ascending j, matching a dense row-major evaluation exactly.
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for j in 0..self.n {
            let xj = x[j];
            if xj == 0.0 {
                continue;
            }
            let (i0, col) = self.col(j);
            for (t, &a) in col.iter().enumerate() {
                y[i0 + t] += a * xj;
            }
        }
    }

    /// y += A^T x; column j of A is row j of A^T, so this is a dot product
    /// per output component.
    pub fn matvec_transpose_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for j in 0..self.n {
            let (i0, col) = self.col(j);
            let mut s = 0.0;
            for (t, &a) in col.iter().enumerate() {
                s += a * x[i0 + t];
            }
            y[j] += s;
        }
    }

    pub fn max_abs(&self) -> f64 {
        // Structural zeros in the rectangular store never exceed real entries.
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn scale_in_place(&mut self, s: f64) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    pub fn add_diagonal_in_place(&mut self, s: f64) {
        let ld = self.ld();
        for j in 0..self.n {
            self.data[j * ld + self.ku] += s;
        }
    }

    pub fn map_in_place(&mut self, f: impl Fn(f64) -> f64) {
        // Keep structural zeros at zero so out-of-band positions stay clean.
        for j in 0..self.n {
            let range = self.col_range(j);
            let ld = self.ld();
            let start = j * ld + (self.ku + range.start - j);
            for v in &mut self.data[start..start + range.len()] {
                *v = f(*v);
            }
        }
    }

    /// Entrywise combine two banded matrices into a band wide enough for both.
    pub fn combine(&self, other: &Banded, f: impl Fn(f64, f64) -> f64) -> Banded {
        assert_eq!(self.n, other.n);
        let kl = self.kl.max(other.kl);
        let ku = self.ku.max(other.ku);
        let mut out = Banded::zeros(self.n, kl, ku);
        for j in 0..self.n {
            for i in out.col_range(j) {
                out.set(i, j, f(self.get(i, j), other.get(i, j)));
            }
        }
        out
    }

    /// Visit stored entries in row-major order.
    pub fn for_each_entry(&self, mut f: impl FnMut(usize, usize, f64)) {
        for i in 0..self.n {
            let j0 = i.saturating_sub(self.kl);
            let j1 = (i + self.ku + 1).min(self.n);
            for j in j0..j1 {
                f(i, j, self.get(i, j));
            }
        }
    }
}
