//! Problem containers for `A x - B|x| = b`, the linear-complementarity
//! bridge, residual definitions, and the two lattice benchmark generators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Generalized absolute value equation `A x - B |x| = rhs`.
#[derive(Debug, Clone)]
pub struct GaveProblem {
    pub a: Matrix,
    pub b: Matrix,
    pub rhs: Vec<f64>,
}

impl GaveProblem {
    pub fn new(a: Matrix, b: Matrix, rhs: Vec<f64>) -> Result<Self> {
        let n = a.n();
        if b.n() != n || rhs.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "A is {n}x{n}, B is {0}x{0}, rhs has length {1}",
                b.n(),
                rhs.len()
            )));
        }
        if norm2(&rhs) == 0.0 {
            return Err(Error::ZeroRhs);
        }
        Ok(GaveProblem { a, b, rhs })
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }
}

/// Linear complementarity problem: find z >= 0 with w = M z + q >= 0 and
/// z^T w = 0.
#[derive(Debug, Clone)]
pub struct LcpProblem {
    pub m: Matrix,
    pub q: Vec<f64>,
}

impl LcpProblem {
    pub fn new(m: Matrix, q: Vec<f64>) -> Result<Self> {
        if q.len() != m.n() {
            return Err(Error::DimensionMismatch(format!(
                "M is {0}x{0}, q has length {1}",
                m.n(),
                q.len()
            )));
        }
        Ok(LcpProblem { m, q })
    }

    pub fn n(&self) -> usize {
        self.m.n()
    }
}

/// Which benchmark family and at what size: the grid dimension is `m`, the
/// matrix dimension `n = m^2`, and the diagonal shift is `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestProblemSpec {
    pub example_id: u8,
    pub m: usize,
    pub mu: f64,
}

impl TestProblemSpec {
    pub fn new(example_id: u8, m: usize, mu: f64) -> Result<Self> {
        if example_id != 1 && example_id != 2 {
            return Err(Error::InvalidConfig(format!(
                "example_id must be 1 or 2, got {example_id}"
            )));
        }
        if m < 2 {
            return Err(Error::InvalidConfig(format!("m must be >= 2, got {m}")));
        }
        Ok(TestProblemSpec { example_id, m, mu })
    }

    pub fn n(&self) -> usize {
        self.m * self.m
    }
}

/// A complementarity pair recovered from a GAVE iterate.
#[derive(Debug, Clone, Serialize)]
pub struct LcpSolution {
    pub z: Vec<f64>,
    pub w: Vec<f64>,
    pub complementarity_gap: f64,
}

impl LcpSolution {
    pub fn is_feasible(&self, tol: f64) -> bool {
        let min_z = self.z.iter().cloned().fold(f64::INFINITY, f64::min);
        let min_w = self.w.iter().cloned().fold(f64::INFINITY, f64::min);
        let scale = 1.0 + norm2(&self.z) * norm2(&self.w);
        min_z >= -tol && min_w >= -tol && self.complementarity_gap.abs() <= tol * scale
    }
}

/// How the relative residual treats the nonlinear term. `Gave` is consistent
/// with the equation being solved; `PaperLiteral` replaces `B|x|` by `|x|`
/// and is kept for table-reproduction experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResidualMode {
    #[default]
    Gave,
    PaperLiteral,
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Reformulate the LCP as a GAVE: A = M + I, B = M - I, rhs = q.
pub fn lcp_to_gave(p: &LcpProblem) -> Result<GaveProblem> {
    GaveProblem::new(p.m.shifted(1.0), p.m.shifted(-1.0), p.q.clone())
}

/// Recover the complementarity pair from a GAVE solution of an LCP-derived
/// problem: z = |x| - x, w = |x| + x. The gap is reported, not enforced.
pub fn gave_solution_to_lcp(x: &[f64]) -> LcpSolution {
    let z: Vec<f64> = x.iter().map(|&v| v.abs() - v).collect();
    let w: Vec<f64> = x.iter().map(|&v| v.abs() + v).collect();
    let complementarity_gap = z
        .iter()
        .zip(&w)
        .map(|(zi, wi)| zi * wi)
        .sum::<f64>()
        .abs();
    LcpSolution {
        z,
        w,
        complementarity_gap,
    }
}

/// Residual vector for the requested mode.
pub(crate) fn residual_vector(p: &GaveProblem, x: &[f64], mode: ResidualMode) -> Vec<f64> {
    let ax = p.a.matvec(x);
    let absx: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    match mode {
        ResidualMode::Gave => {
            let bx = p.b.matvec(&absx);
            ax.iter()
                .zip(&bx)
                .zip(&p.rhs)
                .map(|((a, b), r)| a - b - r)
                .collect()
        }
        ResidualMode::PaperLiteral => ax
            .iter()
            .zip(&absx)
            .zip(&p.rhs)
            .map(|((a, s), r)| a - s - r)
            .collect(),
    }
}

/// Relative residual `||A x - B|x| - rhs|| / ||rhs||` (or the literal
/// variant with `|x|` in place of `B|x|`).
pub fn gave_residual(p: &GaveProblem, x: &[f64], mode: ResidualMode) -> Result<f64> {
    if x.len() != p.n() {
        return Err(Error::DimensionMismatch(format!(
            "residual: expected length {}, got {}",
            p.n(),
            x.len()
        )));
    }
    let nb = norm2(&p.rhs);
    if nb == 0.0 {
        return Err(Error::ZeroRhs);
    }
    Ok(norm2(&residual_vector(p, x, mode)) / nb)
}

/// (feasibility violation, complementarity gap) of `z` for the LCP.
pub fn lcp_residual(p: &LcpProblem, z: &[f64]) -> Result<(f64, f64)> {
    if z.len() != p.n() {
        return Err(Error::DimensionMismatch(format!(
            "lcp residual: expected length {}, got {}",
            p.n(),
            z.len()
        )));
    }
    let mut w = p.m.matvec(z);
    for (wi, qi) in w.iter_mut().zip(&p.q) {
        *wi += qi;
    }
    let min_z = z.iter().cloned().fold(f64::INFINITY, f64::min);
    let min_w = w.iter().cloned().fold(f64::INFINITY, f64::min);
    let feasibility = 0.0f64.max(-min_z).max(-min_w);
    let gap = z.iter().zip(&w).map(|(zi, wi)| zi * wi).sum::<f64>().abs();
    Ok((feasibility, gap))
}

/// Build a benchmark instance. `M` is the block-tridiagonal lattice matrix
/// plus `mu I` in banded storage (bandwidth `m`); `q = -M z*` with
/// `z* = 1.2 (1, ..., 1)^T`. Family 1 is symmetric; family 2 is not.
pub fn gen_example(spec: &TestProblemSpec) -> (LcpProblem, Vec<f64>) {
    let m = spec.m;
    let n = spec.n();
    // inner tridiagonal block (within a grid line) and block coupling values
    let (block_lower, block_upper, inner_lower, inner_upper) = match spec.example_id {
        1 => (-1.0, -1.0, -1.0, -1.0),
        _ => (-1.5, -0.5, -1.5, -0.5),
    };

    let mut mat = Matrix::zeros_banded(n, m, m);
    for blk in 0..m {
        for t in 0..m {
            let r = blk * m + t;
            mat.set(r, r, 4.0 + spec.mu);
            if t + 1 < m {
                mat.set(r, r + 1, inner_upper);
                mat.set(r + 1, r, inner_lower);
            }
            if blk + 1 < m {
                mat.set(r, r + m, block_upper);
                mat.set(r + m, r, block_lower);
            }
        }
    }
    mat.set_symmetric_hint(spec.example_id == 1);

    let z_star = vec![1.2; n];
    let q: Vec<f64> = mat.matvec(&z_star).iter().map(|v| -v).collect();
    (
        LcpProblem { m: mat, q },
        z_star,
    )
}
