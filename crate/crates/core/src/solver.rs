//! The Picard, MN and NMN fixed-point iterations with shared stopping logic,
//! one-time factorization, and full reporting.
//!
//! Per step the methods solve, with x' the next iterate:
//!
//! * Picard:  `A x' = B|x| + b`
//! * MN:      `(Omega + A) x' = Omega x + B|x| + b`
//! * NMN:     `(Omega + A) x' = (Omega - A) x + 2 (B|x| + b)`
//!
//! MN with `Omega = 0` reproduces Picard; NMN with `omega I` reproduces MN
//! with `Omega = (omega I - A) / 2`.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{extreme_eigenvalues_sym, factorize, Matrix};
use crate::problems::{norm2, GaveProblem, ResidualMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Picard,
    Mn,
    Nmn,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Picard => "picard",
            Method::Mn => "mn",
            Method::Nmn => "nmn",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "picard" => Ok(Method::Picard),
            "mn" => Ok(Method::Mn),
            "nmn" => Ok(Method::Nmn),
            other => Err(Error::InvalidConfig(format!("unknown method `{other}`"))),
        }
    }
}

/// Shift operator: the scalar form stands for `omega I`; the matrix form is
/// accepted so algebraic identities between the methods can be exercised.
#[derive(Debug, Clone)]
pub enum Omega {
    Scalar(f64),
    Matrix(Matrix),
}

impl Omega {
    pub fn scalar(&self) -> Option<f64> {
        match self {
            Omega::Scalar(w) => Some(*w),
            Omega::Matrix(_) => None,
        }
    }
}

impl From<f64> for Omega {
    fn from(w: f64) -> Self {
        Omega::Scalar(w)
    }
}

#[derive(Debug, Clone)]
pub enum X0Policy {
    /// The alternating vector (1, 0, 1, 0, ...).
    Alternating,
    Zeros,
    Custom(Vec<f64>),
}

/// Largest dimension at which the optional positive-semidefiniteness check
/// of a matrix shift is carried out.
const OMEGA_VALIDATION_MAX_N: usize = 500;

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub method: Method,
    pub omega: Option<Omega>,
    /// Relative residual threshold.
    pub tol: f64,
    /// Iteration cap.
    pub k_max: usize,
    pub x0: X0Policy,
    pub residual_mode: ResidualMode,
    /// Keep every iterate in the report (tests of contraction properties).
    pub record_iterates: bool,
    /// Verify positive semidefiniteness of a matrix shift before solving.
    pub validate_omega: bool,
}

impl SolverConfig {
    pub fn new(method: Method) -> Self {
        SolverConfig {
            method,
            omega: None,
            tol: 1e-7,
            k_max: 5000,
            x0: X0Policy::Alternating,
            residual_mode: ResidualMode::Gave,
            record_iterates: false,
            validate_omega: false,
        }
    }

    pub fn picard() -> Self {
        Self::new(Method::Picard)
    }

    pub fn mn(omega: impl Into<Omega>) -> Self {
        Self::new(Method::Mn).with_omega(omega)
    }

    pub fn nmn(omega: impl Into<Omega>) -> Self {
        Self::new(Method::Nmn).with_omega(omega)
    }

    pub fn with_omega(mut self, omega: impl Into<Omega>) -> Self {
        self.omega = Some(omega.into());
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_k_max(mut self, k_max: usize) -> Self {
        self.k_max = k_max;
        self
    }

    pub fn with_x0(mut self, x0: X0Policy) -> Self {
        self.x0 = x0;
        self
    }

    pub fn with_residual_mode(mut self, mode: ResidualMode) -> Self {
        self.residual_mode = mode;
        self
    }

    pub fn recording_iterates(mut self) -> Self {
        self.record_iterates = true;
        self
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub method: Method,
    /// Scalar shift when one was used.
    pub omega: Option<f64>,
    pub converged: bool,
    /// Number of linear solves performed.
    pub iterations: usize,
    pub final_residual: f64,
    /// `residual_history[k]` is the relative residual of iterate k;
    /// length is `iterations + 1`.
    pub residual_history: Vec<f64>,
    /// Seconds spent in the iteration loop.
    pub wall_time_loop: f64,
    /// Seconds including the factorization.
    pub wall_time_total: f64,
    pub x: Vec<f64>,
    pub iterates: Option<Vec<Vec<f64>>>,
}

/// The JSON document a report serializes to.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportJson {
    pub method: String,
    pub omega: Option<f64>,
    pub n: usize,
    pub mu: Option<f64>,
    pub example: Option<u8>,
    pub iterations: usize,
    pub converged: bool,
    pub final_residual: f64,
    pub wall_time_loop: f64,
    pub wall_time_total: f64,
}

impl SolveReport {
    pub fn to_json(&self, example: Option<u8>, mu: Option<f64>) -> ReportJson {
        ReportJson {
            method: self.method.to_string(),
            omega: self.omega,
            n: self.x.len(),
            mu,
            example,
            iterations: self.iterations,
            converged: self.converged,
            final_residual: self.final_residual,
            wall_time_loop: self.wall_time_loop,
            wall_time_total: self.wall_time_total,
        }
    }
}

/// The alternating initial guess (1, 0, 1, 0, ...): component i (1-based)
/// is 1 for odd i, 0 for even i.
pub fn default_x0(n: usize) -> Vec<f64> {
    (0..n).map(|i| if i % 2 == 0 { 1.0 } else { 0.0 }).collect()
}

pub fn solve_picard(p: &GaveProblem, cfg: &SolverConfig) -> Result<SolveReport> {
    solve(p, &SolverConfig {
        method: Method::Picard,
        ..cfg.clone()
    })
}

pub fn solve_mn(p: &GaveProblem, cfg: &SolverConfig) -> Result<SolveReport> {
    solve(p, &SolverConfig {
        method: Method::Mn,
        ..cfg.clone()
    })
}

pub fn solve_nmn(p: &GaveProblem, cfg: &SolverConfig) -> Result<SolveReport> {
    solve(p, &SolverConfig {
        method: Method::Nmn,
        ..cfg.clone()
    })
}

fn validate_omega(p: &GaveProblem, cfg: &SolverConfig) -> Result<()> {
    match (cfg.method, &cfg.omega) {
        (Method::Picard, _) => Ok(()),
        (_, None) => Err(Error::InvalidConfig(format!(
            "method `{}` needs a shift omega",
            cfg.method
        ))),
        (Method::Mn, Some(Omega::Scalar(w))) if *w < 0.0 => Err(Error::InvalidConfig(
            format!("mn needs omega >= 0, got {w}"),
        )),
        (Method::Nmn, Some(Omega::Scalar(w))) if *w <= 0.0 => Err(Error::InvalidConfig(
            format!("nmn needs omega > 0, got {w}"),
        )),
        (_, Some(Omega::Scalar(_))) => Ok(()),
        (_, Some(Omega::Matrix(om))) => {
            if om.n() != p.n() {
                return Err(Error::DimensionMismatch(format!(
                    "omega is {0}x{0}, problem is {1}x{1}",
                    om.n(),
                    p.n()
                )));
            }
            if cfg.validate_omega && om.n() <= OMEGA_VALIDATION_MAX_N {
                // eigenvalue check on the symmetric part
                let sym = om.add(&transpose(om))?.scale(0.5);
                let (mu_min, _) = extreme_eigenvalues_sym(&sym)?;
                let scale = om.max_abs().max(1.0);
                if mu_min < -1e-10 * scale {
                    return Err(Error::InvalidConfig(format!(
                        "omega is not positive semidefinite (symmetric part has eigenvalue {mu_min})"
                    )));
                }
            }
            Ok(())
        }
    }
}

fn transpose(m: &Matrix) -> Matrix {
    let (kl, ku) = m.bandwidths();
    let mut out = Matrix::zeros_banded(m.n(), ku, kl);
    m.for_each_entry(|i, j, v| {
        if v != 0.0 {
            out.set(j, i, v);
        }
    });
    out
}

/// Run the configured iteration. The coefficient matrix is factorized once
/// and reused every step; the loop stops as soon as the relative residual
/// drops to `tol`, the cap `k_max` is reached, or an iterate stops being
/// finite.
pub fn solve(p: &GaveProblem, cfg: &SolverConfig) -> Result<SolveReport> {
    let n = p.n();
    if cfg.tol <= 0.0 {
        return Err(Error::InvalidConfig(format!("tol must be > 0, got {}", cfg.tol)));
    }
    if cfg.k_max < 1 {
        return Err(Error::InvalidConfig("k_max must be >= 1".into()));
    }
    validate_omega(p, cfg)?;

    let norm_rhs = norm2(&p.rhs);
    if norm_rhs == 0.0 {
        return Err(Error::ZeroRhs);
    }

    let t_total = Instant::now();
    let target = match (cfg.method, &cfg.omega) {
        (Method::Picard, _) => p.a.clone(),
        (_, Some(Omega::Scalar(w))) => p.a.shifted(*w),
        (_, Some(Omega::Matrix(om))) => om.add(&p.a)?,
        (_, None) => unreachable!("validated above"),
    };
    let factor = factorize(&target, target.symmetric_hint())?;

    let mut x = match &cfg.x0 {
        X0Policy::Alternating => default_x0(n),
        X0Policy::Zeros => vec![0.0; n],
        X0Policy::Custom(v) => {
            if v.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "x0 has length {}, problem is {1}x{1}",
                    v.len(),
                    n
                )));
            }
            v.clone()
        }
    };

    let mut ax = vec![0.0; n];
    let mut absx = vec![0.0; n];
    let mut bx = vec![0.0; n];
    let mut omega_x = vec![0.0; n];
    let mut rhs_k = vec![0.0; n];

    let mut history = Vec::new();
    let mut iterates = cfg.record_iterates.then(Vec::new);
    let mut converged = false;
    let mut k = 0usize;

    let t_loop = Instant::now();
    loop {
        p.a.matvec_into(&x, &mut ax);
        for (s, v) in absx.iter_mut().zip(&x) {
            *s = v.abs();
        }
        p.b.matvec_into(&absx, &mut bx);

        let res = match cfg.residual_mode {
            ResidualMode::Gave => {
                let mut s = 0.0;
                for i in 0..n {
                    let r = ax[i] - bx[i] - p.rhs[i];
                    s += r * r;
                }
                s.sqrt() / norm_rhs
            }
            ResidualMode::PaperLiteral => {
                let mut s = 0.0;
                for i in 0..n {
                    let r = ax[i] - absx[i] - p.rhs[i];
                    s += r * r;
                }
                s.sqrt() / norm_rhs
            }
        };
        if !res.is_finite() {
            return Err(Error::NonFinite { iteration: k });
        }
        history.push(res);
        if let Some(list) = iterates.as_mut() {
            list.push(x.clone());
        }
        if res <= cfg.tol {
            converged = true;
            break;
        }
        if k >= cfg.k_max {
            break;
        }

        match (cfg.method, &cfg.omega) {
            (Method::Picard, _) => {
                for i in 0..n {
                    rhs_k[i] = bx[i] + p.rhs[i];
                }
            }
            (Method::Mn, Some(om)) => {
                apply_omega(om, &x, &mut omega_x);
                for i in 0..n {
                    rhs_k[i] = omega_x[i] + bx[i] + p.rhs[i];
                }
            }
            (Method::Nmn, Some(om)) => {
                apply_omega(om, &x, &mut omega_x);
                for i in 0..n {
                    rhs_k[i] = omega_x[i] - ax[i] + 2.0 * (bx[i] + p.rhs[i]);
                }
            }
            _ => unreachable!(),
        }
        factor.solve_into(&mut rhs_k);
        std::mem::swap(&mut x, &mut rhs_k);
        k += 1;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { iteration: k });
        }
    }
    let wall_time_loop = t_loop.elapsed().as_secs_f64();
    let wall_time_total = t_total.elapsed().as_secs_f64();

    Ok(SolveReport {
        method: cfg.method,
        omega: match (cfg.method, &cfg.omega) {
            (Method::Picard, _) => None,
            (_, Some(om)) => om.scalar(),
            _ => None,
        },
        converged,
        iterations: k,
        final_residual: *history.last().expect("at least the initial residual"),
        residual_history: history,
        wall_time_loop,
        wall_time_total,
        x,
        iterates,
    })
}

fn apply_omega(omega: &Omega, x: &[f64], out: &mut [f64]) {
    match omega {
        Omega::Scalar(w) => {
            for (o, v) in out.iter_mut().zip(x) {
                *o = w * v;
            }
        }
        Omega::Matrix(m) => m.matvec_into(x, out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_x0_pattern() {
        assert_eq!(default_x0(4), vec![1.0, 0.0, 1.0, 0.0]);
        assert_eq!(default_x0(1), vec![1.0]);
        assert_eq!(default_x0(5), vec![1.0, 0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn picard_linear_system_one_step() {
        // B = 0 turns the equation into A x = b
        let p = GaveProblem::new(
            Matrix::diagonal(&[2.0, 4.0]),
            Matrix::zeros_banded(2, 0, 0),
            vec![2.0, 8.0],
        )
        .unwrap();
        let r = solve_picard(&p, &SolverConfig::picard()).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 1);
        assert!((r.x[0] - 1.0).abs() < 1e-14 && (r.x[1] - 2.0).abs() < 1e-14);
        assert_eq!(r.residual_history.len(), 2);
    }

    #[test]
    fn picard_scalar_fixed_point() {
        let p = GaveProblem::new(
            Matrix::diagonal(&[3.0]),
            Matrix::diagonal(&[1.0]),
            vec![-2.4],
        )
        .unwrap();
        let cfg = SolverConfig::picard().with_tol(1e-12);
        let r = solve_picard(&p, &cfg).unwrap();
        assert!(r.converged);
        assert!((r.x[0] + 0.6).abs() < 1e-11, "x = {}", r.x[0]);
    }

    #[test]
    fn mn_trivial_single_step() {
        let p = GaveProblem::new(
            Matrix::diagonal(&[2.0, 4.0]),
            Matrix::zeros_banded(2, 0, 0),
            vec![2.0, 8.0],
        )
        .unwrap();
        let r = solve_mn(&p, &SolverConfig::mn(0.0)).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 1);
    }

    #[test]
    fn nmn_requires_positive_scalar_shift() {
        let p = GaveProblem::new(
            Matrix::diagonal(&[3.0]),
            Matrix::diagonal(&[1.0]),
            vec![-2.4],
        )
        .unwrap();
        assert!(solve_nmn(&p, &SolverConfig::nmn(0.0)).is_err());
        assert!(solve_nmn(&p, &SolverConfig::nmn(1.0)).is_ok());
        assert!(solve_mn(&p, &SolverConfig::mn(-0.5)).is_err());
    }

    #[test]
    fn divergence_reports_non_finite() {
        // x' = 3|x| + 1 grows without bound from x0 = 1
        let p = GaveProblem::new(
            Matrix::diagonal(&[1.0]),
            Matrix::diagonal(&[3.0]),
            vec![1.0],
        )
        .unwrap();
        let cfg = SolverConfig::picard().with_k_max(5000);
        match solve_picard(&p, &cfg) {
            Err(Error::NonFinite { .. }) => {}
            other => panic!("expected NonFinite, got {other:?}"),
        }
    }

    #[test]
    fn singular_matrix_detected() {
        let p = GaveProblem::new(
            Matrix::zeros_banded(2, 0, 0),
            Matrix::identity(2),
            vec![1.0, 1.0],
        )
        .unwrap();
        assert!(matches!(
            solve_picard(&p, &SolverConfig::picard()),
            Err(Error::SingularMatrix)
        ));
    }

    #[test]
    fn already_converged_at_start() {
        // x0 policy Custom with the exact solution: zero solves performed
        let p = GaveProblem::new(
            Matrix::diagonal(&[3.0]),
            Matrix::diagonal(&[1.0]),
            vec![-2.4],
        )
        .unwrap();
        let cfg = SolverConfig::picard().with_x0(X0Policy::Custom(vec![-0.6]));
        let r = solve_picard(&p, &cfg).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 0);
        assert_eq!(r.residual_history.len(), 1);
    }

    #[test]
    fn history_matches_report() {
        let p = GaveProblem::new(
            Matrix::diagonal(&[3.0, 5.0]),
            Matrix::diagonal(&[1.0, 1.0]),
            vec![-2.4, 3.0],
        )
        .unwrap();
        let r = solve_nmn(&p, &SolverConfig::nmn(2.0)).unwrap();
        assert!(r.converged);
        assert_eq!(r.residual_history.len(), r.iterations + 1);
        assert_eq!(*r.residual_history.last().unwrap(), r.final_residual);
        assert!(r.final_residual <= 1e-7);
        assert!(r.residual_history.iter().all(|v| v.is_finite()));
    }
}
