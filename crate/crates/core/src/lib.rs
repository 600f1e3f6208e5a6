//! Solvers and convergence certificates for generalized absolute value
//! equations
//!
//! ```text
//!     A x - B |x| = b,      A, B square real, |x| componentwise
//! ```
//!
//! together with the linear-complementarity bridge `(M+I)x - (M-I)|x| = q`
//! and a benchmark harness for the two classic lattice problem families.
//!
//! The crate is organized around five pieces:
//!
//! * [`matrix`] — banded/sparse storage, band LU and Cholesky, power-iteration
//!   spectral estimates, matrix-class predicates, Matrix Market I/O.
//! * [`problems`] — problem containers, residuals, the LCP bridge and the
//!   benchmark generators.
//! * [`solver`] — the Picard, MN and NMN fixed-point iterations.
//! * [`cert`] — certificate checkers for the sufficient convergence
//!   conditions (general, perturbation, SPD and H+-matrix cases).
//! * [`benchmark`] — shift-parameter sweeps, table runs, table emission and
//!   the published reference parameters.

pub mod benchmark;
pub mod cert;
pub mod error;
pub mod matrix;
pub mod problems;
pub mod solver;

pub use benchmark::{
    emit_table, reference_for, run_benchmark, sweep_omega, BenchRequest, BenchRow, BenchTable,
    OmegaChoice, SweepGrid, SweepRecord, SweepResult, TableFormat, REFERENCE_RESULTS,
};
pub use cert::{
    cert_thm1, cert_thm2, cert_thm3_spd, cert_thm4_hplus, Certificate, TheoremId,
};
pub use error::{Error, Result};
pub use matrix::{
    extreme_eigenvalues_sym, factorize, inverse_two_norm_estimate, read_matrix_market,
    read_vector, two_norm_estimate, write_matrix_market, write_vector, FactorizedOperator,
    Matrix, SpectralEstimate,
};
pub use problems::{
    gave_residual, gave_solution_to_lcp, gen_example, lcp_residual, lcp_to_gave, GaveProblem,
    LcpProblem, LcpSolution, ResidualMode, TestProblemSpec,
};
pub use solver::{
    default_x0, solve, solve_mn, solve_nmn, solve_picard, Method, Omega, ReportJson,
    SolveReport, SolverConfig, X0Policy,
};
