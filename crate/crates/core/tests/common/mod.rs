//! Shared test support: dense oracles (independent of the banded/power
//! iteration implementation paths) and seeded instance generators.

#![allow(dead_code)]

use gave_core::{cert_thm1, cert_thm3_spd, GaveProblem, Matrix, Omega};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn to_dmatrix(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.n(), m.n(), &m.to_dense_row_major())
}

/// Dense SVD oracle for the spectral norm.
pub fn dense_two_norm(m: &DMatrix<f64>) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

/// Dense SVD oracle for the spectral norm of the inverse: 1 / sigma_min.
pub fn dense_inverse_two_norm(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    1.0 / sv.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Dense eigendecomposition oracle for symmetric matrices.
pub fn dense_sym_extremes(m: &DMatrix<f64>) -> (f64, f64) {
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    let lo = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Dense LU oracle.
pub fn dense_solve(a: &DMatrix<f64>, b: &[f64]) -> Option<Vec<f64>> {
    let rhs = DVector::from_column_slice(b);
    a.clone().lu().solve(&rhs).map(|x| x.as_slice().to_vec())
}

pub fn dense_inverse(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    a.clone().try_inverse()
}

pub fn relative_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Random dense matrix (stored full-band) with entries uniform in
/// [-scale, scale].
pub fn random_dense(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Matrix {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(-scale..scale)).collect())
        .collect();
    Matrix::from_dense_rows(&rows).unwrap()
}

/// Random banded matrix with the given bandwidths.
pub fn random_banded(rng: &mut ChaCha8Rng, n: usize, kl: usize, ku: usize, scale: f64) -> Matrix {
    let mut m = Matrix::zeros_banded(n, kl, ku);
    for i in 0..n {
        for j in i.saturating_sub(kl)..(i + ku + 1).min(n) {
            m.set(i, j, rng.gen_range(-scale..scale));
        }
    }
    m
}

/// Scale a matrix so its spectral norm (dense oracle) equals `target`.
pub fn scaled_to_norm(m: &Matrix, target: f64) -> Matrix {
    let norm = dense_two_norm(&to_dmatrix(m));
    if norm == 0.0 {
        m.clone()
    } else {
        m.scale(target / norm)
    }
}

/// Instance family on which the general certificate provably holds:
/// A = omega I + R and B with ||R|| + ||B|| well below omega. Returns the
/// problem and the scalar shift; panics if the certificate unexpectedly
/// fails (the margins make that impossible up to estimator noise).
pub fn thm1_instance(rng: &mut ChaCha8Rng, n: usize) -> (GaveProblem, f64) {
    let omega = rng.gen_range(1.0..4.0);
    let r = scaled_to_norm(&random_dense(rng, n, 1.0), 0.2 * omega);
    let a = r.shifted(omega);
    let b = scaled_to_norm(&random_dense(rng, n, 1.0), rng.gen_range(0.05..0.2) * omega);
    let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
    let p = GaveProblem::new(a, b, rhs).unwrap();
    let cert = cert_thm1(&p, &Omega::Scalar(omega)).unwrap();
    assert!(
        cert.holds,
        "constructed thm1 instance must certify (lhs={}, rhs={})",
        cert.lhs, cert.rhs
    );
    (p, omega)
}

/// Random orthogonal matrix from the QR factorization of a random square.
fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let raw = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    raw.qr().q()
}

/// Instance family on which the symmetric-positive-definite certificate
/// provably holds: A with known spectrum, tau < mu_min, omega above the
/// threshold.
pub fn thm3_instance(rng: &mut ChaCha8Rng, n: usize) -> (GaveProblem, f64) {
    let mu_min = rng.gen_range(1.0..2.0);
    let mu_max = mu_min + rng.gen_range(0.5..3.0);
    let mut eigs = vec![mu_min, mu_max];
    for _ in 2..n {
        eigs.push(rng.gen_range(mu_min..mu_max));
    }
    let q = random_orthogonal(rng, n);
    let d = DMatrix::from_diagonal(&DVector::from_vec(eigs));
    let raw = &q * d * q.transpose();
    // exact entrywise symmetrization
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| 0.5 * (raw[(i, j)] + raw[(j, i)])).collect())
        .collect();
    let a = Matrix::from_dense_rows(&rows).unwrap();
    assert!(a.symmetric_hint());

    let tau = rng.gen_range(0.1..0.8) * mu_min;
    let b = scaled_to_norm(&random_dense(rng, n, 1.0), tau);
    let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
    let p = GaveProblem::new(a, b, rhs).unwrap();

    let threshold = 0.5 * (mu_max - mu_min) + tau;
    let omega = threshold * (1.0 + rng.gen_range(0.1..0.6)) + 0.05;
    let cert = cert_thm3_spd(&p, omega).unwrap();
    assert!(
        cert.holds,
        "constructed thm3 instance must certify (threshold={}, omega={})",
        cert.lhs, cert.rhs
    );
    (p, omega)
}

/// Enumerate all sign patterns s, solve (A - B diag(s)) x = b densely and
/// keep solutions whose signs are consistent with s. Independent of the
/// iterative solver path.
pub fn brute_force_solutions(p: &GaveProblem) -> Vec<Vec<f64>> {
    let n = p.n();
    assert!(n <= 16, "enumeration oracle is exponential");
    let a = to_dmatrix(&p.a);
    let b = to_dmatrix(&p.b);
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let signs: Vec<f64> = (0..n)
            .map(|i| if mask & (1 << i) != 0 { 1.0 } else { -1.0 })
            .collect();
        let mut coeff = a.clone();
        for j in 0..n {
            for i in 0..n {
                coeff[(i, j)] -= b[(i, j)] * signs[j];
            }
        }
        if let Some(x) = dense_solve(&coeff, &p.rhs) {
            let consistent = x
                .iter()
                .zip(&signs)
                .all(|(&xi, &si)| si * xi >= -1e-10);
            if consistent {
                out.push(x);
            }
        }
    }
    out
}
