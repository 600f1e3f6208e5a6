//! Machine-checkable sufficient convergence conditions for the NMN
//! iteration, each returning the evaluated inequality as a certificate.
//!
//! The conditions are sufficient, never necessary: a failed certificate says
//! nothing about divergence (the indefinite benchmark instances converge
//! with every certificate failing), so certificates never gate the solvers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{
    extreme_eigenvalues_sym, factorize, inverse_two_norm_estimate, two_norm_estimate, Matrix,
};
use crate::problems::GaveProblem;
use crate::solver::Omega;

/// Strictness guard: `holds` requires `lhs < rhs * (1 - HOLD_GUARD)` so that
/// estimator noise (power iteration converges to 1e-10) cannot flip a
/// verdict sitting on the boundary.
pub const HOLD_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TheoremId {
    #[serde(rename = "thm1")]
    Thm1,
    #[serde(rename = "thm2")]
    Thm2,
    #[serde(rename = "thm3_spd")]
    Thm3Spd,
    #[serde(rename = "thm4_hplus")]
    Thm4HPlus,
}

/// Evaluated sufficient condition. `holds` is the guarded strict comparison
/// `lhs < rhs`; `contraction_bound`, when present, is the certified upper
/// bound on the per-step error contraction factor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Certificate {
    #[serde(rename = "theorem")]
    pub theorem: TheoremId,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub contraction_bound: Option<f64>,
    #[serde(rename = "preconditions")]
    pub preconditions: Vec<String>,
}

fn guarded(lhs: f64, rhs: f64) -> bool {
    lhs < rhs * (1.0 - HOLD_GUARD)
}

fn shift_by_omega(a: &Matrix, omega: &Omega) -> Result<Matrix> {
    match omega {
        Omega::Scalar(w) => Ok(a.shifted(*w)),
        Omega::Matrix(m) => a.add(m),
    }
}

fn sub_omega(a: &Matrix, omega: &Omega) -> Result<Matrix> {
    match omega {
        Omega::Scalar(w) => Ok(a.shifted(-*w)),
        Omega::Matrix(m) => a.sub(m),
    }
}

/// General condition: `||(Omega+A)^{-1}|| < 1 / (||A-Omega|| + 2||B||)`.
pub fn cert_thm1(p: &GaveProblem, omega: &Omega) -> Result<Certificate> {
    let shifted = shift_by_omega(&p.a, omega)?;
    let factor = factorize(&shifted, shifted.symmetric_hint())?;
    let lhs = inverse_two_norm_estimate(&factor).value;
    let norm_a_minus_omega = two_norm_estimate(&sub_omega(&p.a, omega)?).value;
    let norm_b = two_norm_estimate(&p.b).value;
    let denom = norm_a_minus_omega + 2.0 * norm_b;
    let rhs = if denom > 0.0 { 1.0 / denom } else { f64::INFINITY };
    Ok(Certificate {
        theorem: TheoremId::Thm1,
        lhs,
        rhs,
        holds: guarded(lhs, rhs),
        contraction_bound: Some(lhs * denom),
        preconditions: vec![format!(
            "omega + A factorized ({})",
            if factor.is_cholesky() { "cholesky" } else { "lu" }
        )],
    })
}

/// Perturbation condition:
/// `||A^{-1}|| < 1 / (||A-Omega|| + ||Omega|| + 2||B||)`. When it holds the
/// thm1 condition holds as well; the reported contraction bound is the thm1
/// product evaluated on `Omega + A`.
pub fn cert_thm2(p: &GaveProblem, omega: &Omega) -> Result<Certificate> {
    let factor = factorize(&p.a, p.a.symmetric_hint())?;
    let lhs = inverse_two_norm_estimate(&factor).value;
    let norm_a_minus_omega = two_norm_estimate(&sub_omega(&p.a, omega)?).value;
    let norm_omega = match omega {
        Omega::Scalar(w) => w.abs(),
        Omega::Matrix(m) => two_norm_estimate(m).value,
    };
    let norm_b = two_norm_estimate(&p.b).value;
    let denom = norm_a_minus_omega + norm_omega + 2.0 * norm_b;
    let rhs = if denom > 0.0 { 1.0 / denom } else { f64::INFINITY };

    let contraction_bound = shift_by_omega(&p.a, omega)
        .ok()
        .and_then(|shifted| factorize(&shifted, shifted.symmetric_hint()).ok())
        .map(|f| inverse_two_norm_estimate(&f).value * (norm_a_minus_omega + 2.0 * norm_b));

    Ok(Certificate {
        theorem: TheoremId::Thm2,
        lhs,
        rhs,
        holds: guarded(lhs, rhs),
        contraction_bound,
        preconditions: vec!["A factorized".into()],
    })
}

/// Piecewise contraction factor of the symmetric positive definite case,
/// split at `omega = (mu_max + mu_min) / 2`.
pub fn thm3_contraction_bound(mu_min: f64, mu_max: f64, tau: f64, omega: f64) -> f64 {
    if omega >= 0.5 * (mu_max + mu_min) {
        (omega - mu_min + 2.0 * tau) / (omega + mu_min)
    } else {
        (mu_max - omega + 2.0 * tau) / (omega + mu_min)
    }
}

/// Symmetric positive definite condition: with `tau = ||B||`, requires
/// `tau < mu_min` and `omega > (mu_max - mu_min)/2 + tau`. The certificate
/// reports the omega threshold as `lhs` and omega itself as `rhs`.
pub fn cert_thm3_spd(p: &GaveProblem, omega: f64) -> Result<Certificate> {
    if omega <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "thm3 needs omega > 0, got {omega}"
        )));
    }
    let (mu_min, mu_max) = extreme_eigenvalues_sym(&p.a)?;
    if mu_min <= 0.0 {
        return Err(Error::NotSpd { mu_min });
    }
    let tau = two_norm_estimate(&p.b).value;
    let tau_ok = guarded(tau, mu_min);
    let threshold = 0.5 * (mu_max - mu_min) + tau;
    let omega_ok = guarded(threshold, omega);
    Ok(Certificate {
        theorem: TheoremId::Thm3Spd,
        lhs: threshold,
        rhs: omega,
        holds: tau_ok && omega_ok,
        contraction_bound: Some(thm3_contraction_bound(mu_min, mu_max, tau, omega)),
        preconditions: vec![
            format!("A symmetric positive definite: mu_min={mu_min:.6e}, mu_max={mu_max:.6e}"),
            format!("tau={tau:.6e} < mu_min: {tau_ok}"),
        ],
    })
}

/// H+-matrix condition:
/// `||(<A> + omega I)^{-1}|| < 1 / ||omega I + |A| + 2|B|||`.
pub fn cert_thm4_hplus(p: &GaveProblem, omega: f64) -> Result<Certificate> {
    if omega <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "thm4 needs omega > 0, got {omega}"
        )));
    }
    if !p.a.is_h_plus_matrix() {
        return Err(Error::NotHPlus);
    }
    let comp_shifted = p.a.comparison_matrix().shifted(omega);
    let factor = factorize(&comp_shifted, comp_shifted.symmetric_hint())?;
    let lhs = inverse_two_norm_estimate(&factor).value;
    let bound_matrix = p
        .a
        .abs_matrix()
        .shifted(omega)
        .add(&p.b.abs_matrix().scale(2.0))?;
    let denom = two_norm_estimate(&bound_matrix).value;
    let rhs = if denom > 0.0 { 1.0 / denom } else { f64::INFINITY };
    Ok(Certificate {
        theorem: TheoremId::Thm4HPlus,
        lhs,
        rhs,
        holds: guarded(lhs, rhs),
        contraction_bound: Some(lhs * denom),
        preconditions: vec!["A is an H+-matrix".into()],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    fn diag_problem(a: f64, b: f64, n: usize) -> GaveProblem {
        GaveProblem::new(
            Matrix::identity(n).scale(a),
            Matrix::identity(n).scale(b),
            vec![1.0; n],
        )
        .unwrap()
    }

    #[test]
    fn thm1_diagonal_cases() {
        // A = 3I, B = I, Omega = 0: lhs = 1/3, rhs = 1/5 -> fails
        let p = diag_problem(3.0, 1.0, 2);
        let c = cert_thm1(&p, &Omega::Scalar(0.0)).unwrap();
        assert!((c.lhs - 1.0 / 3.0).abs() < 1e-9);
        assert!((c.rhs - 1.0 / 5.0).abs() < 1e-9);
        assert!(!c.holds);

        // A = 3I, Omega = 3I, B = I/4: ||A-Omega|| = 0, lhs = 1/6, rhs = 2
        let p = diag_problem(3.0, 0.25, 2);
        let c = cert_thm1(&p, &Omega::Scalar(3.0)).unwrap();
        assert!((c.lhs - 1.0 / 6.0).abs() < 1e-9);
        assert!((c.rhs - 2.0).abs() < 1e-8);
        assert!(c.holds);
        let bound = c.contraction_bound.unwrap();
        assert!(bound < 1.0 && (bound - c.lhs / c.rhs).abs() < 1e-9);
    }

    #[test]
    fn thm2_diagonal_case_fails() {
        // A = 10I, B = I, Omega = I: lhs = 0.1, rhs = 1/12
        let p = diag_problem(10.0, 1.0, 2);
        let c = cert_thm2(&p, &Omega::Scalar(1.0)).unwrap();
        assert!((c.lhs - 0.1).abs() < 1e-9);
        assert!((c.rhs - 1.0 / 12.0).abs() < 1e-9);
        assert!(!c.holds);
    }

    #[test]
    fn thm2_never_holds_on_scaled_identity_family() {
        // for A = Omega = aI, B = I the condition needs a > a + 2
        for a in [0.5, 1.0, 2.0, 5.0, 30.0, 1000.0] {
            let p = diag_problem(a, 1.0, 3);
            let c = cert_thm2(&p, &Omega::Scalar(a)).unwrap();
            assert!(!c.holds, "a = {a}");
        }
    }

    #[test]
    fn thm3_threshold_cases() {
        // mu_min = 2, mu_max = 4, tau = 1: omega must exceed 2
        let p = GaveProblem::new(
            Matrix::diagonal(&[2.0, 4.0]),
            Matrix::diagonal(&[1.0, -1.0]),
            vec![1.0, 1.0],
        )
        .unwrap();
        let c = cert_thm3_spd(&p, 2.5).unwrap();
        assert!((c.lhs - 2.0).abs() < 1e-8);
        assert!(c.holds);
        assert!(c.contraction_bound.unwrap() < 1.0);

        let c = cert_thm3_spd(&p, 1.5).unwrap();
        assert!(!c.holds);
    }

    #[test]
    fn thm3_tau_not_below_mu_min_never_holds() {
        // A = diag(1, 4), B = I: tau = 1 = mu_min
        let p = GaveProblem::new(
            Matrix::diagonal(&[1.0, 4.0]),
            Matrix::identity(2),
            vec![1.0, 1.0],
        )
        .unwrap();
        for omega in [0.5, 1.0, 2.5, 10.0, 100.0] {
            let c = cert_thm3_spd(&p, omega).unwrap();
            assert!(!c.holds, "omega = {omega}");
        }
    }

    #[test]
    fn thm3_rejects_indefinite() {
        let p = GaveProblem::new(
            Matrix::diagonal(&[-1.0, 4.0]),
            Matrix::identity(2),
            vec![1.0, 1.0],
        )
        .unwrap();
        assert!(matches!(cert_thm3_spd(&p, 1.0), Err(Error::NotSpd { .. })));
    }

    #[test]
    fn thm3_bound_below_one_whenever_conditions_hold() {
        // grid evaluation of the piecewise expression
        for mu_min in [0.5, 1.0, 2.0, 5.0] {
            for spread in [0.0, 0.5, 2.0, 10.0] {
                let mu_max = mu_min + spread;
                for tau_frac in [0.0, 0.25, 0.75, 0.99] {
                    let tau = tau_frac * mu_min;
                    let threshold = 0.5 * (mu_max - mu_min) + tau;
                    for bump in [1e-6, 0.1, 1.0, 10.0] {
                        let omega = threshold + bump;
                        let b = thm3_contraction_bound(mu_min, mu_max, tau, omega);
                        assert!(
                            b < 1.0,
                            "bound {b} at mu_min={mu_min} mu_max={mu_max} tau={tau} omega={omega}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn thm4_equality_case_fails() {
        // A = aI, B = 0: both sides equal 1/(a + omega); strictness fails
        let p = GaveProblem::new(
            Matrix::identity(2).scale(4.0),
            Matrix::zeros_banded(2, 0, 0),
            vec![1.0, 1.0],
        )
        .unwrap();
        let c = cert_thm4_hplus(&p, 1.0).unwrap();
        assert!((c.lhs - 0.2).abs() < 1e-9);
        assert!((c.rhs - 0.2).abs() < 1e-9);
        assert!(!c.holds);
    }

    #[test]
    fn thm4_diagonal_with_b() {
        // A = 4I, B = I/2, omega = 1: lhs = 1/5, rhs = 1/6
        let p = diag_problem(4.0, 0.5, 2);
        let c = cert_thm4_hplus(&p, 1.0).unwrap();
        assert!((c.lhs - 0.2).abs() < 1e-9);
        assert!((c.rhs - 1.0 / 6.0).abs() < 1e-9);
        assert!(!c.holds);
    }

    #[test]
    fn thm4_rejects_non_h_plus() {
        let p = GaveProblem::new(
            Matrix::diagonal(&[-1.0, 2.0]),
            Matrix::identity(2),
            vec![1.0, 1.0],
        )
        .unwrap();
        assert!(matches!(cert_thm4_hplus(&p, 1.0), Err(Error::NotHPlus)));
    }

    #[test]
    fn thm4_grid_search_over_diagonal_perturbations_finds_no_pass() {
        // the condition compares sigma_min(<A> + wI) against
        // ||wI + |A| + 2|B|||, and the right side always dominates: the
        // bound matrix is the entrywise absolute value of the left matrix
        // plus a nonnegative term
        for d in [0.0, 0.2, 0.7] {
            for eps in [0.0, 0.05, 0.3] {
                for omega in [0.1, 1.0, 5.0, 20.0] {
                    let a = Matrix::from_dense_rows(&[
                        vec![4.0 + d, -eps, 0.0],
                        vec![-2.0 * eps, 4.0 - d, eps],
                        vec![0.0, -eps, 4.0],
                    ])
                    .unwrap();
                    if !a.is_h_plus_matrix() {
                        continue;
                    }
                    let p = GaveProblem::new(a, Matrix::zeros_banded(3, 0, 0), vec![1.0; 3])
                        .unwrap();
                    let c = cert_thm4_hplus(&p, omega).unwrap();
                    assert!(!c.holds, "d={d} eps={eps} omega={omega}");
                }
            }
        }
    }

    #[test]
    fn corollary_specializations_with_identity_b() {
        // with B = I the general conditions specialize: tau = 1 and the
        // denominators gain the constant 2
        let a = Matrix::diagonal(&[3.0, 5.0]);
        let p = GaveProblem::new(a, Matrix::identity(2), vec![1.0, 1.0]).unwrap();

        let c1 = cert_thm1(&p, &Omega::Scalar(4.0)).unwrap();
        let norm_a_minus = 1.0; // ||A - 4I|| over diag(3,5)
        assert!((c1.rhs - 1.0 / (norm_a_minus + 2.0)).abs() < 1e-8);

        let c2 = cert_thm2(&p, &Omega::Scalar(4.0)).unwrap();
        assert!((c2.rhs - 1.0 / (norm_a_minus + 4.0 + 2.0)).abs() < 1e-8);

        let c3 = cert_thm3_spd(&p, 2.5).unwrap();
        assert!((c3.lhs - (1.0 + 1.0)).abs() < 1e-8); // (5-3)/2 + tau with tau = 1
        assert!(c3.holds); // 1 < 3 and 2.5 > 2

        let c4 = cert_thm4_hplus(&p, 1.0).unwrap();
        // lhs = 1/(3+1); rhs = 1/||wI + A + 2I|| = 1/8
        assert!((c4.lhs - 0.25).abs() < 1e-9);
        assert!((c4.rhs - 0.125).abs() < 1e-9);
    }
}
