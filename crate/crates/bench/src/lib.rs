//! Benchmark fixtures shared by the criterion targets.

use gave_core::{gen_example, lcp_to_gave, GaveProblem, TestProblemSpec};

/// The family-1 instance at grid dimension `m` with shift `mu`.
pub fn lattice_problem(m: usize, mu: f64) -> GaveProblem {
    let spec = TestProblemSpec::new(1, m, mu).expect("valid spec");
    let (lcp, _) = gen_example(&spec);
    lcp_to_gave(&lcp).expect("generated problems are well formed")
}
