//! Regression check for the remaining published table (example 1 at
//! mu = -1) at the smallest benchmark size, plus a determinism check of the
//! whole benchmark path.

use gave_core::{
    emit_table, gen_example, lcp_to_gave, run_benchmark, solve, BenchRequest, Method,
    OmegaChoice, SolverConfig, TableFormat, TestProblemSpec,
};

#[test]
fn table2_smallest_size_reproduces() {
    let spec = TestProblemSpec::new(1, 60, -1.0).unwrap();
    let (lcp, _) = gen_example(&spec);
    let gave = lcp_to_gave(&lcp).unwrap();
    for (method, omega, it_ref) in [(Method::Mn, 1.2, 45i64), (Method::Nmn, 5.8, 33)] {
        let r = solve(&gave, &SolverConfig::new(method).with_omega(omega)).unwrap();
        assert!(r.converged);
        assert!(
            (r.iterations as i64 - it_ref).abs() <= 3,
            "{method}: IT {} vs reference {it_ref}",
            r.iterations
        );
    }
}

#[test]
fn benchmark_csv_deterministic_except_cpu() {
    let requests: Vec<BenchRequest> = [Method::Mn, Method::Nmn]
        .into_iter()
        .map(|method| BenchRequest {
            spec: TestProblemSpec::new(1, 10, 4.0).unwrap(),
            method,
            omega: OmegaChoice::Fixed(5.0),
        })
        .collect();
    let base = SolverConfig::new(Method::Mn);

    let strip_cpu = |csv: &str| -> Vec<String> {
        csv.lines()
            .map(|line| {
                let mut cols: Vec<&str> = line.split(',').collect();
                if cols.len() > 6 {
                    cols[6] = "CPU";
                }
                cols.join(",")
            })
            .collect()
    };

    let a = emit_table(&run_benchmark(&requests, &base), TableFormat::Csv);
    let b = emit_table(&run_benchmark(&requests, &base), TableFormat::Csv);
    assert_eq!(strip_cpu(&a), strip_cpu(&b));

    let md = emit_table(&run_benchmark(&requests, &base), TableFormat::Markdown);
    assert!(md.contains("omega_exp"));
    assert!(md.contains("n=100"));
}
