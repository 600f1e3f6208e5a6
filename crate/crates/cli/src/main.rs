//! `gave` — generate, solve, sweep, certify and benchmark generalized
//! absolute value equations `A x - B|x| = b`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use gave_core::{
    cert_thm1, cert_thm2, cert_thm3_spd, cert_thm4_hplus, emit_table, gave_solution_to_lcp,
    gen_example, lcp_residual, lcp_to_gave, read_matrix_market, read_vector, run_benchmark,
    solve, sweep_omega, write_matrix_market, write_vector, BenchRequest, GaveProblem, LcpProblem,
    Matrix, Method, Omega, OmegaChoice, ResidualMode, SolverConfig, SweepGrid, TableFormat,
    TestProblemSpec, X0Policy,
};

#[derive(Parser)]
#[command(
    name = "gave",
    version,
    about = "Solvers and convergence certificates for generalized absolute value equations"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a benchmark instance and write it as Matrix Market plus
    /// plain-text vector files
    Gen(GenArgs),
    /// Run one solve and print the report as JSON
    Solve(SolveArgs),
    /// Sweep the shift parameter over a grid and report the experimental
    /// optimum
    Sweep(SweepArgs),
    /// Evaluate all applicable convergence certificates
    Certify(CertifyArgs),
    /// Reproduce benchmark tables over problem sizes and methods
    Bench(BenchArgs),
}

/// Where the problem comes from: a generated instance (`--example --m --mu`)
/// or Matrix Market imports (`--matrix`, optional `--matrix-b`, `--rhs`).
#[derive(Args, Clone)]
struct ProblemArgs {
    /// Benchmark family (1 or 2)
    #[arg(long)]
    example: Option<u8>,
    /// Grid dimension; the matrix dimension is m^2
    #[arg(long)]
    m: Option<usize>,
    /// Diagonal shift of the generated lattice matrix
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<f64>,
    /// Matrix Market file for A
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Matrix Market file for B (identity when omitted)
    #[arg(long = "matrix-b")]
    matrix_b: Option<PathBuf>,
    /// Plain-text vector file for the right-hand side
    #[arg(long)]
    rhs: Option<PathBuf>,
}

struct Problem {
    gave: GaveProblem,
    /// Present for generated problems.
    lcp: Option<LcpProblem>,
    spec: Option<TestProblemSpec>,
}

impl ProblemArgs {
    fn resolve(&self) -> anyhow::Result<Problem> {
        match (self.example, self.m, self.mu, &self.matrix, &self.rhs) {
            (Some(example), Some(m), Some(mu), None, None) => {
                let spec = TestProblemSpec::new(example, m, mu)?;
                let (lcp, _) = gen_example(&spec);
                let gave = lcp_to_gave(&lcp)?;
                Ok(Problem {
                    gave,
                    lcp: Some(lcp),
                    spec: Some(spec),
                })
            }
            (None, None, None, Some(matrix), Some(rhs)) => {
                let a = read_matrix_market(matrix)
                    .with_context(|| format!("reading {}", matrix.display()))?;
                let b = match &self.matrix_b {
                    Some(path) => read_matrix_market(path)
                        .with_context(|| format!("reading {}", path.display()))?,
                    None => Matrix::identity(a.n()),
                };
                let rhs_vec =
                    read_vector(rhs).with_context(|| format!("reading {}", rhs.display()))?;
                Ok(Problem {
                    gave: GaveProblem::new(a, b, rhs_vec)?,
                    lcp: None,
                    spec: None,
                })
            }
            _ => bail!(
                "specify either --example/--m/--mu for a generated problem \
                 or --matrix/--rhs for an imported one"
            ),
        }
    }
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// Iteration method
    #[arg(long, value_parser = parse_method)]
    method: Method,
    /// Scalar shift; required for mn and nmn
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<f64>,
    /// Relative residual threshold
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    /// Iteration cap
    #[arg(long, default_value_t = 5000)]
    kmax: usize,
    /// Residual form: `gave` for ||Ax - B|x| - b||/||b||, `paper` for the
    /// literal variant with |x| in place of B|x|
    #[arg(long, default_value = "gave", value_parser = parse_residual_mode)]
    residual: ResidualMode,
    /// Initial vector policy
    #[arg(long, default_value = "alternating", value_parser = parse_x0)]
    x0: X0Cli,
}

#[derive(Clone, Copy)]
enum X0Cli {
    Alternating,
    Zeros,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_residual_mode(s: &str) -> Result<ResidualMode, String> {
    match s.to_ascii_lowercase().as_str() {
        "gave" => Ok(ResidualMode::Gave),
        "paper" | "paper_literal" => Ok(ResidualMode::PaperLiteral),
        other => Err(format!("unknown residual mode `{other}`")),
    }
}

fn parse_x0(s: &str) -> Result<X0Cli, String> {
    match s.to_ascii_lowercase().as_str() {
        "alternating" => Ok(X0Cli::Alternating),
        "zeros" => Ok(X0Cli::Zeros),
        other => Err(format!("unknown x0 policy `{other}`")),
    }
}

fn parse_format(s: &str) -> Result<TableFormat, String> {
    s.parse().map_err(|e| format!("{e}"))
}

impl SolverArgs {
    fn config(&self) -> anyhow::Result<SolverConfig> {
        if matches!(self.method, Method::Mn | Method::Nmn) && self.omega.is_none() {
            bail!("--omega is required for method `{}`", self.method);
        }
        Ok(SolverConfig {
            method: self.method,
            omega: self.omega.map(Omega::Scalar),
            tol: self.tol,
            k_max: self.kmax,
            x0: match self.x0 {
                X0Cli::Alternating => X0Policy::Alternating,
                X0Cli::Zeros => X0Policy::Zeros,
            },
            residual_mode: self.residual,
            record_iterates: false,
            validate_omega: false,
        })
    }
}

#[derive(Args)]
struct GenArgs {
    /// Benchmark family (1 or 2)
    #[arg(long)]
    example: u8,
    /// Grid dimension; the matrix dimension is m^2
    #[arg(long)]
    m: usize,
    /// Diagonal shift
    #[arg(long, allow_hyphen_values = true)]
    mu: f64,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Also write the report JSON to this path
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Grid as MIN:STEP:MAX
    #[arg(long, default_value = "0.1:0.1:30")]
    sweep: SweepGrid,
    /// Output format for the per-point records (json or csv)
    #[arg(long, default_value = "json", value_parser = parse_format)]
    format: TableFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Scalar shift the certificates are evaluated at
    #[arg(long, allow_hyphen_values = true)]
    omega: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Benchmark family (1 or 2)
    #[arg(long)]
    example: u8,
    /// Diagonal shift
    #[arg(long, allow_hyphen_values = true)]
    mu: f64,
    /// Comma-separated grid dimensions
    #[arg(long, default_value = "60,70,80,90,100", value_delimiter = ',')]
    sizes: Vec<usize>,
    /// Comma-separated methods
    #[arg(long, default_value = "mn,nmn", value_delimiter = ',', value_parser = parse_method)]
    methods: Vec<Method>,
    /// Where the shift comes from: `reference` for the published values,
    /// `sweep` to search the grid
    #[arg(long, default_value = "reference")]
    omega_source: String,
    /// Fixed shift overriding the source for every row
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<f64>,
    /// Sweep grid when --omega-source sweep
    #[arg(long, default_value = "0.1:0.1:30")]
    sweep: SweepGrid,
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[arg(long, default_value_t = 5000)]
    kmax: usize,
    #[arg(long, default_value = "gave", value_parser = parse_residual_mode)]
    residual: ResidualMode,
    #[arg(long, default_value = "markdown", value_parser = parse_format)]
    format: TableFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn write_or_print(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    if out.is_some() {
        println!("{text}");
    }
    Ok(())
}

fn cmd_gen(args: &GenArgs) -> anyhow::Result<ExitCode> {
    let spec = TestProblemSpec::new(args.example, args.m, args.mu)?;
    let (lcp, _) = gen_example(&spec);
    let gave = lcp_to_gave(&lcp)?;
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let file = |name: &str| args.out.join(name);
    write_matrix_market(&lcp.m, file("M.mtx"))?;
    write_vector(&lcp.q, file("q.txt"))?;
    write_matrix_market(&gave.a, file("A.mtx"))?;
    write_matrix_market(&gave.b, file("B.mtx"))?;
    write_vector(&gave.rhs, file("b.txt"))?;
    println!(
        "{}",
        serde_json::json!({
            "example": spec.example_id,
            "m": spec.m,
            "mu": spec.mu,
            "n": spec.n(),
            "files": ["M.mtx", "q.txt", "A.mtx", "B.mtx", "b.txt"],
            "dir": args.out.display().to_string(),
        })
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_solve(args: &SolveArgs) -> anyhow::Result<ExitCode> {
    let problem = args.problem.resolve()?;
    let cfg = args.solver.config()?;
    let report = solve(&problem.gave, &cfg)?;
    let json = report.to_json(
        problem.spec.map(|s| s.example_id),
        problem.spec.map(|s| s.mu),
    );
    let mut doc = serde_json::to_value(&json)?;
    // attach the recovered complementarity pair summary for generated problems
    if let Some(lcp) = &problem.lcp {
        let sol = gave_solution_to_lcp(&report.x);
        let (feasibility, gap) = lcp_residual(lcp, &sol.z)?;
        doc["lcp_feasibility"] = serde_json::json!(feasibility);
        doc["lcp_gap"] = serde_json::json!(gap);
    }
    let text = serde_json::to_string_pretty(&doc)? + "\n";
    write_or_print(&text, args.out.as_deref())?;
    Ok(if report.converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_sweep(args: &SweepArgs) -> anyhow::Result<ExitCode> {
    let problem = args.problem.resolve()?;
    // the sweep supplies omega per grid point; --omega is not consulted
    let cfg = SolverConfig {
        method: args.solver.method,
        omega: None,
        tol: args.solver.tol,
        k_max: args.solver.kmax,
        x0: match args.solver.x0 {
            X0Cli::Alternating => X0Policy::Alternating,
            X0Cli::Zeros => X0Policy::Zeros,
        },
        residual_mode: args.solver.residual,
        record_iterates: false,
        validate_omega: false,
    };
    let result = sweep_omega(&problem.gave, args.solver.method, &args.sweep, &cfg)?;
    let text = match args.format {
        TableFormat::Csv => {
            let mut s = String::from("omega,IT,converged,RES\n");
            for r in &result.records {
                s.push_str(&format!(
                    "{},{},{},{:.2e}\n",
                    r.omega, r.iterations, r.converged, r.final_residual
                ));
            }
            s.push_str(&format!(
                "# omega_exp={} IT={}\n",
                result.omega_exp, result.it_at_omega_exp
            ));
            s
        }
        _ => serde_json::to_string_pretty(&result)? + "\n",
    };
    write_or_print(&text, args.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_certify(args: &CertifyArgs) -> anyhow::Result<ExitCode> {
    let problem = args.problem.resolve()?;
    let p = &problem.gave;
    let omega = Omega::Scalar(args.omega);
    let mut blocks = Vec::new();
    let block = |name: &str, r: gave_core::Result<gave_core::Certificate>| match r {
        Ok(cert) => serde_json::to_value(&cert).expect("certificate serializes"),
        Err(e) => serde_json::json!({
            "theorem": name,
            "applicable": false,
            "reason": e.to_string(),
        }),
    };
    blocks.push(block("thm1", cert_thm1(p, &omega)));
    blocks.push(block("thm2", cert_thm2(p, &omega)));
    blocks.push(block("thm3_spd", cert_thm3_spd(p, args.omega)));
    blocks.push(block("thm4_hplus", cert_thm4_hplus(p, args.omega)));
    let text = serde_json::to_string_pretty(&blocks)? + "\n";
    write_or_print(&text, args.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(args: &BenchArgs) -> anyhow::Result<ExitCode> {
    let mut requests = Vec::new();
    for &m in &args.sizes {
        for &method in &args.methods {
            let spec = TestProblemSpec::new(args.example, m, args.mu)?;
            let omega = match (args.omega, args.omega_source.as_str()) {
                (Some(w), _) => OmegaChoice::Fixed(w),
                (None, "reference") => OmegaChoice::Reference,
                (None, "sweep") => OmegaChoice::Sweep(args.sweep),
                (None, other) => bail!("unknown omega source `{other}` (reference|sweep)"),
            };
            requests.push(BenchRequest {
                spec,
                method,
                omega,
            });
        }
    }
    let base = SolverConfig {
        method: Method::Nmn,
        omega: None,
        tol: args.tol,
        k_max: args.kmax,
        x0: X0Policy::Alternating,
        residual_mode: args.residual,
        record_iterates: false,
        validate_omega: false,
    };
    let table = run_benchmark(&requests, &base);
    let text = emit_table(&table, args.format);
    write_or_print(&text, args.out.as_deref())?;
    Ok(if table.rows.iter().all(|r| r.converged) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Gen(args) => cmd_gen(args),
        Cmd::Solve(args) => cmd_solve(args),
        Cmd::Sweep(args) => cmd_sweep(args),
        Cmd::Certify(args) => cmd_certify(args),
        Cmd::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
