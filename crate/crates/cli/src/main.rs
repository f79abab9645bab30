use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use omega_core::analysis::DEFAULT_EQUALITY_TOL;
use omega_core::experiments::Directions;
use omega_core::optimize::DEFAULT_MAX_LOOPS;
use omega_core::oracle::DEFAULT_LIMIT_N;
use omega_core::spectral::{DEFAULT_MAX_ITER, DEFAULT_TOL};
use omega_core::{
    bound_report, detect_equality_case, is_max_optimal, is_min_optimal, optimize, oracle_extremes,
    perron, AnalysisError, AnalysisOptions, EntryDistribution, ExperimentConfig, ExperimentError,
    InitialOrder, Matrix, MatrixError, Method, Objective, OptimizeError, OptimizeOptions,
    OptimizeResult, OracleError, OracleOptions, PerronOptions, SpectralError,
};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "omega",
    version,
    about = "Extreme Perron roots over row-wise permutations of a nonnegative matrix"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mean row sum against the smallest and largest Perron root over Ω(A)
    Bound {
        #[command(flatten)]
        input: Input,
        /// How the extremes are found
        #[arg(long, value_enum, default_value_t = MethodArg::Algorithm)]
        method: MethodArg,
        #[command(flatten)]
        solver: Solver,
    },
    /// Largest Perron root over Ω(A) by alignment search
    Maximize(OptimizeCmd),
    /// Smallest Perron root over Ω(A) by alignment search
    Minimize(OptimizeCmd),
    /// Both extremes by exhaustive enumeration (small n only)
    Oracle {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        solver: Solver,
    },
    /// Check that a candidate lies in Ω(original) and satisfies the alignment condition
    Certify {
        #[command(flatten)]
        input: Input,
        /// Matrix the candidate should be a rearrangement of
        #[arg(long, value_name = "FILE")]
        against: PathBuf,
        #[arg(long, default_value_t = Objective::Max)]
        direction: Objective,
        #[command(flatten)]
        solver: Solver,
    },
    /// Which equality case of the mean row sum bound applies
    Equality {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = DEFAULT_EQUALITY_TOL, hide_default_value = true)]
        #[arg(help = format!("Relative tolerance for equal row sums and flat eigenvectors [default: {DEFAULT_EQUALITY_TOL:e}]"))]
        equality_tol: f64,
        #[command(flatten)]
        solver: Solver,
    },
    /// Loop-count experiment over random matrices; writes CSV
    Experiment(ExperimentCmd),
}

#[derive(Debug, Args)]
struct Input {
    /// Matrix file (text or JSON)
    #[arg(short, long, value_name = "FILE")]
    input: PathBuf,
}

#[derive(Debug, Args)]
struct OptimizeCmd {
    #[command(flatten)]
    input: Input,
    /// Include the per-loop trace
    #[arg(long)]
    trace: bool,
    /// Write the witness matrix to FILE in text format
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
    #[command(flatten)]
    solver: Solver,
}

#[derive(Debug, Args)]
struct ExperimentCmd {
    /// Comma-separated dimensions
    #[arg(long, value_delimiter = ',', default_values_t = vec![5, 25, 50, 100, 200])]
    dims: Vec<usize>,
    /// Instances per dimension
    #[arg(long, default_value_t = 50)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Entry distribution, uniform_int(lo,hi) or uniform_real(lo,hi)
    #[arg(long, default_value = "uniform_int(1,9)")]
    distribution: EntryDistribution,
    /// max, min or both
    #[arg(long, default_value = "both")]
    directions: Directions,
    /// Compare against enumeration for n <= limit-n
    #[arg(long)]
    oracle_check: bool,
    /// CSV destination
    #[arg(short, long, value_name = "FILE")]
    output: PathBuf,
    #[command(flatten)]
    solver: Solver,
}

#[derive(Debug, Clone, Args)]
struct Solver {
    #[arg(long, default_value_t = DEFAULT_TOL, hide_default_value = true)]
    #[arg(help = format!("Relative tolerance of the Perron solver [default: {DEFAULT_TOL:e}]"))]
    tol: f64,
    /// Iteration cap of the Perron solver
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// Cap on alignment loops
    #[arg(long, default_value_t = DEFAULT_MAX_LOOPS)]
    max_loops: usize,
    /// Largest n accepted by enumeration
    #[arg(long, default_value_t = DEFAULT_LIMIT_N)]
    limit_n: usize,
    /// Initial row order: row-norms, row-sums or identity
    #[arg(long, default_value = "row-norms")]
    init: InitialOrder,
    /// Skip the full indecomposability check
    #[arg(long)]
    unsafe_accept: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Oracle,
    Algorithm,
}

/// Solver settings echoed in JSON output.
#[derive(Serialize)]
struct Settings {
    tol: f64,
    max_iter: usize,
    max_loops: usize,
    limit_n: usize,
    init: InitialOrder,
    unsafe_accept: bool,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'a str,
    settings: Settings,
    result: T,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Solver(String),
    Certificate(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Solver(_) => 2,
            Failure::Certificate(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Solver(m) | Failure::Certificate(m) => m,
        }
    }
}

impl From<MatrixError> for Failure {
    fn from(e: MatrixError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<SpectralError> for Failure {
    fn from(e: SpectralError) -> Self {
        Failure::Solver(e.to_string())
    }
}

impl From<OptimizeError> for Failure {
    fn from(e: OptimizeError) -> Self {
        match e {
            OptimizeError::PreconditionFailed => Failure::Input(e.to_string()),
            other => Failure::Solver(other.to_string()),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::DimensionTooLarge { .. } => Failure::Input(e.to_string()),
            other => Failure::Solver(other.to_string()),
        }
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Precondition(_) | AnalysisError::Matrix(_) => {
                Failure::Input(e.to_string())
            }
            AnalysisError::Oracle(o) => o.into(),
            AnalysisError::Optimize(o) => o.into(),
            other => Failure::Solver(other.to_string()),
        }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Config(_) => Failure::Input(e.to_string()),
            other => Failure::Solver(other.to_string()),
        }
    }
}

impl Solver {
    fn validate(&self) -> Result<(), Failure> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Failure::Input(format!(
                "--tol must lie in (0, 1), got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 || self.max_loops == 0 {
            return Err(Failure::Input(
                "--max-iter and --max-loops must be positive".into(),
            ));
        }
        Ok(())
    }

    fn perron(&self) -> PerronOptions {
        PerronOptions {
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }

    fn optimize(&self) -> OptimizeOptions {
        OptimizeOptions {
            perron: self.perron(),
            max_loops: self.max_loops,
            initial_order: self.init,
            unsafe_accept: self.unsafe_accept,
        }
    }

    fn analysis(&self, equality_tol: f64) -> AnalysisOptions {
        AnalysisOptions {
            optimize: self.optimize(),
            limit_n: self.limit_n,
            equality_tol,
        }
    }

    fn settings(&self) -> Settings {
        Settings {
            tol: self.tol,
            max_iter: self.max_iter,
            max_loops: self.max_loops,
            limit_n: self.limit_n,
            init: self.init,
            unsafe_accept: self.unsafe_accept,
        }
    }
}

fn load(path: &Path) -> Result<Matrix, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    Matrix::parse_any(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit_json<T: Serialize>(command: &str, solver: &Solver, result: T) -> Result<String, Failure> {
    let env = Envelope {
        command,
        settings: solver.settings(),
        result,
    };
    let mut s = serde_json::to_string_pretty(&env).map_err(|e| Failure::Solver(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct OptimizeOutput<'a> {
    objective: Objective,
    rho: f64,
    loops: usize,
    certificate: bool,
    witness: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<&'a omega_core::OptimizeTrace>,
}

fn run_optimize(cmd: &OptimizeCmd, objective: Objective) -> Result<String, Failure> {
    cmd.solver.validate()?;
    let a = load(&cmd.input.input)?;
    let r: OptimizeResult = optimize(&a, objective, &cmd.solver.optimize())?;
    if let Some(path) = &cmd.output {
        fs::write(path, r.witness.to_text())
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    if cmd.solver.format == Format::Json {
        let out = OptimizeOutput {
            objective,
            rho: r.rho,
            loops: r.trace.loop_count,
            certificate: r.certificate,
            witness: r.witness.to_rows(),
            trace: cmd.trace.then_some(&r.trace),
        };
        let name = if objective == Objective::Max {
            "maximize"
        } else {
            "minimize"
        };
        return emit_json(name, &cmd.solver, out);
    }
    let mut s = format!(
        "objective: {objective}\nrho: {:?}\nloops: {}\ncertificate: {}\nwitness:\n{}",
        r.rho, r.trace.loop_count, r.certificate, r.witness
    );
    if cmd.trace {
        s.push_str("trace:\n");
        s.push_str(&r.trace.to_json());
        s.push('\n');
    }
    Ok(s)
}

/// First row of `candidate` that is not a rearrangement of the same row of `original`.
fn membership_diagnostic(candidate: &Matrix, original: &Matrix) -> Option<String> {
    let (c, o) = (candidate.row_signature(), original.row_signature());
    c.rows
        .iter()
        .zip(&o.rows)
        .position(|(x, y)| x != y)
        .map(|i| {
            format!(
                "candidate is not in Ω(original): row {} is not a rearrangement of original row {}",
                i + 1,
                i + 1
            )
        })
}

#[derive(Serialize)]
struct CertifyOutput {
    direction: Objective,
    in_omega: bool,
    rho: f64,
    certificate: bool,
}

fn run_certify(
    input: &Input,
    against: &Path,
    direction: Objective,
    solver: &Solver,
) -> Result<String, Failure> {
    solver.validate()?;
    let b = load(&input.input)?;
    let a = load(against)?;
    if a.n() != b.n() {
        return Err(Failure::Input(format!(
            "dimension mismatch: candidate is {}x{}, original is {}x{}",
            b.n(),
            b.n(),
            a.n(),
            a.n()
        )));
    }
    if let Some(msg) = membership_diagnostic(&b, &a) {
        return Err(Failure::Certificate(msg));
    }
    let p = perron(&b, &solver.perron())?;
    let holds = match direction {
        Objective::Max => is_max_optimal(&b, &p.x, solver.tol)?,
        Objective::Min => is_min_optimal(&b, &p.x, solver.tol)?,
    };
    let out = if solver.format == Format::Json {
        emit_json(
            "certify",
            solver,
            CertifyOutput {
                direction,
                in_omega: true,
                rho: p.rho,
                certificate: holds,
            },
        )?
    } else {
        format!(
            "direction: {direction}\nin_omega: true\nrho: {:?}\ncertificate: {holds}\n",
            p.rho
        )
    };
    if holds {
        Ok(out)
    } else {
        print!("{out}");
        Err(Failure::Certificate(format!(
            "candidate fails the {direction} alignment certificate"
        )))
    }
}

#[derive(Serialize)]
struct EqualityOutput {
    n: usize,
    mean_row_sum: f64,
    equality_case: omega_core::EqualityCase,
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Bound {
            input,
            method,
            solver,
        } => {
            solver.validate()?;
            let a = load(&input.input)?;
            let method = match method {
                MethodArg::Oracle => Method::Oracle,
                MethodArg::Algorithm => Method::Algorithm,
            };
            let r = bound_report(&a, method, &solver.analysis(DEFAULT_EQUALITY_TOL))?;
            match solver.format {
                Format::Json => emit_json("bound", &solver, &r),
                Format::Text => Ok(format!("{}\n", r.summary())),
            }
        }
        Command::Maximize(cmd) => run_optimize(&cmd, Objective::Max),
        Command::Minimize(cmd) => run_optimize(&cmd, Objective::Min),
        Command::Oracle { input, solver } => {
            solver.validate()?;
            let a = load(&input.input)?;
            let opts = OracleOptions {
                perron: solver.perron(),
                limit_n: solver.limit_n,
            };
            let r = oracle_extremes(&a, &opts)?;
            match solver.format {
                Format::Json => emit_json("oracle", &solver, &r),
                Format::Text => Ok(format!(
                    "members: {}\nmin_rho: {:?}\nmean_row_sum: {:?}\nmax_rho: {:?}\nargmin:\n{}argmax:\n{}",
                    r.count, r.min_rho, r.mean_row_sum, r.max_rho, r.argmin, r.argmax
                )),
            }
        }
        Command::Certify {
            input,
            against,
            direction,
            solver,
        } => run_certify(&input, &against, direction, &solver),
        Command::Equality {
            input,
            equality_tol,
            solver,
        } => {
            solver.validate()?;
            let a = load(&input.input)?;
            let case = detect_equality_case(&a, equality_tol);
            match solver.format {
                Format::Json => emit_json(
                    "equality",
                    &solver,
                    EqualityOutput {
                        n: a.n(),
                        mean_row_sum: a.mean_row_sum(),
                        equality_case: case,
                    },
                ),
                Format::Text => Ok(format!(
                    "mean_row_sum: {:?}\nequality_case: {case}\n",
                    a.mean_row_sum()
                )),
            }
        }
        Command::Experiment(cmd) => {
            cmd.solver.validate()?;
            let cfg = ExperimentConfig {
                dims: cmd.dims.clone(),
                instances_per_dim: cmd.instances,
                seed: cmd.seed,
                distribution: cmd.distribution,
                directions: cmd.directions,
                optimize: cmd.solver.optimize(),
                oracle_check: cmd.oracle_check,
                limit_n: cmd.solver.limit_n,
            };
            let stats = omega_core::run_convergence_experiment(&cfg)?;
            let file = fs::File::create(&cmd.output).map_err(|e| {
                Failure::Input(format!("cannot write {}: {e}", cmd.output.display()))
            })?;
            stats.write_csv(io::BufWriter::new(file))?;
            let mut s = String::new();
            for d in &stats.per_dim {
                s.push_str(&format!(
                    "n={} instances={} mean_loops={:.3} max_loops={}\n",
                    d.dim, d.instance_count, d.mean_loops, d.max_loops_observed
                ));
            }
            s.push_str(&format!(
                "max_loops_observed: {}\n",
                stats.max_loops_observed
            ));
            if stats.exceeds_expectation() {
                eprintln!(
                    "finding: {} loops exceeds the expected maximum of 3",
                    stats.max_loops_observed
                );
            }
            let failed = stats.failures().count();
            if failed > 0 {
                eprintln!("{failed} runs failed; see the CSV");
            }
            Ok(s)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            let mut stdout = io::stdout().lock();
            if stdout
                .write_all(out.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("omega: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
