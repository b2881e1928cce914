//! Command-line surface for the tomokit library.
//!
//! Subcommands evaluate tomograms on grids, map frames through quadratic
//! dynamics, reconstruct density matrices from sampled tomograms, and run
//! the self-verification suites. Output is CSV (17 significant digits,
//! LF line endings) or JSON; errors go to stderr as single-line JSON with
//! exit code 2 for configuration problems, 3 for numerical
//! non-convergence, and 4 for verification failures.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tomokit::{
    cluster_grid, cm_grid, evolve_frame, marginal_grid, reconstruct_from_samples, run_all,
    symplectic_grid, ClusterPartition, EvolutionKind, FockSuperposition, Reconstruction,
    TomoError, TomogramGrid, TomogramKind, TomographyFrame,
};

#[derive(Parser)]
#[command(
    name = "tomokit",
    version,
    about = "Tomographic-probability toolkit for multimode oscillator states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the center-of-mass tomogram on an X grid.
    EvalCm {
        #[command(flatten)]
        state: StateArg,
        #[command(flatten)]
        frame: FrameArgs,
        /// Grid specification min:max:count.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[command(flatten)]
        evolution: EvolutionArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate the two-mode symplectic tomogram on an (X1, X2) grid.
    EvalSymplectic {
        #[command(flatten)]
        state: StateArg,
        #[command(flatten)]
        frame: FrameArgs,
        /// Axis specifications min:max:count[,min:max:count]; the second
        /// axis defaults to the first.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[command(flatten)]
        evolution: EvolutionArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate the cluster tomogram (modes 1,2 merged, mode 3 separate)
    /// on an (X, X3) grid.
    EvalCluster {
        #[command(flatten)]
        state: StateArg,
        #[command(flatten)]
        frame: FrameArgs,
        /// Axis specifications min:max:count[,min:max:count]; the second
        /// axis defaults to the first.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[command(flatten)]
        evolution: EvolutionArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate a single-mode marginal tomogram on an X grid.
    Marginal {
        #[command(flatten)]
        state: StateArg,
        /// Mode to keep, 1-based.
        #[arg(long)]
        mode: usize,
        /// Quadrature parameter mu for the kept mode.
        #[arg(long, allow_hyphen_values = true)]
        mu: f64,
        /// Quadrature parameter nu for the kept mode.
        #[arg(long, allow_hyphen_values = true)]
        nu: f64,
        /// Grid specification min:max:count.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[command(flatten)]
        evolution: EvolutionArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Map frame parameters through a quadratic evolution and print the
    /// evolved frame.
    Evolve {
        #[command(flatten)]
        frame: FrameArgs,
        /// Evolution kind: harmonic or inverted.
        #[arg(long)]
        kind: String,
        /// Evolution time.
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        /// Output format: csv or json.
        #[arg(long, default_value = "csv")]
        format: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Reconstruct a single-mode density matrix from tomogram samples.
    Reconstruct {
        /// CSV file of samples with header mu,nu,X,w.
        #[arg(long)]
        input: PathBuf,
        /// Fock-space dimension of the reconstruction.
        #[arg(long, default_value_t = 6)]
        cutoff: usize,
        /// Project the result onto the physical cone (positive
        /// semidefinite, unit trace) instead of emitting the raw matrix.
        #[arg(long)]
        psd: bool,
        /// Output format: csv or json.
        #[arg(long, default_value = "csv")]
        format: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the invariant verification suites and print a JSON report.
    Verify {
        /// Seed for the random frame streams.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct StateArg {
    /// Path to a state JSON file.
    #[arg(long)]
    state: PathBuf,
}

#[derive(Args)]
struct FrameArgs {
    /// Comma-separated mu_j list, one entry per mode.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    mu: Vec<f64>,
    /// Comma-separated nu_j list, one entry per mode.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    nu: Vec<f64>,
}

#[derive(Args)]
struct EvolutionArgs {
    /// Apply this evolution to the frame before evaluating: harmonic or
    /// inverted.
    #[arg(long, requires = "t")]
    kind: Option<String>,
    /// Evolution time; requires --kind.
    #[arg(long, requires = "kind", allow_hyphen_values = true)]
    t: Option<f64>,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

enum CliError {
    Parse(String),
    Io(String),
    NonConvergent(String),
    VerifyFailed(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "parse",
            CliError::Io(_) => "io",
            CliError::NonConvergent(_) => "non-convergence",
            CliError::VerifyFailed(_) => "verify",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Parse(m)
            | CliError::Io(m)
            | CliError::NonConvergent(m)
            | CliError::VerifyFailed(m) => m,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) | CliError::Io(_) => 2,
            CliError::NonConvergent(_) => 3,
            CliError::VerifyFailed(_) => 4,
        }
    }
}

impl From<TomoError> for CliError {
    fn from(err: TomoError) -> Self {
        match err {
            TomoError::NonConvergent(_) => CliError::NonConvergent(err.to_string()),
            other => CliError::Parse(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = err.print();
                return ExitCode::SUCCESS;
            }
            report(&CliError::Parse(err.to_string()));
            return ExitCode::from(2);
        }
    };
    match configure_threads().and_then(|()| dispatch(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            report(&err);
            ExitCode::from(err.exit_code())
        }
    }
}

fn report(err: &CliError) {
    let line = serde_json::json!({
        "kind": err.kind(),
        "message": err.message(),
    });
    eprintln!("{line}");
}

/// Applies `TOMOKIT_THREADS` before any parallel work; 0 or unset keeps
/// rayon's automatic sizing.
fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("TOMOKIT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| {
        CliError::Parse(format!(
            "TOMOKIT_THREADS must be a non-negative integer, got '{raw}'"
        ))
    })?;
    if n > 0 {
        // Errors only when a global pool already exists, which cannot
        // happen this early in the process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::EvalCm {
            state,
            frame,
            grid,
            evolution,
            output,
        } => {
            let state = load_state(&state.state)?;
            let frame = evolved_frame(frame.build()?, &evolution)?;
            let axis = parse_axis(&grid)?;
            let grid = cm_grid(&state, &frame, &axis)?;
            emit(&output, render_grid_csv(&grid))
        }
        Command::EvalSymplectic {
            state,
            frame,
            grid,
            evolution,
            output,
        } => {
            let state = load_state(&state.state)?;
            let frame = evolved_frame(frame.build()?, &evolution)?;
            let (axis1, axis2) = parse_axis_pair(&grid)?;
            let grid = symplectic_grid(&state, &frame, &axis1, &axis2)?;
            emit(&output, render_grid_csv(&grid))
        }
        Command::EvalCluster {
            state,
            frame,
            grid,
            evolution,
            output,
        } => {
            let state = load_state(&state.state)?;
            let frame = evolved_frame(frame.build()?, &evolution)?;
            let (x_axis, x3_axis) = parse_axis_pair(&grid)?;
            let grid = cluster_grid(
                &state,
                ClusterPartition::pair_and_single(),
                &frame,
                &x_axis,
                &x3_axis,
            )?;
            emit(&output, render_grid_csv(&grid))
        }
        Command::Marginal {
            state,
            mode,
            mu,
            nu,
            grid,
            evolution,
            output,
        } => {
            let state = load_state(&state.state)?;
            if mode == 0 {
                return Err(CliError::Parse("--mode is 1-based".into()));
            }
            // The single kept pair evolves exactly like a one-mode frame.
            let pair = evolved_frame(one_mode_frame(mu, nu)?, &evolution)?;
            let axis = parse_axis(&grid)?;
            let grid = marginal_grid(&state, mode - 1, pair.mu()[0], pair.nu()[0], &axis)?;
            emit(&output, render_grid_csv(&grid))
        }
        Command::Evolve {
            frame,
            kind,
            t,
            format,
            output,
        } => {
            let kind: EvolutionKind = kind.parse()?;
            let evolved = evolve_frame(&frame.build()?, kind, t);
            let text = match parse_format(&format)? {
                OutputFormat::Csv => render_frame_csv(&evolved),
                OutputFormat::Json => {
                    let value = serde_json::json!({
                        "mu": evolved.mu(),
                        "nu": evolved.nu(),
                    });
                    format!("{value:#}\n")
                }
            };
            emit(&output, text)
        }
        Command::Reconstruct {
            input,
            cutoff,
            psd,
            format,
            output,
        } => {
            let text = std::fs::read_to_string(&input)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", input.display())))?;
            let rows = tomokit::parse_samples_csv(&text)?;
            let recon = reconstruct_from_samples(&rows, cutoff)?;
            let rendered = render_reconstruction(&recon, psd, parse_format(&format)?)?;
            emit(&output, rendered)
        }
        Command::Verify { seed, output } => {
            let report = run_all(seed);
            emit(&output, format!("{}\n", report.to_json()))?;
            if report.all_passed {
                Ok(())
            } else {
                let failing: Vec<&str> = report
                    .suites
                    .iter()
                    .filter(|s| !s.passed)
                    .map(|s| s.name.as_str())
                    .collect();
                Err(CliError::VerifyFailed(format!(
                    "invariant suites failed: {}",
                    failing.join(", ")
                )))
            }
        }
    }
}

impl FrameArgs {
    fn build(&self) -> Result<TomographyFrame, CliError> {
        Ok(TomographyFrame::new(self.mu.clone(), self.nu.clone())?)
    }
}

fn one_mode_frame(mu: f64, nu: f64) -> Result<TomographyFrame, CliError> {
    Ok(TomographyFrame::new(vec![mu], vec![nu])?)
}

fn evolved_frame(
    frame: TomographyFrame,
    evolution: &EvolutionArgs,
) -> Result<TomographyFrame, CliError> {
    match (&evolution.kind, evolution.t) {
        (Some(kind), Some(t)) => {
            let kind: EvolutionKind = kind.parse()?;
            Ok(evolve_frame(&frame, kind, t))
        }
        (None, None) => Ok(frame),
        // clap's `requires` links make this unreachable from the parser.
        _ => Err(CliError::Parse(
            "--kind and --t must be given together".into(),
        )),
    }
}

fn load_state(path: &std::path::Path) -> Result<FockSuperposition, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    Ok(FockSuperposition::from_json(&text)?)
}

/// Parses one `min:max:count` axis specification.
fn parse_axis(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [min, max, count] = parts.as_slice() else {
        return Err(CliError::Parse(format!(
            "grid spec must be min:max:count, got '{spec}'"
        )));
    };
    let min: f64 = min
        .parse()
        .map_err(|_| CliError::Parse(format!("grid minimum '{min}' is not a number")))?;
    let max: f64 = max
        .parse()
        .map_err(|_| CliError::Parse(format!("grid maximum '{max}' is not a number")))?;
    let count: usize = count
        .parse()
        .map_err(|_| CliError::Parse(format!("grid count '{count}' is not an integer")))?;
    Ok(tomokit::linear_axis(min, max, count)?)
}

/// Parses `spec[,spec]` into two axes, the second defaulting to the
/// first.
fn parse_axis_pair(spec: &str) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    match spec.split_once(',') {
        None => {
            let axis = parse_axis(spec)?;
            Ok((axis.clone(), axis))
        }
        Some((first, second)) => {
            if second.contains(',') {
                return Err(CliError::Parse(format!(
                    "at most two comma-separated axis specs are allowed, got '{spec}'"
                )));
            }
            Ok((parse_axis(first)?, parse_axis(second)?))
        }
    }
}

enum OutputFormat {
    Csv,
    Json,
}

fn parse_format(format: &str) -> Result<OutputFormat, CliError> {
    match format {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => Err(CliError::Parse(format!(
            "unknown format '{other}', expected 'csv' or 'json'"
        ))),
    }
}

fn render_grid_csv(grid: &TomogramGrid) -> String {
    let mut out = String::new();
    match grid.kind {
        TomogramKind::CenterOfMass | TomogramKind::Marginal => {
            out.push_str("X,w\n");
            for (x, w) in grid.axes[0].iter().zip(&grid.values) {
                let _ = writeln!(out, "{x:.16e},{w:.16e}");
            }
        }
        TomogramKind::Symplectic => {
            out.push_str("X1,X2,w\n");
            push_two_axis_rows(&mut out, grid);
        }
        TomogramKind::Cluster => {
            out.push_str("X,X3,w\n");
            push_two_axis_rows(&mut out, grid);
        }
    }
    out
}

fn push_two_axis_rows(out: &mut String, grid: &TomogramGrid) {
    let inner = grid.axes[1].len();
    for (i, a) in grid.axes[0].iter().enumerate() {
        for (j, b) in grid.axes[1].iter().enumerate() {
            let w = grid.values[i * inner + j];
            let _ = writeln!(out, "{a:.16e},{b:.16e},{w:.16e}");
        }
    }
}

fn render_frame_csv(frame: &TomographyFrame) -> String {
    let mut out = String::from("mode,mu,nu\n");
    for (j, (&mu, &nu)) in frame.mu().iter().zip(frame.nu()).enumerate() {
        let _ = writeln!(out, "{},{mu:.16e},{nu:.16e}", j + 1);
    }
    out
}

fn render_reconstruction(
    recon: &Reconstruction,
    psd: bool,
    format: OutputFormat,
) -> Result<String, CliError> {
    let matrix = if psd {
        recon.psd_matrix()?
    } else {
        recon.raw().clone()
    };
    let dim = matrix.nrows();
    match format {
        OutputFormat::Csv => {
            let mut out = String::from("m,n,re,im\n");
            for m in 0..dim {
                for n in 0..dim {
                    let v = matrix[(m, n)];
                    let _ = writeln!(out, "{m},{n},{:.16e},{:.16e}", v.re, v.im);
                }
            }
            Ok(out)
        }
        OutputFormat::Json => {
            let component = |pick: fn(&tomokit::num_complex::Complex64) -> f64| -> Vec<Vec<f64>> {
                (0..dim)
                    .map(|m| (0..dim).map(|n| pick(&matrix[(m, n)])).collect())
                    .collect()
            };
            let value = serde_json::json!({
                "dim": dim,
                "trace_error": recon.trace_error(),
                "re": component(|v| v.re),
                "im": component(|v| v.im),
            });
            Ok(format!("{value:#}\n"))
        }
    }
}

fn emit(output: &OutputArgs, text: String) -> Result<(), CliError> {
    match &output.output {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
    }
}
