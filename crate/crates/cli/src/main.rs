use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use bkm_core::bench::{self, ErrorReport};
use bkm_core::problem_file::{parse_knot_list, parse_problem_file, MAX_KNOTS};
use bkm_core::BkmError;
use clap::{Parser, Subcommand, ValueEnum};

/// Boundary knot method solver for Helmholtz-type problems on ellipses.
///
/// Set BKM_LOG to quiet, info or debug for diagnostics on standard error.
#[derive(Debug, Parser)]
#[command(name = "bkm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CaseName {
    Table1,
    Table2,
}

impl CaseName {
    fn label(self) -> &'static str {
        match self {
            CaseName::Table1 => "table1",
            CaseName::Table2 => "table2",
        }
    }
}

#[derive(Debug, clap::Args)]
struct Output {
    /// Write results here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a reference benchmark and report errors at its test points.
    Bench {
        #[arg(value_enum)]
        case: CaseName,
        /// Boundary knot count (defaults to the larger of the case's two).
        #[arg(long, value_parser = parse_count)]
        knots: Option<usize>,
        /// Multiquadric shape parameter (defaults to the case's).
        #[arg(long, value_parser = parse_shape)]
        c: Option<f64>,
        /// Keep only the K nearest knots in every row.
        #[arg(long, value_parser = parse_count)]
        frm: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Run a benchmark for several knot counts.
    Sweep {
        #[arg(value_enum)]
        case: CaseName,
        /// Ascending comma-separated knot counts, e.g. 5,7.
        #[arg(long, value_parser = parse_knots)]
        knots: Option<KnotList>,
        #[arg(long, value_parser = parse_shape)]
        c: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Solve the problem described in a key-value file.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        output: Output,
    },
}

fn parse_count(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if (1..=MAX_KNOTS).contains(&n) => Ok(n),
        _ => Err(format!("expected an integer in 1..={MAX_KNOTS}")),
    }
}

fn parse_shape(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(c) if c > 0.0 && c.is_finite() => Ok(c),
        _ => Err("expected a positive number".into()),
    }
}

/// Knot counts given as one comma-separated argument.
#[derive(Debug, Clone)]
struct KnotList(Vec<usize>);

fn parse_knots(s: &str) -> Result<KnotList, String> {
    parse_knot_list(s).map(KnotList).map_err(|e| e.to_string())
}

enum Failure {
    Usage(String),
    Solver(BkmError),
    Io(io::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn init_logging() {
    let level = match std::env::var("BKM_LOG").as_deref() {
        Ok("debug") => log::LevelFilter::Debug,
        Ok("info") => log::LevelFilter::Info,
        Ok("quiet") | Err(_) => log::LevelFilter::Off,
        Ok(_) => log::LevelFilter::Warn,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .init();
}

fn emit(output: &Output, text: &str) -> Result<(), Failure> {
    match &output.out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn render(report: &ErrorReport, format: Format) -> String {
    match format {
        Format::Csv => report.to_csv(),
        Format::Table => report.to_table(),
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Bench {
            case,
            knots,
            c,
            frm,
            output,
        } => {
            let case = bench::case_by_name(case.label()).map_err(Failure::Solver)?;
            let n = knots
                .unwrap_or_else(|| *case.default_knots.last().expect("cases list knot counts"));
            let c = c.unwrap_or(case.default_shape);
            if let Some(k) = frm {
                if k > n {
                    return Err(Failure::Usage(format!("--frm {k} exceeds --knots {n}")));
                }
            }
            let report = bench::run_case(&case, n, c, frm).map_err(Failure::Solver)?;
            emit(&output, &render(&report, output.format))
        }
        Command::Sweep {
            case,
            knots,
            c,
            output,
        } => {
            let case = bench::case_by_name(case.label()).map_err(Failure::Solver)?;
            let counts = knots.map_or_else(|| case.default_knots.clone(), |k| k.0);
            let c = c.unwrap_or(case.default_shape);
            let reports = bench::convergence_sweep(&case, &counts, c);
            if let Some(Err(e)) = reports.iter().find(|r| r.is_err()) {
                if reports.iter().all(|r| r.is_err()) {
                    return Err(Failure::Solver(e.clone()));
                }
            }
            let text = match output.format {
                Format::Csv => bench::sweep_csv(&counts, &reports),
                Format::Table => counts
                    .iter()
                    .zip(&reports)
                    .map(|(n, r)| match r {
                        Ok(r) => r.to_table(),
                        Err(e) => format!("BKM({n}) failed: {e}\n"),
                    })
                    .collect::<Vec<_>>()
                    .join("\n"),
            };
            emit(&output, &text)
        }
        Command::Solve { file, output } => {
            let text = fs::read_to_string(&file)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", file.display())))?;
            let problem = parse_problem_file(&text)
                .map_err(|e| Failure::Usage(format!("{}: {e}", file.display())))?;
            let evaluation = problem.run().map_err(Failure::Solver)?;
            log::info!(
                "condition(drm)={:?} condition(bkm)={:?}",
                evaluation.diagnostics.drm_condition,
                evaluation.diagnostics.homogeneous_condition
            );
            let rendered = match output.format {
                Format::Csv => evaluation.to_csv(),
                Format::Table => evaluation.to_table(),
            };
            emit(&output, &rendered)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Solver(e)) => {
            let condition = match &e {
                BkmError::IllConditioned { estimate, .. } => format!("{estimate:e}"),
                _ => "not available".to_string(),
            };
            eprintln!("solver error: {e}\ncondition estimate: {condition}");
            ExitCode::from(1)
        }
    }
}
