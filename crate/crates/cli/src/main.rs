//! Command-line driver: solve single FCIDUMP files, scan dissociation curves and
//! check the dissociation limit.

mod check;
mod input;
mod pipeline;
mod scan;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fermicorr::solver::{DEFAULT_DENSE_LIMIT, DEFAULT_WEIGHT_CUTOFF};

use input::Input;
use pipeline::{Selection, Settings};

#[derive(Debug)]
pub enum Failure {
    /// Unreadable or invalid input; exit code 2.
    Input(String),
    /// A limit check did not pass; exit code 1.
    Assertion(String),
}

impl Failure {
    pub fn input(path: &Path, e: impl fmt::Display) -> Self {
        Failure::Input(format!("{}: {e}", path.display()))
    }

    pub fn output(e: impl fmt::Display) -> Self {
        Failure::Input(format!("cannot write output: {e}"))
    }

    fn exit_code(&self) -> u8 {
        match self {
            Failure::Assertion(_) => 1,
            Failure::Input(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) | Failure::Assertion(m) => f.write_str(m),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "fermicorr",
    version,
    about = "Exact diagonalization and up-down correlation measures"
)]
struct Cli {
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one FCIDUMP file and write a JSON report.
    Solve {
        file: PathBuf,
        /// Geometry tag (R in Å); read from `*_R<value>.fcidump` when omitted.
        #[arg(long)]
        tag: Option<f64>,
        #[command(flatten)]
        options: Options,
    },
    /// Solve many files (or directories of `.fcidump` files) and tabulate the measures.
    Scan {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        options: Options,
    },
    /// Compare against the exact dissociation-limit values.
    CheckLimits {
        /// Check the analytic limit states instead of a solved file.
        #[arg(long, conflicts_with = "file", required_unless_present = "file")]
        analytic: bool,
        /// FCIDUMP at the largest separation.
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 2e-2)]
        tolerance: f64,
        #[arg(long, default_value_t = 1000.0)]
        beta: f64,
        #[arg(long, default_value_t = DEFAULT_DENSE_LIMIT)]
        dense_limit: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Options {
    /// Inverse temperature of the thermal state, in 1/Eh.
    #[arg(long, default_value_t = 1000.0)]
    beta: f64,
    /// Override the (N_up, N_down) sector given by NELEC and MS2, e.g. `5,5`.
    #[arg(long, value_parser = parse_sector)]
    sector: Option<(usize, usize)>,
    /// States to analyse: gs, thermal, eigen<k>. Comma separated or repeated.
    #[arg(long = "state", value_delimiter = ',', default_values_t = [Selection::Ground, Selection::Thermal])]
    states: Vec<Selection>,
    /// Number of eigenvalues reported.
    #[arg(long, default_value_t = 13)]
    n_roots: usize,
    /// Thermal weights below this are dropped.
    #[arg(long, default_value_t = DEFAULT_WEIGHT_CUTOFF)]
    weight_cutoff: f64,
    /// Largest sector dimension solved densely.
    #[arg(long, default_value_t = DEFAULT_DENSE_LIMIT)]
    dense_limit: usize,
    /// Write to this file instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn parse_sector(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected N_up,N_down")?;
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

fn settings(o: &Options) -> Result<Settings, Failure> {
    validate_beta(o.beta)?;
    if o.n_roots == 0 {
        return Err(Failure::Input("--n-roots must be at least 1".into()));
    }
    if !(0.0..1.0).contains(&o.weight_cutoff) {
        return Err(Failure::Input("--weight-cutoff must lie in [0, 1)".into()));
    }
    Ok(Settings {
        beta: o.beta,
        sector: o.sector,
        states: o.states.clone(),
        n_roots: o.n_roots,
        weight_cutoff: o.weight_cutoff,
        dense_limit: o.dense_limit,
    })
}

fn validate_beta(beta: f64) -> Result<(), Failure> {
    if beta > 0.0 {
        Ok(())
    } else {
        Err(Failure::Input("--beta must be positive".into()))
    }
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(p).map_err(|e| Failure::input(p, e))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Solve { file, tag, options } => {
            let settings = settings(&options)?;
            let input = Input {
                tag: tag.or_else(|| input::tag_from_name(&file)),
                path: file,
            };
            let doc = pipeline::run(&input, &settings)?;
            let mut out = sink(options.output.as_deref())?;
            serde_json::to_writer_pretty(&mut out, &doc).map_err(Failure::output)?;
            writeln!(out).map_err(Failure::output)?;
            out.flush().map_err(Failure::output)
        }
        Command::Scan {
            inputs,
            format,
            options,
        } => {
            let settings = settings(&options)?;
            let outcomes = scan::scan(input::collect(&inputs)?, &settings);
            let failed = outcomes.iter().filter(|o| o.result.is_err()).count();
            if failed > 0 {
                log::warn!("{failed} of {} inputs failed; see the error column", outcomes.len());
            }
            let mut out = sink(options.output.as_deref())?;
            match format {
                Format::Csv => scan::write_csv(&outcomes, settings.n_roots, &mut out)?,
                Format::Json => {
                    scan::write_json(&outcomes, &mut out)?;
                    writeln!(out).map_err(Failure::output)?;
                }
            }
            out.flush().map_err(Failure::output)
        }
        Command::CheckLimits {
            analytic,
            file,
            tolerance,
            beta,
            dense_limit,
        } => {
            validate_beta(beta)?;
            let checks = if analytic {
                check::analytic()?
            } else {
                let path = file.expect("clap requires a file without --analytic");
                let settings = Settings {
                    beta,
                    sector: None,
                    states: Vec::new(),
                    n_roots: 13,
                    weight_cutoff: DEFAULT_WEIGHT_CUTOFF,
                    dense_limit,
                };
                check::from_file(
                    &Input {
                        tag: input::tag_from_name(&path),
                        path,
                    },
                    &settings,
                    tolerance,
                )?
            };
            if check::print_table(&checks, std::io::stdout().lock())? {
                Ok(())
            } else {
                Err(Failure::Assertion("dissociation-limit checks failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
