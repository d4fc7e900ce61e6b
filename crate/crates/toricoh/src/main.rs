use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use toricoh::scenario::{builtin_paper_biquadratic, parse_scenario, Report, Scenario};
use toricoh::{Caps, Error};

/// Exact cohomology of finite-group lattices, flasque resolutions of
/// algebraic tori, and local-global kernels over families of
/// decomposition subgroups.
#[derive(Parser)]
#[command(name = "toricoh", version, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    opts: CommonOpts,
}

#[derive(Args)]
struct CommonOpts {
    /// Highest cohomological degree the engine will build complexes for
    #[arg(long, global = true, default_value_t = 3)]
    max_degree: usize,

    /// Upper bound on coboundary matrix rows (|G|^(i+1) * rank)
    #[arg(long, global = true, default_value_t = 1 << 20)]
    size_cap: u64,

    /// Output rendering
    #[arg(long, global = true, default_value = "text", value_parser = ["text", "machine"])]
    format: String,

    /// Print generating cocycles and kernel witnesses entry by entry
    #[arg(long, global = true)]
    verbose_witnesses: bool,

    /// Also write the report to this file
    #[arg(long, global = true, value_name = "PATH")]
    report: Option<PathBuf>,
}

/// The one-off subcommands reuse the scenario machinery: the file
/// provides the group and named objects, and the subcommand body becomes
/// a single compute directive appended to it.
#[derive(Subcommand)]
enum Command {
    /// Run a scenario file or the built-in one
    #[command(subcommand)]
    Scenario(ScenarioCmd),

    /// Cohomology of one declared lattice in one degree
    Cohomology {
        /// Scenario-style declaration file ([group], [lattice ...], ...)
        #[arg(value_name = "PATH")]
        declarations: PathBuf,
        #[arg(value_name = "DEGREE")]
        degree: usize,
        #[arg(value_name = "LATTICE")]
        lattice: String,
    },

    /// Flasqueness and coflasqueness of a declared lattice
    Flasque {
        #[arg(value_name = "PATH")]
        declarations: PathBuf,
        #[arg(value_name = "LATTICE")]
        lattice: String,
    },

    /// Flasque resolution of a declared torus, with certificates
    Resolution {
        #[arg(value_name = "PATH")]
        declarations: PathBuf,
        #[arg(value_name = "TORUS")]
        torus: String,
    },

    /// Kernel of local restrictions over a declared place family
    Sha {
        #[arg(value_name = "PATH")]
        declarations: PathBuf,
        #[arg(value_name = "DEGREE")]
        degree: usize,
        #[arg(value_name = "LATTICE")]
        lattice: String,
        #[arg(value_name = "PLACES")]
        family: String,
    },

    /// Which cyclic subgroups a place family reaches up to conjugacy
    Coverage {
        #[arg(value_name = "PATH")]
        declarations: PathBuf,
        #[arg(value_name = "PLACES")]
        family: String,
    },
}

#[derive(Subcommand)]
enum ScenarioCmd {
    /// Parse and run a scenario file
    Run {
        #[arg(value_name = "PATH")]
        path: PathBuf,
    },
    /// Run the built-in biquadratic norm-one scenario
    PaperBiquadratic,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if root_is_parse(&e) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn root_is_parse(e: &Error) -> bool {
    match e {
        Error::Parse { .. } => true,
        Error::Directive { source, .. } => root_is_parse(source),
        _ => false,
    }
}

fn file_stem(path: &Path, fallback: &str) -> String {
    path.file_stem().and_then(|s| s.to_str()).unwrap_or(fallback).to_string()
}

fn load_scenario(path: &Path) -> Result<Scenario, Error> {
    let text = fs::read_to_string(path)?;
    Ok(parse_scenario(&text)?.with_name(&file_stem(path, "scenario")))
}

fn one_off(path: &Path, directive: &str) -> Result<Scenario, Error> {
    let mut text = fs::read_to_string(path)?;
    text.push_str("\n[compute]\n");
    text.push_str(directive);
    text.push('\n');
    Ok(parse_scenario(&text)?.with_name(&file_stem(path, "declarations")))
}

fn emit(opts: &CommonOpts, report: &Report) -> Result<(), Error> {
    let rendered = match opts.format.as_str() {
        "machine" => report.machine(),
        _ => report.text(),
    };
    print!("{rendered}");
    if let Some(path) = &opts.report {
        fs::write(path, rendered)?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Error> {
    let opts = &cli.opts;
    let mut caps = Caps { max_degree: opts.max_degree, size_cap: opts.size_cap };
    let scenario = match &cli.command {
        Command::Scenario(ScenarioCmd::Run { path }) => load_scenario(path)?,
        Command::Scenario(ScenarioCmd::PaperBiquadratic) => builtin_paper_biquadratic(),
        Command::Cohomology { declarations, degree, lattice } => {
            caps.max_degree = caps.max_degree.max(*degree);
            one_off(declarations, &format!("h {degree} {lattice}"))?
        }
        Command::Flasque { declarations, lattice } => {
            one_off(declarations, &format!("flasque {lattice}"))?
        }
        Command::Resolution { declarations, torus } => {
            one_off(declarations, &format!("resolution {torus}"))?
        }
        Command::Sha { declarations, degree, lattice, family } => {
            caps.max_degree = caps.max_degree.max(*degree);
            one_off(declarations, &format!("sha {degree} {lattice} {family}"))?
        }
        Command::Coverage { declarations, family } => {
            one_off(declarations, &format!("coverage {family}"))?
        }
    };
    let report = scenario.run(&caps, opts.verbose_witnesses)?;
    emit(opts, &report)
}
