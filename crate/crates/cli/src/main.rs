//! `jacspec`: spectra of the Jacobi operator on the scenario gallery and
//! verification of the eigenvalue bounds.

mod commands;
mod config;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use jacspec::spectra::{Problem, SpectraError};
use jacspec::Error;

use config::{CommandKind, FileConfig, Overrides, ProfileKind};

const EXIT_HELP: &str = "\
Exit status:
  0  success (verify: every applicable check passed)
  1  verify found a failing check, or an output file could not be written
  2  invalid flags or configuration
  3  solver failure
  4  Jacobi-Steklov problem not well posed (first Dirichlet eigenvalue not certified positive)";

const CSV_HELP: &str = "\
CSV columns (floats printed with 17 significant digits):
  spectrum: index,eigenvalue,residual
  verify:   scenario,problem,index,level,h,value,extrapolated,order
  sweep:    param,lambda1,sigma1,estimate1_rhs,estimate3_rhs,slack_estimate1,slack_estimate3
  dtn:      i,j,value (lower triangle of the DtN matrix, boundary vertex order)
  yamabe:   r,phi,dphi (the test function on the quadrature nodes)";

#[derive(Parser, Debug)]
#[command(name = "jacspec", version, about, after_help = format!("{CSV_HELP}\n\n{EXIT_HELP}"))]
struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the scenario gallery.
    List(Common),
    /// Robin, Dirichlet or Jacobi-Steklov eigenvalues of one scenario.
    Spectrum(Common),
    /// Run the bound checks and convergence studies.
    Verify {
        /// `all` or a comma-separated list of scenario names.
        #[arg(long)]
        suite: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep a scenario parameter and tabulate the Estimate1/Estimate3 bounds.
    Sweep {
        #[arg(long = "param")]
        param: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        from: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        to: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Dump the discrete Dirichlet-to-Neumann matrix of a bounded scenario.
    Dtn(Common),
    /// Conformal quotients and lower bounds on an n >= 3 scenario.
    Yamabe {
        #[arg(long, value_enum)]
        profile: Option<ProfileKind>,
        /// Coefficient of the quadratic profile 1 + c r^2.
        #[arg(long, allow_negative_numbers = true)]
        c: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        amplitude: Option<f64>,
        /// First Robin eigenvalue used in the chain check (default: analytic).
        #[arg(long, allow_negative_numbers = true)]
        lambda1: Option<f64>,
        /// First Jacobi-Steklov eigenvalue (default: analytic).
        #[arg(long, allow_negative_numbers = true)]
        sigma1: Option<f64>,
        /// Conformal invariant for the area lower bound.
        #[arg(long, allow_negative_numbers = true)]
        sigma_invariant: Option<f64>,
        /// Boundary conformal invariant for the boundary lower bound.
        #[arg(long, allow_negative_numbers = true)]
        tau_invariant: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProblemArg {
    Robin,
    Dirichlet,
    Steklov,
}

impl From<ProblemArg> for Problem {
    fn from(p: ProblemArg) -> Self {
        match p {
            ProblemArg::Robin => Problem::Robin,
            ProblemArg::Dirichlet => Problem::Dirichlet,
            ProblemArg::Steklov => Problem::Steklov,
        }
    }
}

#[derive(Args, Debug, Default)]
struct Common {
    #[arg(long)]
    scenario: Option<String>,
    /// Scenario parameter, e.g. `--set rho=2`.
    #[arg(long = "set", value_parser = parse_param)]
    set: Vec<(String, f64)>,
    #[arg(long)]
    level: Option<u32>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, value_enum)]
    problem: Option<ProblemArg>,
    /// JSON report path.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Convergence plot path (verify only).
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    pass_tol: Option<f64>,
    #[arg(long)]
    eq_tol: Option<f64>,
    /// Largest accepted relative eigen-residual.
    #[arg(long)]
    solver_tol: Option<f64>,
    #[arg(long, env = "JACSPEC_THREADS")]
    threads: Option<usize>,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("bad value in `{s}`: {e}"))?;
    Ok((k.trim().to_string(), v))
}

/// A failed run: exit status plus message.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Spectra(SpectraError::NotWellPosed { .. }) => 4,
            Error::Spectra(_) | Error::Fem(_) => 3,
            Error::Geometry(_) | Error::Bounds(_) | Error::Yamabe(_) => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn overrides(common: Common) -> Overrides {
    Overrides {
        scenario: common.scenario,
        params: common.set,
        level: common.level,
        count: common.count,
        problem: common.problem.map(Into::into),
        pass_tol: common.pass_tol,
        eq_tol: common.eq_tol,
        solver_tol: common.solver_tol,
        report: common.report,
        csv: common.csv,
        svg: common.svg,
        threads: common.threads,
        ..Default::default()
    }
}

fn split(command: Option<Command>) -> (Option<CommandKind>, Overrides) {
    let Some(command) = command else {
        return (None, Overrides::default());
    };
    match command {
        Command::List(c) => (Some(CommandKind::List), overrides(c)),
        Command::Spectrum(c) => (Some(CommandKind::Spectrum), overrides(c)),
        Command::Dtn(c) => (Some(CommandKind::Dtn), overrides(c)),
        Command::Verify { suite, common } => (
            Some(CommandKind::Verify),
            Overrides {
                suite,
                ..overrides(common)
            },
        ),
        Command::Sweep {
            param,
            from,
            to,
            steps,
            common,
        } => (
            Some(CommandKind::Sweep),
            Overrides {
                sweep_param: param,
                from,
                to,
                steps,
                ..overrides(common)
            },
        ),
        Command::Yamabe {
            profile,
            c,
            amplitude,
            lambda1,
            sigma1,
            sigma_invariant,
            tau_invariant,
            common,
        } => (
            Some(CommandKind::Yamabe),
            Overrides {
                profile,
                c,
                amplitude,
                lambda1,
                sigma1,
                sigma_invariant,
                tau_invariant,
                ..overrides(common)
            },
        ),
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let (kind, o) = split(cli.command);
    let kind = kind
        .or(file.command)
        .ok_or_else(|| Failure::usage("no subcommand given (and none in the config file)"))?;
    let config = config::resolve(kind, file, o)?;
    commands::run(&config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
