//! Command-line front end for `ordshrink-core`.
//!
//! ```text
//! ordshrink fit      data.csv [--family hs] [--penalty d4] [--alpha 0.3] [--q-frac 0.85] [--json]
//! ordshrink compare  data.csv [--q-frac 0.85] [--json]
//! ordshrink simulate --scenario smooth --p 200 --sigma 0.5 --seed 17 [--penalty d4]
//! ordshrink economy  data.csv --penalty d4
//! ```
//!
//! Exit codes: 0 success, 2 bad flags, 3 malformed input, 4 degenerate
//! layout, 5 I/O failure, 1 anything else.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use ordshrink_core::adapt::PenaltySet;
use ordshrink_core::oracle::{Scenario, Simulator};
use ordshrink_core::{Error, Family, FitConfig, PenaltyBasis, PenaltySelector};

pub mod input;
pub mod output;

pub use input::{read_layout, read_layout_path};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("{0}")]
    Degenerate(Error),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("{0}")]
    Core(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Malformed(_) => 3,
            Self::Degenerate(_) => 4,
            Self::Io(_) => 5,
            Self::Core(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::DegenerateLayout => Self::Degenerate(e),
            Error::MalformedInput(m) => Self::Malformed(m.to_owned()),
            Error::EmptyInput | Error::UnorderedLevels => Self::Malformed(e.to_string()),
            Error::InvalidDegree { .. }
            | Error::InvalidSplit
            | Error::NoFamily
            | Error::InvalidConfig(_)
            | Error::InvalidQ { .. }
            | Error::PenaltyLayoutMismatch(_) => Self::Usage(e.to_string()),
            other => Self::Core(other),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "ordshrink",
    version,
    about = "Adaptive shrinkage fits for ordinal one-way layouts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit the risk-minimizing estimator and print it.
    Fit {
        input: PathBuf,
        #[command(flatten)]
        opts: FitOpts,
        /// Print a single JSON document.
        #[arg(long)]
        json: bool,
    },
    /// Adapt every requested family and print the estimated risks.
    Compare {
        input: PathBuf,
        #[command(flatten)]
        opts: FitOpts,
        #[arg(long)]
        json: bool,
    },
    /// Fit simulated data with a known mean and report the true losses.
    Simulate {
        #[arg(long, default_value = "smooth")]
        scenario: Scenario,
        #[arg(long, default_value_t = 200)]
        p: usize,
        #[arg(long, default_value_t = 0.5)]
        sigma: f64,
        #[command(flatten)]
        opts: FitOpts,
    },
    /// Print signed square roots of the canonical coefficients.
    Economy {
        input: PathBuf,
        #[arg(long)]
        penalty: PenaltySelector,
    },
}

#[derive(Debug, Args)]
struct FitOpts {
    /// ls, pls, ms, st, hs or all.
    #[arg(long, default_value = "all")]
    family: Choice<Family>,
    /// A selector such as d4 or a2, or auto.
    #[arg(long, default_value = "auto")]
    penalty: Choice<PenaltySelector>,
    /// HS split fraction in [0, 1], or auto for the 0.05 grid.
    #[arg(long, default_value = "auto")]
    alpha: Choice<f64>,
    /// Use the high-component variance with q = floor(c p).
    #[arg(long = "q-frac")]
    q_frac: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Search a1..a6 instead of d1..d6 when the penalty is auto.
    #[arg(long)]
    annihilator: bool,
}

/// A single value or the automatic grid.
#[derive(Debug, Clone, Copy)]
enum Choice<T> {
    Auto,
    One(T),
}

impl<T: FromStr> FromStr for Choice<T>
where
    T::Err: std::fmt::Display,
{
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "auto" | "all" => Ok(Self::Auto),
            _ => s.parse().map(Self::One).map_err(|e: T::Err| e.to_string()),
        }
    }
}

impl FitOpts {
    fn config(&self) -> FitConfig {
        let mut config = FitConfig {
            seed: Some(self.seed),
            q_fraction: self.q_frac,
            ..FitConfig::default()
        };
        if let Choice::One(f) = self.family {
            config.families = vec![f];
        }
        config.penalties = match self.penalty {
            Choice::One(sel) => PenaltySet::Explicit(vec![sel]),
            Choice::Auto if self.annihilator => PenaltySet::Annihilators,
            Choice::Auto => PenaltySet::Differences,
        };
        if let Choice::One(a) = self.alpha {
            config.alphas = vec![a];
        }
        config
    }
}

/// Runs one command, writing the document to `out` and diagnostics to `err`.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let text = e.to_string();
            let line = text.lines().next().unwrap_or("invalid arguments");
            let _ = writeln!(err, "{line}");
            return 2;
        }
    };
    match execute(cli.command, err) {
        Ok(doc) => match out.write_all(doc.as_bytes()).and_then(|_| out.flush()) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(err, "error: i/o error: {e}");
                5
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn warn(err: &mut dyn Write, config: &FitConfig, p: usize) {
    for w in config.warnings(p) {
        let _ = writeln!(err, "warning: {w}");
    }
}

fn execute(command: Command, err: &mut dyn Write) -> Result<String, CliError> {
    match command {
        Command::Fit { input, opts, json } => {
            let layout = read_layout_path(&input)?;
            let config = opts.config();
            warn(err, &config, layout.p());
            let res = ordshrink_core::fit(&layout, &config)?;
            Ok(if json {
                output::fit_json(&res)
            } else {
                output::fit_text(&res, &layout)
            })
        }
        Command::Compare { input, opts, json } => {
            let layout = read_layout_path(&input)?;
            let config = opts.config();
            warn(err, &config, layout.p());
            let report = ordshrink_core::compare(&layout, &config)?;
            Ok(if json {
                output::compare_json(&report)
            } else {
                output::compare_csv(&report)
            })
        }
        Command::Simulate {
            scenario,
            p,
            sigma,
            opts,
        } => {
            if !(sigma > 0.0 && sigma.is_finite()) {
                return Err(CliError::Usage("sigma must be positive".to_owned()));
            }
            let config = opts.config();
            warn(err, &config, p);
            let sim = Simulator::new(scenario.mean(p), config)?.run(sigma, opts.seed, 0)?;
            Ok(output::simulation_csv(&sim, scenario.as_str(), p))
        }
        Command::Economy { input, penalty } => {
            let layout = read_layout_path(&input)?;
            let basis = PenaltyBasis::build(&layout, &penalty.build(layout.levels())?)?;
            Ok(output::economy_tsv(&basis.economy_profile()))
        }
    }
}
