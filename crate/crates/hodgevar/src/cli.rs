//! Argument parsing and dispatch.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{self, TheoryArg};
use crate::config::{parse_grid, Backend, Grid, Format, RunConfig, DEFAULT_RADIUS, DEFAULT_SEED, DEFAULT_TOL};
use crate::io::{load_family, load_model, InputError};
use crate::report::Output;
use crate::verify::CHECKS;

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_INPUT: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "hodgevar", version, about = "Bott-Chern deformations and period maps on invariant-form models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Rank and integrability tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Truncation order of the power series (defaults to the family's N).
    #[arg(long)]
    pub order: Option<usize>,
    /// Comma-separated sample values per parameter, e.g. "0,0.05,0.05i".
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<Grid>,
    /// Largest allowed |t| of a grid value.
    #[arg(long, default_value_t = DEFAULT_RADIUS)]
    pub radius: f64,
    #[arg(long, value_enum, default_value_t = Backend::Float)]
    pub backend: Backend,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub out: Format,
    /// Write the report to a file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Seed of randomized checks.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Report checks that assume the ddbar-lemma as informational on models
    /// where it fails.
    #[arg(long)]
    pub allow_non_ddbar: bool,
}

impl Common {
    pub fn config(&self) -> RunConfig {
        let mut cfg = RunConfig {
            tol: self.tol,
            order: self.order,
            radius: self.radius,
            backend: self.backend,
            format: self.out,
            seed: self.seed,
            allow_non_ddbar: self.allow_non_ddbar,
            ..RunConfig::default()
        };
        if let Some(g) = &self.grid {
            cfg.grid = g.0.clone();
        }
        cfg
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Cohomology dimensions of a model.
    Cohomology {
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = TheoryArg::All)]
        theory: TheoryArg,
        #[command(flatten)]
        common: Common,
    },
    /// Test the ddbar-lemma bidegree by bidegree.
    DdbarCheck {
        model: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Deformed Bott-Chern dimensions and canonical deformations.
    Deform {
        model: PathBuf,
        family: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Period map points, Pluecker coordinates and residuals.
    Period {
        model: PathBuf,
        family: PathBuf,
        /// Filtration index; all admissible values when omitted.
        #[arg(long)]
        p: Option<usize>,
        /// Cohomological degree; all degrees when omitted.
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Run verification checks.
    Verify {
        model: PathBuf,
        family: PathBuf,
        /// Run every check.
        #[arg(long, conflicts_with = "check")]
        all: bool,
        /// Run the named checks.
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(CHECKS))]
        check: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
}

fn emit(out: &Output, common: &Common) -> Result<(), InputError> {
    for w in &out.warnings {
        eprintln!("{w}");
    }
    let text = out.render(common.out);
    match &common.output {
        Some(path) => fs::write(path, text).map_err(|source| InputError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pairs(n: usize, p: Option<usize>, k: Option<usize>) -> Result<Vec<(usize, usize)>, InputError> {
    let ks: Vec<usize> = match k {
        Some(k) if k > 2 * n => return Err(InputError::Config(format!("k = {k} exceeds 2n = {}", 2 * n))),
        Some(k) => vec![k],
        None => (0..=2 * n).collect(),
    };
    let mut out = Vec::new();
    for k in ks {
        match p {
            Some(p) if p <= k && p <= n => out.push((p, k)),
            Some(_) => {}
            None => out.extend((0..=k.min(n)).map(|p| (p, k))),
        }
    }
    if out.is_empty() {
        return Err(InputError::Config("no admissible (p, k) with p <= k and p <= n".into()));
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<u8, InputError> {
    match cli.command {
        Command::Cohomology { model, theory, common } => {
            let cfg = common.config();
            cfg.validate()?;
            let m = load_model(&model)?;
            emit(&commands::cohomology(&m, theory, &cfg), &common)?;
            Ok(EXIT_OK)
        }
        Command::DdbarCheck { model, common } => {
            let cfg = common.config();
            cfg.validate()?;
            let m = load_model(&model)?;
            emit(&commands::ddbar(&m, &cfg), &common)?;
            Ok(EXIT_OK)
        }
        Command::Deform { model, family, common } => {
            let cfg = common.config();
            cfg.validate()?;
            let m = load_model(&model)?;
            let f = load_family(&family, &m, cfg.order)?;
            emit(&commands::deform(m, f, &cfg), &common)?;
            Ok(EXIT_OK)
        }
        Command::Period {
            model,
            family,
            p,
            k,
            common,
        } => {
            let cfg = common.config();
            cfg.validate()?;
            let m = load_model(&model)?;
            let f = load_family(&family, &m, cfg.order)?;
            let pairs = pairs(m.n(), p, k)?;
            emit(&commands::period(m, f, &pairs, &cfg), &common)?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            model,
            family,
            all,
            check,
            common,
        } => {
            let cfg = common.config();
            cfg.validate()?;
            if !all && check.is_empty() {
                return Err(InputError::Config("pass --all or at least one --check".into()));
            }
            let m = load_model(&model)?;
            let f = load_family(&family, &m, cfg.order)?;
            let names: Vec<&str> = if all {
                CHECKS.to_vec()
            } else {
                check.iter().map(String::as_str).collect()
            };
            let (out, ok) = commands::verify(m, f, &names, &cfg);
            emit(&out, &common)?;
            Ok(if ok { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
    }
}

/// Parses `args` and runs; returns the process exit code.
pub fn main<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}
