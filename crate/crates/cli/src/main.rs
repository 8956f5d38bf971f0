use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hyperbaker::curve::{parse_curve_json, CurveInput};
use hyperbaker::error::HarnessError;
use hyperbaker::harness::report::{canonical_string, emit_report};
use hyperbaker::harness::{self, parse_precision, parse_points_json, run_suite, RunConfig, Suite};
use hyperbaker::numerics::periods::Precision;
use serde_json::Value;

/// Baker functions and the entire function H on hyperelliptic curves.
#[derive(Parser, Debug)]
#[command(name = "hyperbaker", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Baker matrix P for a symbolic or concrete divisor
    Baker {
        #[command(flatten)]
        src: Source,
        /// divisor file: {"points": [x, ...]} or {"points": [{"x": .., "y": ..}, ...]}
        #[arg(long)]
        points: Option<PathBuf>,
    },
    /// Omega, chi and the kappa forms
    Omega {
        #[command(flatten)]
        src: Source,
    },
    /// Genus-1 expansion of H
    Expand {
        #[command(flatten)]
        src: Source,
        /// highest power of v kept
        #[arg(long, default_value_t = 12)]
        order: usize,
    },
    /// Period matrices
    Periods {
        #[arg(long)]
        curve: PathBuf,
        #[command(flatten)]
        prec: PrecisionArg,
    },
    /// Run a verification suite
    Verify {
        /// curve file; a random curve of --genus derived from --seed otherwise
        #[arg(long)]
        curve: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        genus: usize,
        /// also run the checks on a generic curve of this genus
        #[arg(long)]
        symbolic: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "all")]
        suite: String,
        #[command(flatten)]
        prec: PrecisionArg,
        /// where to write the JSON report
        #[arg(long)]
        report: Option<PathBuf>,
        /// tolerance override NAME=VALUE, repeatable
        #[arg(long = "tolerance", value_name = "NAME=VALUE")]
        tolerances: Vec<String>,
    },
}

#[derive(Args, Debug)]
struct Source {
    /// curve file (JSON)
    #[arg(long, conflicts_with = "symbolic")]
    curve: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    genus: usize,
    /// generic curve of --genus with symbolic coefficients
    #[arg(long)]
    symbolic: bool,
}

#[derive(Args, Debug)]
struct PrecisionArg {
    /// double or extended
    #[arg(long, env = "HYPERBAKER_PRECISION", default_value = "double")]
    precision: String,
}

impl PrecisionArg {
    fn get(&self) -> Result<Precision, HarnessError> {
        parse_precision(&self.precision)
    }
}

fn read(path: &Path) -> Result<String, HarnessError> {
    Ok(std::fs::read_to_string(path)?)
}

fn load_curve(path: &Path) -> Result<CurveInput, HarnessError> {
    parse_curve_json(&read(path)?)
}

impl Source {
    fn load(&self) -> Result<Option<CurveInput>, HarnessError> {
        if !(1..=3).contains(&self.genus) {
            return Err(HarnessError::Config(format!("genus {} is outside 1..=3", self.genus)));
        }
        self.curve.as_deref().map(load_curve).transpose()
    }
}

fn parse_tolerances(raw: &[String]) -> Result<BTreeMap<String, f64>, HarnessError> {
    raw.iter()
        .map(|s| {
            let (k, v) = s
                .split_once('=')
                .ok_or_else(|| HarnessError::Config(format!("tolerance {s:?} is not NAME=VALUE")))?;
            let x: f64 = v.trim().parse().map_err(|_| HarnessError::Config(format!("tolerance {s:?}: bad number")))?;
            Ok((k.trim().to_string(), x))
        })
        .collect()
}

fn print_json(v: &Value) {
    println!("{}", canonical_string(v));
}

fn run(cli: Cli) -> Result<bool, HarnessError> {
    match cli.command {
        Command::Baker { src, points } => {
            let curve = src.load()?;
            let v = match (points, &curve) {
                (Some(p), Some(c)) => harness::baker_points_json(c, &parse_points_json(&read(&p)?)?)?,
                (Some(_), None) => return Err(HarnessError::Config("--points needs --curve".into())),
                (None, _) => harness::baker_json(curve.as_ref(), src.genus)?,
            };
            print_json(&v);
            Ok(true)
        }
        Command::Omega { src } => {
            print_json(&harness::omega_json(src.load()?.as_ref(), src.genus)?);
            Ok(true)
        }
        Command::Expand { src, order } => {
            print_json(&harness::expand_json(src.load()?.as_ref(), order)?);
            Ok(true)
        }
        Command::Periods { curve, prec } => {
            let precision = prec.get()?;
            print_json(&harness::periods_json(&load_curve(&curve)?, precision)?);
            Ok(true)
        }
        Command::Verify { curve, genus, symbolic, seed, suite, prec, report, tolerances } => {
            let mut cfg = RunConfig::new(suite.parse::<Suite>()?, genus, seed);
            cfg.symbolic = symbolic;
            cfg.precision = prec.get()?;
            cfg.tolerances = parse_tolerances(&tolerances)?;
            if let Some(path) = curve {
                cfg = cfg.with_input(load_curve(&path)?);
            }
            let r = run_suite(&cfg)?;
            for c in &r.checks {
                println!("{}", c.line());
            }
            let failed = r.failures().count();
            println!("{} checks, {} failed, {:.2} s", r.checks.len(), failed, r.elapsed);
            if let Some(path) = report {
                emit_report(&r, &path)?;
            }
            Ok(r.all_pass())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("hyperbaker: {e}");
            ExitCode::from(2)
        }
    }
}
