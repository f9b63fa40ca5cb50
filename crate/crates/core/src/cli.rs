//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a verification or statistical check failed,
//! 2 bad usage or unreadable input.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::chain::Ball;
use crate::construct::{self, ConstructionConfig, Mode};
use crate::enumerate::{self, Engine};
use crate::error::{Error, Result};
use crate::event::EventSpec;
use crate::experiment::{self, ExperimentManifest, Outputs, RunSettings, LIMIT_NOTE};
use crate::limits;
use crate::par;
use crate::rational::{self, parse_rational, ratio, Rational};
use crate::simulate::{self, SimulationConfig, DEFAULT_SEED};
use crate::target::TargetSet;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "supertask", version, about = "Chains, exact enumeration and simulation for the infinite-lottery supertask")]
pub struct Cli {
    /// Worker threads for enumeration and simulation (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a density-steering chain.
    Construct {
        /// Target set as inline JSON or a path to a JSON file.
        #[arg(long)]
        target: String,
        /// Target density, e.g. 1/3 or 0.9.
        #[arg(long)]
        p: String,
        #[arg(long)]
        steps: usize,
        /// paper | greedy
        #[arg(long, default_value = "paper")]
        mode: Mode,
        #[arg(long, default_value = "chain.json")]
        out: PathBuf,
        /// Also write the density trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Exact density x_n(S) by enumerating all n! removal orders.
    Density {
        #[arg(long)]
        chain: PathBuf,
        #[arg(long)]
        event: String,
        #[arg(long)]
        n: usize,
    },
    /// Per-history check of the conditional-removal identity.
    Verify {
        #[arg(long)]
        chain: PathBuf,
        #[arg(long)]
        event: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        /// Include every history row in the output.
        #[arg(long)]
        full: bool,
    },
    /// Exact probability that a ball is still in the urn after god k.
    Survival {
        #[arg(long)]
        chain: PathBuf,
        #[arg(long)]
        ball: Ball,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
    },
    /// Monte-Carlo final-ball distribution.
    Simulate {
        #[arg(long)]
        chain: PathBuf,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        target: Option<String>,
        /// Truncate the chain to its first n balls first.
        #[arg(long)]
        n: Option<usize>,
        /// Write per-ball counts as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Monte-Carlo against exact enumeration for every final ball.
    Crosscheck {
        #[arg(long)]
        chain: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Convergence diagnostics for a density trace.
    Limits {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, default_value = "1/10")]
        window: String,
        #[arg(long, default_value = "1/100")]
        tol: String,
    },
    /// Run an experiment manifest and write its report.
    Run {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Steer residue classes mod m to the given densities.
    ResidueDemo {
        #[arg(long)]
        m: u64,
        /// Repeatable.
        #[arg(long = "p", required = true)]
        p: Vec<String>,
        /// Only this residue class (default: all of them).
        #[arg(long)]
        class: Option<u64>,
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value = "1/10")]
        window: String,
        #[arg(long, default_value = "1/100")]
        tol: String,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn run_from<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

pub fn main() -> i32 {
    run_from(std::env::args_os(), &mut io::stdout().lock())
}

fn emit(out: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Inline JSON when it looks like an object, otherwise a file path.
fn json_arg<T: serde::de::DeserializeOwned>(arg: &str) -> Result<T> {
    let text = if arg.trim_start().starts_with('{') { arg.to_string() } else { fs::read_to_string(arg)? };
    Ok(serde_json::from_str(&text)?)
}

fn exact(r: &Rational) -> serde_json::Value {
    json!({ "exact": rational::format_rational(r), "decimal": rational::to_f64(r) })
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    let engine = Engine { workers: cli.workers.unwrap_or_else(par::default_workers), cap: enumerate::cap() };
    match cli.command {
        Command::Construct { target, p, steps, mode, out: path, trace } => {
            let target: TargetSet = json_arg(&target)?;
            let config = ConstructionConfig::new(target.clone(), parse_rational(&p)?, steps, mode)?;
            let chain = construct::construct_chain(&config)?;
            experiment::write_chain(&path, &chain)?;
            if let Some(t) = &trace {
                experiment::write_trace(fs::File::create(t)?, &chain, &target)?;
            }
            let last = construct::density_trace(&chain, &target).pop().expect("chain is nonempty");
            emit(out, &json!({
                "chain": path,
                "trace": trace,
                "length": chain.len(),
                "final_density": exact(&last),
            }))?;
            Ok(EXIT_OK)
        }
        Command::Density { chain, event, n } => {
            let chain = experiment::read_chain(&chain)?;
            let event: EventSpec = json_arg(&event)?;
            let report = engine.density(&chain, &event, n)?;
            let mut v = serde_json::to_value(&report)?;
            v["decimal"] = json!(report.decimal());
            emit(out, &v)?;
            Ok(EXIT_OK)
        }
        Command::Verify { chain, event, k, n, full } => {
            let chain = experiment::read_chain(&chain)?;
            let event: EventSpec = json_arg(&event)?;
            if event.level() != k {
                return Err(Error::Config(format!("--k {k} but the event sits at level {}", event.level())));
            }
            let check = engine.verify_constraint(&chain, &event, n)?;
            let failures: Vec<_> = check.failures().cloned().collect();
            let mut v = json!({
                "k": check.k,
                "n": check.n,
                "event": check.event,
                "verdict": check.verdict,
                "histories": check.per_history.len(),
                "by_j": check.by_j(),
                "failures": failures,
            });
            if full {
                v["per_history"] = serde_json::to_value(&check.per_history)?;
            }
            emit(out, &v)?;
            Ok(if check.passed() { EXIT_OK } else { EXIT_VERIFY })
        }
        Command::Survival { chain, ball, k, n } => {
            let chain = experiment::read_chain(&chain)?;
            let value = engine.survival_density(&chain, ball, k, n)?;
            let expected = ratio(k as u64, n as u64);
            let holds = value == expected;
            emit(out, &json!({
                "ball": ball, "k": k, "n": n,
                "value": exact(&value),
                "expected_k_over_n": rational::format_rational(&expected),
                "holds": holds,
            }))?;
            Ok(if holds { EXIT_OK } else { EXIT_VERIFY })
        }
        Command::Simulate { chain, trials, seed, target, n, csv: csv_path } => {
            let mut chain = experiment::read_chain(&chain)?;
            if let Some(n) = n {
                chain = chain.truncate(n)?;
            }
            let mut config = SimulationConfig::new(chain, trials, seed)?;
            if let Some(t) = target {
                config = config.with_target(json_arg(&t)?);
            }
            let report = simulate::simulate_with_workers(&config, engine.workers)?;
            if let Some(path) = csv_path {
                let mut w = csv::Writer::from_path(path)?;
                for c in &report.counts {
                    w.serialize(c)?;
                }
                w.flush()?;
            }
            let mut v = serde_json::to_value(&report)?;
            v["provenance"] = json!("sampled");
            emit(out, &v)?;
            Ok(EXIT_OK)
        }
        Command::Crosscheck { chain, n, trials, seed } => {
            let chain = experiment::read_chain(&chain)?;
            let x = simulate::crosscheck_with(&chain, n, trials, seed, engine)?;
            emit(out, &x)?;
            Ok(if x.pass { EXIT_OK } else { EXIT_VERIFY })
        }
        Command::Limits { trace, window, tol } => {
            let seq = experiment::read_trace(fs::File::open(&trace)?)?;
            let d = limits::diagnose_named(
                &trace.display().to_string(),
                &seq,
                &parse_rational(&window)?,
                &parse_rational(&tol)?,
            )?;
            let mut v = serde_json::to_value(&d)?;
            v["note"] = json!(LIMIT_NOTE);
            emit(out, &v)?;
            Ok(EXIT_OK)
        }
        Command::Run { manifest } => {
            let m = ExperimentManifest::load(&manifest)?;
            let base = manifest.parent().unwrap_or(Path::new("."));
            let outputs = Outputs::to_dir(base.join(&m.out_dir));
            let report = experiment::run_experiment(&m, &outputs, engine)?;
            emit(out, &report)?;
            Ok(if report.checks.all_ok() { EXIT_OK } else { EXIT_VERIFY })
        }
        Command::ResidueDemo { m, p, class, steps, n, trials, seed, window, tol, out_dir } => {
            let ps = p.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
            let settings = RunSettings {
                steps,
                mode: Mode::PaperRule,
                n,
                trials,
                seed,
                window: parse_rational(&window)?,
                tol: parse_rational(&tol)?,
            };
            let outputs = Outputs { dir: out_dir };
            let report = match class {
                Some(r) => experiment::residue_demo_for(m, &[TargetSet::residue(m, r)?], &ps, &settings, &outputs, engine)?,
                None => experiment::residue_demo(m, &ps, &settings, &outputs, engine)?,
            };
            emit(out, &report)?;
            Ok(if report.checks.all_ok() { EXIT_OK } else { EXIT_VERIFY })
        }
    }
}
