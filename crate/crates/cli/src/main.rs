//! `pucci`: command-line driver for the pucci-core solvers and studies.

mod commands;
mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use commands::Outcome;
use config::{apply_override, load, set_path, typed, RawConfig};
use output::{json_string, OutDir};
use pucci_core::{Error, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "pucci", version, about = "Pucci extremal operators: solvers and asymptotic studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// JSON config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config leaf, e.g. `--set params.Lambda=2`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory (default `out/<command>`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Profile integrals f, g with ODE residuals.
    Special(Common),
    /// Exact radial solutions in a ball or outside it.
    Radial(Common),
    /// Grid solution of the singular elliptic problem.
    SolveElliptic(Common),
    /// Grid solution of the parabolic problem.
    SolveParabolic(Common),
    /// Discrepancy sweep toward the distance limit with rate fits.
    Varadhan(Common),
    /// Scaled q-means on a touching ball and their limit.
    Qmean(Common),
    /// Limit constants c_{N,q} and C_{N,q}.
    Constants {
        #[command(flatten)]
        common: Common,
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long)]
        q: Option<String>,
    },
    /// Seeded invariant suites; nonzero exit on any failure.
    Selftest {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
    },
}

const EXIT_FAILED: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_NONCONVERGED: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonConvergence { .. } => EXIT_NONCONVERGED,
        Error::Io(_) | Error::Fit(_) => EXIT_FAILED,
        _ => EXIT_INVALID,
    }
}

fn resolve(common: &Common, extra: Vec<(&str, Value)>) -> Result<RawConfig> {
    let mut raw = load(common.config.as_deref())?;
    for (k, v) in extra {
        set_path(&mut raw.value, k, v)?;
    }
    for s in &common.set {
        apply_override(&mut raw.value, s)?;
    }
    Ok(raw)
}

/// Pulls the optional `output` key out of the config before typed parsing.
fn take_output(raw: &mut RawConfig) -> Result<Option<PathBuf>> {
    let Some(map) = raw.value.as_object_mut() else {
        return Ok(None);
    };
    match map.remove("output") {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(raw.base_dir.join(s))),
        Some(other) => Err(Error::Input(format!("config field 'output': expected a path string, got {other}"))),
    }
}

struct Prepared<T> {
    cfg: T,
    resolved: Value,
    base_dir: PathBuf,
    out: PathBuf,
}

fn prepare<T: DeserializeOwned + Serialize>(
    name: &str,
    common: &Common,
    extra: Vec<(&str, Value)>,
    validate: impl Fn(&T) -> Result<()>,
) -> Result<Prepared<T>> {
    let mut raw = resolve(common, extra)?;
    let from_config = take_output(&mut raw)?;
    let cfg: T = typed(&raw.value)?;
    validate(&cfg)?;
    let out = common
        .out
        .clone()
        .or(from_config)
        .unwrap_or_else(|| Path::new("out").join(name));
    Ok(Prepared {
        resolved: serde_json::to_value(&cfg)?,
        cfg,
        base_dir: raw.base_dir,
        out,
    })
}

fn with_outdir<T: DeserializeOwned + Serialize>(
    name: &str,
    common: &Common,
    extra: Vec<(&str, Value)>,
    validate: impl Fn(&T) -> Result<()>,
    run: impl FnOnce(&T, &Path, &mut OutDir) -> Result<Outcome>,
) -> Result<Outcome> {
    let p = prepare(name, common, extra, validate)?;
    let mut out = OutDir::create(&p.out)?;
    let outcome = run(&p.cfg, &p.base_dir, &mut out)?;
    out.finish(name, &p.resolved)?;
    Ok(outcome)
}

fn dispatch(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Special(c) => with_outdir("special", &c, vec![], config::SpecialConfig::validate, |cfg, _, out| {
            commands::special(cfg, out)
        }),
        Command::Radial(c) => with_outdir("radial", &c, vec![], config::RadialConfig::validate, |cfg, _, out| {
            commands::radial(cfg, out)
        }),
        Command::SolveElliptic(c) => with_outdir(
            "solve-elliptic",
            &c,
            vec![],
            config::EllipticConfig::validate,
            commands::solve_elliptic_cmd,
        ),
        Command::SolveParabolic(c) => with_outdir(
            "solve-parabolic",
            &c,
            vec![],
            config::ParabolicConfig::validate,
            commands::solve_parabolic_cmd,
        ),
        Command::Varadhan(c) => with_outdir("varadhan", &c, vec![], config::VaradhanConfig::validate, commands::varadhan),
        Command::Qmean(c) => with_outdir("qmean", &c, vec![], config::QMeanConfig::validate, commands::qmean),
        Command::Constants { common, n, q } => {
            let mut extra = Vec::new();
            if let Some(n) = n {
                extra.push(("N", Value::from(n)));
            }
            if let Some(q) = q {
                extra.push(("q", serde_json::from_str(&q).unwrap_or(Value::String(q))));
            }
            let mut raw = resolve(&common, extra)?;
            let from_config = take_output(&mut raw)?;
            let cfg: config::ConstantsConfig = typed(&raw.value)?;
            match common.out.clone().or(from_config) {
                Some(dir) => {
                    let mut out = OutDir::create(&dir)?;
                    let outcome = commands::constants(&cfg, Some(&mut out))?;
                    out.finish("constants", &serde_json::to_value(&cfg)?)?;
                    Ok(outcome)
                }
                None => commands::constants(&cfg, None),
            }
        }
        Command::Selftest { common, seed } => {
            let extra = seed.map(|s| vec![("seed", Value::from(s))]).unwrap_or_default();
            with_outdir("selftest", &common, extra, |_: &config::SelftestConfig| Ok(()), |cfg, _, out| {
                commands::selftest(cfg, out)
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(Outcome::Done(v)) => {
            print!("{}", json_string(&v).unwrap_or_default());
            ExitCode::SUCCESS
        }
        Ok(Outcome::Failed(v)) => {
            print!("{}", json_string(&v).unwrap_or_default());
            ExitCode::from(EXIT_FAILED)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
