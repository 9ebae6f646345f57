//! Command-line front end: flag and file configuration, dispatch to the
//! library operations and scenario runners, output management.

// `!(x > 0.0)` style guards also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
mod ops;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use qcline::experiments::{canonical_name, run_scenario, MapChoice, SCENARIOS};
use qcline::homeo::catalog_names;

pub use config::{CommandKind, ConfigError, RunConfig, OPERATIONS};

/// Exit code when every verdict passed or was informational.
pub const EXIT_OK: i32 = 0;
/// Exit code when at least one verdict failed.
pub const EXIT_FAIL: i32 = 1;
/// Exit code for configuration and runtime errors.
pub const EXIT_ERROR: i32 = 2;

/// Default output directory when neither `--outdir` nor `QCLINE_OUTDIR` is set.
pub const DEFAULT_OUTDIR: &str = "qcline-out";

#[derive(Debug, Parser)]
#[command(
    name = "qcline",
    version,
    about = "Diagnostics for homeomorphisms of the line and their quasiconformal extensions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Quasisymmetry, doubling and continuity diagnostics of a map
    Homeo(OpArgs),
    /// Mean oscillation and weight tests of log h'
    Oscillation(OpArgs),
    /// Dilatation fields of the Beurling-Ahlfors or barycentric extension
    Extend(OpArgs),
    /// Carleson profiles of extension dilatations
    Carleson(OpArgs),
    /// Run a named scenario
    Experiment(OpArgs),
    /// Catalog of named homeomorphisms
    Catalog(OpArgs),
    /// Run whatever the configuration file's [run] section names
    Run(CommonArgs),
}

#[derive(Debug, Args)]
pub struct OpArgs {
    /// Operation or scenario name
    pub name: String,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// Configuration file; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Catalog name for g
    #[arg(long)]
    pub g: Option<String>,
    /// Parameter of g as key=value (repeatable)
    #[arg(long = "g-param")]
    pub g_param: Vec<String>,
    /// Catalog name for h
    #[arg(long)]
    pub h: Option<String>,
    /// Parameter of h as key=value (repeatable)
    #[arg(long = "h-param")]
    pub h_param: Vec<String>,
    /// Scan window `a,b`
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
    /// Decreasing comma-separated scales
    #[arg(long)]
    pub scales: Option<String>,
    /// Grid window `a,b`
    #[arg(long = "grid-window", allow_hyphen_values = true)]
    pub grid_window: Option<String>,
    /// Grid top height Y
    #[arg(long)]
    pub top: Option<String>,
    /// Number of dyadic grid levels K
    #[arg(long)]
    pub levels: Option<String>,
    /// Skip the grid-doubling comparison
    #[arg(long = "no-grid-check")]
    pub no_grid_check: bool,
    #[arg(long = "n-min")]
    pub n_min: Option<String>,
    #[arg(long = "n-max")]
    pub n_max: Option<String>,
    /// Threshold override as key=value (repeatable)
    #[arg(long)]
    pub threshold: Vec<String>,
    /// Output directory (falls back to QCLINE_OUTDIR)
    #[arg(long)]
    pub outdir: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<String>,
    /// Worker threads (default: available cores)
    #[arg(long)]
    pub threads: Option<String>,
    /// Print the effective configuration and exit
    #[arg(long = "print-config")]
    pub print_config: bool,
}

/// Text appended to `--help`: every scenario and operation.
pub fn help_listing() -> String {
    let mut s = String::from("Scenarios (qcline experiment <name>):\n");
    for (n, d) in SCENARIOS {
        s.push_str(&format!("  {n:<22}{d}\n"));
    }
    s.push_str("\nOperations:\n");
    for (group, ops) in OPERATIONS {
        s.push_str(&format!("  qcline {group:<12}{}\n", ops.join(", ")));
    }
    s.push_str("  qcline catalog     list\n");
    s.push_str("\nExit codes: 0 pass, 1 failed verdict, 2 error.\n");
    s
}

fn flag_err(flag: &str, message: impl std::fmt::Display) -> ConfigError {
    ConfigError::Parse {
        context: format!("--{flag}"),
        message: message.to_string(),
    }
}

fn set_flag(
    cfg: &mut RunConfig,
    section: &str,
    key: &str,
    flag: &str,
    v: &Option<String>,
) -> Result<(), ConfigError> {
    match v {
        Some(v) => cfg.set(section, key, v, &format!("--{flag}")),
        None => Ok(()),
    }
}

fn apply_map(
    slot: &mut Option<MapChoice>,
    name: &Option<String>,
    params: &[String],
    flag: &str,
) -> Result<(), ConfigError> {
    if let Some(n) = name {
        let keep = slot
            .take()
            .filter(|m| &m.name == n)
            .map(|m| m.params)
            .unwrap_or_default();
        *slot = Some(MapChoice {
            name: n.clone(),
            params: keep,
        });
    }
    for p in params {
        let ctx = format!("--{flag}-param");
        let (k, v) = config::parse_pair(&ctx, p)?;
        slot.as_mut()
            .ok_or_else(|| {
                flag_err(
                    &format!("{flag}-param"),
                    format!("no map selected for {flag}"),
                )
            })?
            .params
            .insert(k, v);
    }
    Ok(())
}

/// Build the effective configuration: file first, then flags.
pub fn build_config(
    kind: Option<CommandKind>,
    name: Option<&str>,
    a: &CommonArgs,
) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    if let Some(p) = &a.config {
        cfg.merge_file(p)?;
    }
    if let Some(k) = kind {
        cfg.command = Some(k);
    }
    if let Some(n) = name {
        cfg.name = Some(n.to_string());
    }
    let e = &mut cfg.experiment;
    apply_map(&mut e.g, &a.g, &a.g_param, "g")?;
    apply_map(&mut e.h, &a.h, &a.h_param, "h")?;
    set_flag(&mut cfg, "scan", "window", "window", &a.window)?;
    set_flag(&mut cfg, "scan", "scales", "scales", &a.scales)?;
    set_flag(&mut cfg, "scan", "n_min", "n-min", &a.n_min)?;
    set_flag(&mut cfg, "scan", "n_max", "n-max", &a.n_max)?;
    set_flag(&mut cfg, "grid", "window", "grid-window", &a.grid_window)?;
    set_flag(&mut cfg, "grid", "top", "top", &a.top)?;
    set_flag(&mut cfg, "grid", "levels", "levels", &a.levels)?;
    set_flag(&mut cfg, "run", "seed", "seed", &a.seed)?;
    set_flag(&mut cfg, "run", "threads", "threads", &a.threads)?;
    if a.no_grid_check {
        cfg.experiment.grid_check = false;
    }
    for t in &a.threshold {
        let (k, v) = config::parse_pair("--threshold", t)?;
        cfg.set("thresholds", &k, &v.to_string(), "--threshold")?;
    }
    if let Some(o) = &a.outdir {
        cfg.outdir = Some(o.clone());
    }
    Ok(cfg)
}

/// `--outdir`, then the file, then `QCLINE_OUTDIR`, then [`DEFAULT_OUTDIR`].
pub fn resolve_outdir(cfg: &RunConfig) -> PathBuf {
    cfg.outdir
        .clone()
        .or_else(|| std::env::var_os("QCLINE_OUTDIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTDIR))
}

/// Run a validated configuration; report paths go to `out`.
pub fn dispatch(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, String> {
    cfg.validate().map_err(|e| e.to_string())?;
    let kind = cfg.command.ok_or("no command given")?;
    let outdir = resolve_outdir(cfg);
    let threads = cfg.threads.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    });
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| e.to_string())?;
    let name = cfg.name.clone().unwrap_or_default();
    let (code, lines) = pool.install(|| -> Result<(i32, Vec<String>), String> {
        let mut lines = Vec::new();
        let code = match kind {
            CommandKind::Catalog => {
                for (n, p, d) in catalog_names() {
                    lines.push(format!("{n:<18}{p:<26}{d}"));
                }
                EXIT_OK
            }
            CommandKind::Experiment => {
                let scenario = canonical_name(&name).ok_or(format!("unknown scenario `{name}`"))?;
                let report = run_scenario(scenario, &cfg.experiment).map_err(|e| e.to_string())?;
                let path = report.write(&outdir).map_err(|e| e.to_string())?;
                lines.push(path.display().to_string());
                for (k, v) in &report.verdicts {
                    lines.push(format!("{k}: {:?} ({})", v.status, v.detail));
                }
                if report.passed() {
                    EXIT_OK
                } else {
                    EXIT_FAIL
                }
            }
            _ => {
                let paths = ops::run_operation(kind, &name, &cfg.experiment, &outdir)
                    .map_err(|e| e.to_string())?;
                lines.extend(paths.iter().map(|p| p.display().to_string()));
                EXIT_OK
            }
        };
        Ok((code, lines))
    })?;
    for l in lines {
        let _ = writeln!(out, "{l}");
    }
    Ok(code)
}

/// Full command-line entry point returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cmd = Cli::command().after_help(help_listing());
    let matches = match cmd.try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return EXIT_ERROR;
        }
    };
    let (kind, name, common) = match &cli.command {
        Cmd::Homeo(a) => (Some(CommandKind::Homeo), Some(a.name.as_str()), &a.common),
        Cmd::Oscillation(a) => (
            Some(CommandKind::Oscillation),
            Some(a.name.as_str()),
            &a.common,
        ),
        Cmd::Extend(a) => (Some(CommandKind::Extend), Some(a.name.as_str()), &a.common),
        Cmd::Carleson(a) => (
            Some(CommandKind::Carleson),
            Some(a.name.as_str()),
            &a.common,
        ),
        Cmd::Experiment(a) => (
            Some(CommandKind::Experiment),
            Some(a.name.as_str()),
            &a.common,
        ),
        Cmd::Catalog(a) => (Some(CommandKind::Catalog), Some(a.name.as_str()), &a.common),
        Cmd::Run(c) => (None, None, c),
    };
    let cfg = match build_config(kind, name, common) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_ERROR;
        }
    };
    if common.print_config {
        let _ = write!(out, "{}", cfg.echo());
        return EXIT_OK;
    }
    match dispatch(&cfg, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}
