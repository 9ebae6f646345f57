//! Run configuration: a flat `key = value` file with `[section]` headers,
//! overridden by command-line flags.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use qcline::experiments::{canonical_name, ExperimentConfig, MapChoice};
use qcline::homeo::make_catalog;
use qcline::Interval;
use thiserror::Error;

/// Operation groups and the operations each exposes.
pub const OPERATIONS: [(&str, &[&str]); 4] = [
    (
        "homeo",
        &[
            "qs-constant",
            "symmetric-profile",
            "doubling",
            "modulus",
            "sample",
        ],
    ),
    ("oscillation", &["vmo-profile", "bmo-norm", "ainf"]),
    ("extend", &["ba-field", "de-field"]),
    ("carleson", &["ba-profile", "de-profile"]),
];

const THRESHOLD_KEYS: [&str; 7] = [
    "decay",
    "plateau",
    "symmetric",
    "cayley_plateau",
    "grid_tolerance",
    "ratio_factor",
    "box_factor",
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{context}: {message}")]
    Parse { context: String, message: String },
    #[error("invalid configuration: {}", .keys.join(", "))]
    Validation { keys: Vec<String> },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

fn parse_err(context: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Parse {
        context: context.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Experiment,
    Homeo,
    Oscillation,
    Extend,
    Carleson,
    Catalog,
}

impl CommandKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandKind::Experiment => "experiment",
            CommandKind::Homeo => "homeo",
            CommandKind::Oscillation => "oscillation",
            CommandKind::Extend => "extend",
            CommandKind::Carleson => "carleson",
            CommandKind::Catalog => "catalog",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "experiment" => CommandKind::Experiment,
            "homeo" => CommandKind::Homeo,
            "oscillation" => CommandKind::Oscillation,
            "extend" => CommandKind::Extend,
            "carleson" => CommandKind::Carleson,
            "catalog" => CommandKind::Catalog,
            _ => return None,
        })
    }
}

/// Everything a run needs. `None` fields fall back to per-command defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub command: Option<CommandKind>,
    pub name: Option<String>,
    pub experiment: ExperimentConfig,
    pub outdir: Option<PathBuf>,
    pub threads: Option<usize>,
}

fn parse_f64(ctx: &str, v: &str) -> Result<f64, ConfigError> {
    v.trim()
        .parse::<f64>()
        .map_err(|_| parse_err(ctx, format!("`{v}` is not a number")))
}

fn parse_usize(ctx: &str, v: &str) -> Result<usize, ConfigError> {
    v.trim()
        .parse::<usize>()
        .map_err(|_| parse_err(ctx, format!("`{v}` is not a nonnegative integer")))
}

fn parse_u64(ctx: &str, v: &str) -> Result<u64, ConfigError> {
    let v = v.trim();
    let r = match v.strip_prefix("0x") {
        Some(h) => u64::from_str_radix(h, 16),
        None => v.parse::<u64>(),
    };
    r.map_err(|_| parse_err(ctx, format!("`{v}` is not an unsigned integer")))
}

fn parse_bool(ctx: &str, v: &str) -> Result<bool, ConfigError> {
    match v.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(parse_err(ctx, format!("`{other}` is not a boolean"))),
    }
}

/// Comma-separated numbers.
pub fn parse_list(ctx: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    v.split(',').map(|s| parse_f64(ctx, s)).collect()
}

/// `a, b` as an interval; ordering is checked during validation.
pub fn parse_window(ctx: &str, v: &str) -> Result<Interval, ConfigError> {
    match parse_list(ctx, v)?.as_slice() {
        [a, b] => Ok(Interval { a: *a, b: *b }),
        _ => Err(parse_err(ctx, "expected two comma-separated endpoints")),
    }
}

/// `key=value` as used by `--g-param` and `--threshold`.
pub fn parse_pair(ctx: &str, v: &str) -> Result<(String, f64), ConfigError> {
    let (k, val) = v
        .split_once('=')
        .ok_or_else(|| parse_err(ctx, format!("`{v}` is not of the form key=value")))?;
    Ok((k.trim().to_string(), parse_f64(ctx, val)?))
}

impl RunConfig {
    /// Apply one `key = value` entry of `section`.
    pub fn set(
        &mut self,
        section: &str,
        key: &str,
        value: &str,
        ctx: &str,
    ) -> Result<(), ConfigError> {
        let e = &mut self.experiment;
        match (section, key) {
            ("run", "command") => {
                self.command = Some(
                    CommandKind::parse(value.trim())
                        .ok_or_else(|| parse_err(ctx, format!("unknown command `{value}`")))?,
                )
            }
            ("run", "name") => self.name = Some(value.trim().to_string()),
            ("run", "outdir") => self.outdir = Some(PathBuf::from(value.trim())),
            ("run", "seed") => e.seed = parse_u64(ctx, value)?,
            ("run", "threads") => self.threads = Some(parse_usize(ctx, value)?),
            ("g" | "h", _) => {
                let slot = if section == "g" { &mut e.g } else { &mut e.h };
                if key == "name" {
                    let params = slot.take().map(|m| m.params).unwrap_or_default();
                    *slot = Some(MapChoice {
                        name: value.trim().to_string(),
                        params,
                    });
                } else {
                    let m = slot.as_mut().ok_or_else(|| {
                        parse_err(ctx, format!("`{key}` given before `name` in [{section}]"))
                    })?;
                    m.params.insert(key.to_string(), parse_f64(ctx, value)?);
                }
            }
            ("scan", "window") => e.window = Some(parse_window(ctx, value)?),
            ("scan", "scales") => e.scales = Some(parse_list(ctx, value)?),
            ("scan", "n_min") => e.n_min = parse_usize(ctx, value)? as u32,
            ("scan", "n_max") => e.n_max = parse_usize(ctx, value)? as u32,
            ("grid", "window") => e.grid.window = parse_window(ctx, value)?,
            ("grid", "top") => e.grid.top = parse_f64(ctx, value)?,
            ("grid", "levels") => e.grid.levels = parse_usize(ctx, value)?,
            ("grid", "check") => e.grid_check = parse_bool(ctx, value)?,
            ("thresholds", k) => {
                let v = parse_f64(ctx, value)?;
                let t = &mut e.thresholds;
                match k {
                    "decay" => t.decay = v,
                    "plateau" => t.plateau = v,
                    "symmetric" => t.symmetric = v,
                    "cayley_plateau" => t.cayley_plateau = v,
                    "grid_tolerance" => t.grid_tolerance = v,
                    "ratio_factor" => t.ratio_factor = v,
                    "box_factor" => t.box_factor = v,
                    _ => return Err(parse_err(ctx, format!("unknown key `{k}` in [thresholds]"))),
                }
            }
            _ => {
                return Err(parse_err(
                    ctx,
                    format!("unknown key `{key}` in [{section}]"),
                ))
            }
        }
        Ok(())
    }

    /// Parse configuration text; `origin` labels error locations.
    pub fn parse_str(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        cfg.merge_str(text, origin)?;
        Ok(cfg)
    }

    /// Apply configuration text on top of `self`.
    pub fn merge_str(&mut self, text: &str, origin: &str) -> Result<(), ConfigError> {
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let ctx = format!("{origin}:{}", i + 1);
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| parse_err(&ctx, "unterminated section header"))?
                    .trim();
                if !["run", "g", "h", "scan", "grid", "thresholds"].contains(&name) {
                    return Err(parse_err(&ctx, format!("unknown section [{name}]")));
                }
                section = Some(name.to_string());
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                parse_err(&ctx, format!("expected `key = value`, found `{line}`"))
            })?;
            let s = section
                .as_deref()
                .ok_or_else(|| parse_err(&ctx, "entry outside of any section"))?;
            self.set(s, k.trim(), v.trim(), &ctx)?;
        }
        Ok(())
    }

    pub fn merge_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        self.merge_str(&text, &path.display().to_string())
    }

    /// Serialize in the file format; `parse_str(echo())` reproduces `self`.
    pub fn echo(&self) -> String {
        let e = &self.experiment;
        let mut s = String::from("[run]\n");
        if let Some(c) = self.command {
            let _ = writeln!(s, "command = {}", c.as_str());
        }
        if let Some(n) = &self.name {
            let _ = writeln!(s, "name = {n}");
        }
        if let Some(o) = &self.outdir {
            let _ = writeln!(s, "outdir = {}", o.display());
        }
        let _ = writeln!(s, "seed = {}", e.seed);
        if let Some(t) = self.threads {
            let _ = writeln!(s, "threads = {t}");
        }
        for (label, slot) in [("g", &e.g), ("h", &e.h)] {
            if let Some(m) = slot {
                let _ = writeln!(s, "\n[{label}]\nname = {}", m.name);
                for (k, v) in &m.params {
                    let _ = writeln!(s, "{k} = {v:?}");
                }
            }
        }
        s.push_str("\n[scan]\n");
        if let Some(w) = e.window {
            let _ = writeln!(s, "window = {:?}, {:?}", w.a, w.b);
        }
        if let Some(sc) = &e.scales {
            let list: Vec<String> = sc.iter().map(|v| format!("{v:?}")).collect();
            let _ = writeln!(s, "scales = {}", list.join(", "));
        }
        let _ = writeln!(s, "n_min = {}\nn_max = {}", e.n_min, e.n_max);
        let g = &e.grid;
        let _ = writeln!(
            s,
            "\n[grid]\nwindow = {:?}, {:?}\ntop = {:?}\nlevels = {}\ncheck = {}",
            g.window.a, g.window.b, g.top, g.levels, e.grid_check
        );
        let t = &e.thresholds;
        let vals = [
            t.decay,
            t.plateau,
            t.symmetric,
            t.cayley_plateau,
            t.grid_tolerance,
            t.ratio_factor,
            t.box_factor,
        ];
        s.push_str("\n[thresholds]\n");
        for (k, v) in THRESHOLD_KEYS.iter().zip(vals) {
            let _ = writeln!(s, "{k} = {v:?}");
        }
        s
    }

    /// Check every field before dispatch, listing all offending keys.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut bad = Vec::new();
        let e = &self.experiment;
        match (self.command, &self.name) {
            (None, _) => bad.push("run.command: missing".to_string()),
            (Some(CommandKind::Experiment), Some(n)) if canonical_name(n).is_none() => {
                bad.push(format!("run.name: unknown scenario `{n}`"))
            }
            (Some(CommandKind::Catalog), n) if n.as_deref().unwrap_or("list") != "list" => {
                bad.push("run.name: catalog supports only `list`".to_string())
            }
            (Some(CommandKind::Catalog), _) => {}
            (Some(c), Some(n)) if c != CommandKind::Experiment => {
                let ops = OPERATIONS
                    .iter()
                    .find(|o| o.0 == c.as_str())
                    .map(|o| o.1)
                    .unwrap_or(&[]);
                if !ops.contains(&n.as_str()) {
                    bad.push(format!("run.name: unknown {} operation `{n}`", c.as_str()));
                }
            }
            (Some(_), None) => bad.push("run.name: missing".to_string()),
            _ => {}
        }
        if self.threads == Some(0) {
            bad.push("run.threads: must be positive".to_string());
        }
        for (label, slot) in [("g", &e.g), ("h", &e.h)] {
            if let Some(m) = slot {
                if let Err(err) = make_catalog(&m.name, &m.params) {
                    bad.push(format!("{label}.name: {err}"));
                }
            }
        }
        if let Some(w) = e.window {
            if !(w.a < w.b) {
                bad.push("scan.window: endpoints must be increasing".to_string());
            }
        }
        if let Some(sc) = &e.scales {
            if let Err(err) = qcline::profile::check_scales(sc) {
                bad.push(format!("scan.scales: {err}"));
            }
        }
        if e.n_min > e.n_max || e.n_max > 40 {
            bad.push("scan.n_min/n_max: must satisfy n_min <= n_max <= 40".to_string());
        }
        if !(e.grid.window.a < e.grid.window.b) {
            bad.push("grid.window: endpoints must be increasing".to_string());
        } else if let Err(err) =
            qcline::extension::GridSpec::new(e.grid.window, e.grid.top, e.grid.levels)
        {
            bad.push(format!("grid: {err}"));
        }
        let t = &e.thresholds;
        let vals = [
            t.decay,
            t.plateau,
            t.symmetric,
            t.cayley_plateau,
            t.grid_tolerance,
            t.ratio_factor,
            t.box_factor,
        ];
        for (k, v) in THRESHOLD_KEYS.iter().zip(vals) {
            if !(v.is_finite() && v > 0.0) {
                bad.push(format!("thresholds.{k}: must be positive"));
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Validation { keys: bad })
        }
    }
}
