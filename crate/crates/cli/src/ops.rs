//! Single-operation commands. Each writes `result.json` and its CSV tables
//! under `<outdir>/<group>-<operation>/`.

use std::path::{Path, PathBuf};

use qcline::carleson::{vanishing_profile, BoxDensity};
use qcline::experiments::{ExperimentConfig, MapChoice};
use qcline::extension::{
    asymptotic_profile, ba_extend, complex_dilatation, de_extend_line, DeOptions, DilatationField,
    GridSpec,
};
use qcline::homeo::{
    doubling_constant, log_deriv, modulus_of_continuity, qs_constant, symmetric_profile, Homeo1D,
};
use qcline::oscillation::{ainf_ratio_test, bmo_norm_estimate, vmo_profile, Weight};
use qcline::profile::dyadic_scales;
use qcline::{Interval, Profile, Result};
use serde_json::{json, Value};

use crate::config::CommandKind;

/// Points in the `x,h_x` table written by `homeo sample`.
const SAMPLE_POINTS: usize = 1025;

struct Output {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Output {
    fn new(outdir: &Path, kind: CommandKind, op: &str) -> Result<Self> {
        let dir = outdir.join(format!("{}-{op}", kind.as_str()));
        std::fs::create_dir_all(&dir)?;
        Ok(Output {
            dir,
            written: Vec::new(),
        })
    }

    fn text(&mut self, file: &str, content: &str) -> Result<()> {
        let p = self.dir.join(file);
        std::fs::write(&p, content)?;
        self.written.push(p);
        Ok(())
    }

    fn profile(&mut self, file: &str, p: &Profile) -> Result<()> {
        self.text(file, &p.to_csv())
    }

    fn field(&mut self, f: &DilatationField) -> Result<()> {
        self.text("field.csv", &f.to_csv())
    }
}

fn map_of(cfg: &ExperimentConfig) -> MapChoice {
    cfg.h
        .clone()
        .unwrap_or_else(|| MapChoice::new("ss_uc_smooth"))
}

fn grid_of(cfg: &ExperimentConfig) -> Result<GridSpec> {
    GridSpec::new(cfg.grid.window, cfg.grid.top, cfg.grid.levels)
}

fn field_of(h: &Homeo1D, cfg: &ExperimentConfig, de: bool) -> Result<DilatationField> {
    let grid = grid_of(cfg)?;
    if de {
        let opts = DeOptions {
            seed: cfg.seed,
            ..DeOptions::default()
        };
        complex_dilatation(&de_extend_line(h, opts), &grid)
    } else {
        complex_dilatation(&ba_extend(h), &grid)
    }
}

fn box_scales(cfg: &ExperimentConfig) -> Vec<f64> {
    cfg.scales.clone().unwrap_or_else(|| {
        let g = &cfg.grid;
        let floor = g.top * 0.5f64.powi(g.levels as i32);
        dyadic_scales(g.top.min(g.window.b - g.window.a), 7)
            .into_iter()
            .filter(|s| *s >= 8.0 * floor)
            .collect()
    })
}

/// Run `op` of group `kind`; returns every file written.
pub fn run_operation(
    kind: CommandKind,
    op: &str,
    cfg: &ExperimentConfig,
    outdir: &Path,
) -> Result<Vec<PathBuf>> {
    let choice = map_of(cfg);
    let h = choice.line()?;
    let window = cfg.window.unwrap_or(Interval { a: -8.0, b: 8.0 });
    let scales = cfg.scales.clone().unwrap_or_else(|| dyadic_scales(1.0, 7));
    let mut out = Output::new(outdir, kind, op)?;
    let result: Value = match (kind, op) {
        (CommandKind::Homeo, "qs-constant") => json!(qs_constant(&h, &window, &scales)?),
        (CommandKind::Homeo, "doubling") => json!(doubling_constant(&h, &window, &scales)?),
        (CommandKind::Homeo, "symmetric-profile") => {
            let p = symmetric_profile(&h, &window, &scales)?;
            out.profile("profile.csv", &p)?;
            json!(p)
        }
        (CommandKind::Homeo, "modulus") => {
            let p = modulus_of_continuity(&h, &window, &scales)?;
            out.profile("profile.csv", &p)?;
            json!(p)
        }
        (CommandKind::Homeo, "sample") => {
            let p = out.dir.join("samples.csv");
            h.write_csv(&p, &window, SAMPLE_POINTS)?;
            out.written.push(p);
            json!({ "points": SAMPLE_POINTS, "window": window })
        }
        (CommandKind::Oscillation, "vmo-profile") => {
            let p = vmo_profile(&log_deriv(&h)?, &window, &scales)?;
            out.profile("profile.csv", &p)?;
            json!(p)
        }
        (CommandKind::Oscillation, "bmo-norm") => {
            json!(bmo_norm_estimate(&log_deriv(&h)?, &window, &scales)?)
        }
        (CommandKind::Oscillation, "ainf") => json!(ainf_ratio_test(
            &Weight::derivative_of(&h)?,
            &window,
            &scales
        )?),
        (CommandKind::Extend, "ba-field" | "de-field") => {
            let field = field_of(&h, cfg, op == "de-field")?;
            out.field(&field)?;
            let p = asymptotic_profile(&field)?;
            out.profile("asymptotic.csv", &p)?;
            json!({ "points": field.len(), "asymptotic": p })
        }
        (CommandKind::Carleson, "ba-profile" | "de-profile") => {
            let field = field_of(&h, cfg, op == "de-profile")?;
            let p = vanishing_profile(
                &BoxDensity::from_field(&field),
                &cfg.grid.window,
                &box_scales(cfg),
            )?;
            out.profile("profile.csv", &p)?;
            json!(p)
        }
        _ => {
            return Err(qcline::Error::UnknownName(format!(
                "{} {op}",
                kind.as_str()
            )));
        }
    };
    let doc = json!({
        "command": kind.as_str(),
        "operation": op,
        "map": choice,
        "seed": cfg.seed,
        "result": result,
    });
    let text = serde_json::to_string_pretty(&doc).unwrap_or_default() + "\n";
    out.text("result.json", &text)?;
    Ok(out.written)
}
