use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::{ExperimentConfig, MapChoice, ScenarioReport, Status};
use crate::carleson::{disk_box_mass, pullback_cayley, vanishing_profile, BoxDensity, DiskDensity};
use crate::error::Result;
use crate::extension::{
    asymptotic_profile, ba_extend, bilipschitz_estimate, box_image_check, cayley, cayley_inv,
    chain_dilatation_mag, complex_dilatation, de_extend_line, im_ratio_check, DeOptions,
    DilatationField, GridSpec, HalfPlanePoint,
};
use crate::homeo::{compose, log_deriv, modulus_of_continuity, symmetric_profile, Homeo1D};
use crate::interval::Interval;
use crate::oscillation::{mean_oscillation, vmo_profile, RealFunction};
use crate::profile::{dyadic_scales, grid_points, ordered_max, Profile, ScanMeta, STRIDE_FRACTION};

const DENSITY_CONVENTION: &str = "|mu|^2/y on the half-plane, |mu|^2/(1-|w|) on the disk";
/// Tolerance for gates that expect an exactly vanishing result.
const EXACT: f64 = 0.0;
/// Tolerance for the barycentric extension of an affine map.
const CONTROL_TOL: f64 = 1e-10;

fn iv(a: f64, b: f64) -> Interval {
    Interval { a, b }
}

fn uc_g() -> MapChoice {
    MapChoice::new("ss_uc_smooth")
}

fn uc_h() -> MapChoice {
    MapChoice::new("ss_uc_smooth")
        .with("a", 0.2)
        .with("omega", 2.0)
}

fn min_value(p: &Profile) -> f64 {
    p.values.iter().cloned().fold(f64::INFINITY, f64::min)
}

fn decays(p: &Profile, limit: f64) -> bool {
    p.non_increasing_tail(3) && p.last() < limit
}

/// Mean oscillation of `u` over `[x_n - 11/(2x_n), x_n + 11/(2x_n)]`, `x_n = 2^n`.
fn dyadic_plateau(u: &RealFunction, n_min: u32, n_max: u32, label: &str) -> Result<Profile> {
    let ns: Vec<u32> = (n_min..=n_max).collect();
    let xs: Vec<f64> = ns.iter().map(|&n| 2f64.powi(n as i32)).collect();
    let lens: Vec<f64> = xs.iter().map(|x| 11.0 / x).collect();
    let values = xs
        .iter()
        .zip(&lens)
        .map(|(&x, &l)| mean_oscillation(u, &Interval::centered(x, l)?))
        .collect::<Result<Vec<_>>>()?;
    Profile::new(
        lens,
        values,
        xs.clone(),
        ScanMeta {
            label: label.to_string(),
            window: iv(xs[0], *xs.last().unwrap_or(&xs[0])),
            stride_fraction: 0.0,
        },
    )
}

fn echo_thresholds(r: &mut ScenarioReport, cfg: &ExperimentConfig, keys: &[&str]) {
    let t = &cfg.thresholds;
    for k in keys {
        let v = match *k {
            "decay_threshold" => t.decay,
            "plateau_threshold" => t.plateau,
            "symmetric_threshold" => t.symmetric,
            "cayley_plateau_threshold" => t.cayley_plateau,
            "grid_tolerance" => t.grid_tolerance,
            "ratio_factor" => t.ratio_factor,
            "box_factor" => t.box_factor,
            "exact_tolerance" => EXACT,
            "control_tolerance" => CONTROL_TOL,
            _ => continue,
        };
        r.echo(k, v);
    }
}

/// Log-derivative profiles of `h` and `g` decay, while the oscillation of
/// `log (g∘h)'` over intervals of length `11/x_n` at `x_n = 2^n` stays large.
pub fn run_composition_failure(cfg: &ExperimentConfig) -> Result<ScenarioReport> {
    let mut r = ScenarioReport::new("composition-failure");
    let g = cfg.g.clone().unwrap_or(MapChoice::new("g_tiled"));
    let h = cfg.h.clone().unwrap_or(MapChoice::new("h_parabolic"));
    let scales = cfg.scales.clone().unwrap_or(dyadic_scales(1.0, 7));
    let wh = cfg.window.unwrap_or(iv(1.0, 100.0));
    let wg = cfg.window.unwrap_or(iv(0.0, 44.0));
    r.echo("g", &g);
    r.echo("h", &h);
    r.echo("window_h", wh);
    r.echo("window_g", wg);
    r.echo("scales", &scales);
    r.echo("n_min", cfg.n_min);
    r.echo("n_max", cfg.n_max);
    echo_thresholds(&mut r, cfg, &["decay_threshold", "plateau_threshold"]);
    let (gm, hm) = (g.line()?, h.line()?);
    let t = &cfg.thresholds;

    let ph = vmo_profile(&log_deriv(&hm)?, &wh, &scales)?;
    r.finding("omega_log_h_min_scale", ph.last());
    r.gate(
        "h_vmo_signature",
        decays(&ph, t.decay),
        "decay_threshold",
        format!("Omega(log h') = {:.3e} at the smallest scale", ph.last()),
    );
    r.profile("vmo_log_h", ph);

    let pg = vmo_profile(&log_deriv(&gm)?, &wg, &scales)?;
    r.finding("omega_log_g_min_scale", pg.last());
    r.gate(
        "g_vmo_signature",
        decays(&pg, t.decay),
        "decay_threshold",
        format!("Omega(log g') = {:.3e} at the smallest scale", pg.last()),
    );
    r.profile("vmo_log_g", pg);

    let u = log_deriv(&compose(&gm, &hm)?)?;
    let pc = dyadic_plateau(&u, cfg.n_min, cfg.n_max, "plateau(log (g o h)')")?;
    let low = min_value(&pc);
    r.finding("composition_plateau_min", low);
    r.gate(
        "composition_vmo_failure",
        low >= t.plateau,
        "plateau_threshold",
        format!(
            "smallest oscillation over n = {}..={} is {low:.4}",
            cfg.n_min, cfg.n_max
        ),
    );
    r.profile("plateau_log_gh", pc);

    let u0 = log_deriv(&compose(&Homeo1D::identity(), &hm)?)?;
    let p0 = dyadic_plateau(&u0, cfg.n_min, cfg.n_max, "plateau(log (id o h)')")?;
    r.finding("control_plateau_max", p0.max());
    r.gate(
        "control_identity",
        p0.max() < t.decay,
        "decay_threshold",
        format!("identity in place of g gives at most {:.3e}", p0.max()),
    );
    r.profile("plateau_control", p0);
    Ok(r)
}

/// `g∘h⁻¹` for a uniformly continuous pair keeps a decaying log-derivative
/// profile; `h⁻¹` alone as well.
pub fn run_uc_closure(cfg: &ExperimentConfig) -> Result<ScenarioReport> {
    let mut r = ScenarioReport::new("uc-closure");
    let g = cfg.g.clone().unwrap_or_else(uc_g);
    let h = cfg.h.clone().unwrap_or_else(uc_h);
    let scales = cfg.scales.clone().unwrap_or(dyadic_scales(1.0, 7));
    let w = cfg.window.unwrap_or(iv(-16.0, 16.0));
    r.echo("g", &g);
    r.echo("h", &h);
    r.echo("window", w);
    r.echo("scales", &scales);
    r.echo("n_min", cfg.n_min);
    r.echo("n_max", cfg.n_max);
    echo_thresholds(&mut r, cfg, &["decay_threshold", "exact_tolerance"]);
    let t = &cfg.thresholds;
    let (gm, hm) = (g.line()?, h.line()?);
    let hinv = hm.inverse();

    for (key, map) in [("h", &hm), ("h_inverse", &hinv)] {
        let m = modulus_of_continuity(map, &w, &scales)?;
        r.finding(&format!("modulus_{key}_min_scale"), m.last());
        r.gate(
            &format!("{key}_uniformly_continuous"),
            decays(&m, t.decay),
            "decay_threshold",
            format!("continuity modulus {:.3e} at the smallest scale", m.last()),
        );
        r.profile(&format!("modulus_{key}"), m);
    }

    let p = vmo_profile(&log_deriv(&compose(&gm, &hinv)?)?, &w, &scales)?;
    r.finding("omega_closure_min_scale", p.last());
    r.gate(
        "closure_decay",
        p.decreasing_tail(3) && p.last() < t.decay,
        "decay_threshold",
        format!(
            "Omega(log (g o h^-1)') = {:.3e} at the smallest scale",
            p.last()
        ),
    );
    r.profile("vmo_closure", p);

    let pi = vmo_profile(&log_deriv(&hinv)?, &w, &scales)?;
    r.finding("omega_inverse_min_scale", pi.last());
    r.gate(
        "inversion_decay",
        decays(&pi, t.decay),
        "decay_threshold",
        format!(
            "Omega(log (h^-1)') = {:.3e} at the smallest scale",
            pi.last()
        ),
    );
    r.profile("vmo_inverse", pi);

    let p0 = vmo_profile(&log_deriv(&Homeo1D::identity())?, &w, &scales)?;
    r.gate(
        "control_identity",
        p0.max() <= EXACT,
        "exact_tolerance",
        format!("identity profile maximum {:e}", p0.max()),
    );
    r.profile("vmo_control", p0);

    // g_tiled o h_parabolic is g o h^-1 for the non-uniformly continuous h = h_parabolic^-1.
    let nonuc = compose(
        &MapChoice::new("g_tiled").line()?,
        &MapChoice::new("h_parabolic").line()?,
    )?;
    let n_hi = cfg.n_max.min(cfg.n_min + 3);
    let pp = dyadic_plateau(
        &log_deriv(&nonuc)?,
        cfg.n_min,
        n_hi,
        "plateau(log (g_tiled o h_parabolic)')",
    )?;
    r.finding("non_uc_plateau_min", min_value(&pp));
    r.verdict(
        "non_uc_plateau",
        Status::Informational,
        "",
        format!(
            "h^-1 = h_parabolic: oscillation stays at {:.3} or more",
            min_value(&pp)
        ),
    );
    r.profile("plateau_non_uc", pp);
    Ok(r)
}

/// Symmetric profiles of `g`, `h` and `g∘h⁻¹`, with exact affine controls.
pub fn run_symmetric_closure(cfg: &ExperimentConfig) -> Result<ScenarioReport> {
    let mut r = ScenarioReport::new("symmetric-closure");
    let g = cfg.g.clone().unwrap_or_else(uc_g);
    let h = cfg.h.clone().unwrap_or_else(uc_h);
    let scales = cfg.scales.clone().unwrap_or(dyadic_scales(1.0, 9));
    let w = cfg.window.unwrap_or(iv(-8.0, 8.0));
    r.echo("g", &g);
    r.echo("h", &h);
    r.echo("window", w);
    r.echo("scales", &scales);
    echo_thresholds(&mut r, cfg, &["symmetric_threshold", "exact_tolerance"]);
    let t = &cfg.thresholds;
    let (gm, hm) = (g.line()?, h.line()?);
    let comp = compose(&gm, &hm.inverse())?;
    for (key, map) in [("g", &gm), ("h", &hm), ("closure", &comp)] {
        let p = symmetric_profile(map, &w, &scales)?;
        r.finding(&format!("rho_{key}_min_scale"), p.last());
        r.gate(
            &format!("{key}_symmetric"),
            decays(&p, t.symmetric),
            "symmetric_threshold",
            format!("rho = {:.3e} at the smallest scale", p.last()),
        );
        r.profile(&format!("symmetric_{key}"), p);
    }

    let a1 = Homeo1D::affine(2.0, 1.0)?;
    let a2 = Homeo1D::affine(0.5, -3.0)?;
    let mut worst: f64 = 0.0;
    for map in [a1.clone(), a2.clone(), compose(&a1, &a2.inverse())?] {
        worst = worst.max(symmetric_profile(&map, &w, &scales)?.max());
    }
    r.finding("control_affine_max", worst);
    r.gate(
        "control_affine",
        worst <= EXACT,
        "exact_tolerance",
        format!("affine profiles reach {worst:e}"),
    );

    let nonuc = compose(
        &MapChoice::new("g_tiled").line()?,
        &MapChoice::new("h_parabolic").line()?,
    )?;
    let n_hi = cfg.n_max.min(cfg.n_min + 4);
    let (mut ts, mut vals, mut xs) = (Vec::new(), Vec::new(), Vec::new());
    for n in cfg.n_min..=n_hi {
        let x = 2f64.powi(n as i32);
        let tn = 5.5 / x;
        let p = symmetric_profile(&nonuc, &Interval::centered(x, 11.0 / x)?, &[tn])?;
        ts.push(tn);
        vals.push(p.values[0]);
        xs.push(p.argmax[0]);
    }
    let pp = Profile::new(
        ts,
        vals,
        xs,
        ScanMeta {
            label: "symmetric(g_tiled o h_parabolic) at t = 5.5/x_n".into(),
            window: iv(2f64.powi(cfg.n_min as i32), 2f64.powi(n_hi as i32)),
            stride_fraction: STRIDE_FRACTION,
        },
    )?;
    r.finding("non_uc_plateau_min", min_value(&pp));
    r.verdict(
        "non_uc_plateau",
        Status::Informational,
        "",
        format!(
            "non-uniformly continuous direction stays at {:.3} or more",
            min_value(&pp)
        ),
    );
    r.profile("symmetric_non_uc", pp);
    Ok(r)
}

fn field_scales(cfg: &ExperimentConfig, grid: &GridSpec) -> Vec<f64> {
    cfg.scales.clone().unwrap_or_else(|| {
        let top = grid.top.min(grid.window.len());
        let floor = grid.height(grid.levels);
        dyadic_scales(top, 7)
            .into_iter()
            .filter(|s| *s >= 8.0 * floor)
            .collect()
    })
}

fn de_field(h: &Homeo1D, grid: &GridSpec, seed: u64) -> Result<DilatationField> {
    let opts = DeOptions {
        seed,
        ..DeOptions::default()
    };
    complex_dilatation(&de_extend_line(h, opts), grid)
}

fn max_relative_change(a: &Profile, b: &Profile) -> f64 {
    a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| {
            if *x == 0.0 && *y == 0.0 {
                0.0
            } else {
                (x - y).abs() / x.abs().max(y.abs())
            }
        })
        .fold(0.0, f64::max)
}

/// Carleson profile of the barycentric extension's dilatation.
pub fn run_de_vanishing(cfg: &ExperimentConfig) -> Result<ScenarioReport> {
    let mut r = ScenarioReport::new("de-vanishing");
    let h = cfg.h.clone().unwrap_or_else(uc_g);
    let grid = GridSpec::new(cfg.grid.window, cfg.grid.top, cfg.grid.levels)?;
    let scales = field_scales(cfg, &grid);
    r.echo("h", &h);
    r.echo("grid", cfg.grid);
    r.echo("grid_check", cfg.grid_check);
    r.echo("scales", &scales);
    r.echo("seed", cfg.seed);
    r.echo("density_convention", DENSITY_CONVENTION);
    echo_thresholds(
        &mut r,
        cfg,
        &["decay_threshold", "grid_tolerance", "control_tolerance"],
    );
    let t = &cfg.thresholds;
    let hm = h.line()?;

    let field = de_field(&hm, &grid, cfg.seed)?;
    r.finding("sup_mu", field.sup_norm);
    let c = vanishing_profile(&BoxDensity::from_field(&field), &grid.window, &scales)?;
    r.finding("c_max_scale", c.first());
    r.finding("c_min_scale", c.last());
    r.gate(
        "vanishing_signature",
        c.non_increasing_tail(3) && c.last() < 0.5 * c.first() && c.last() < t.decay,
        "decay_threshold",
        format!("c falls from {:.3e} to {:.3e}", c.first(), c.last()),
    );
    r.profile("asymptotic", asymptotic_profile(&field)?);
    r.add_file("field.csv", field.to_csv());

    if cfg.grid_check {
        let fine = de_field(&hm, &grid.doubled(), cfg.seed)?;
        let c2 = vanishing_profile(&BoxDensity::from_field(&fine), &grid.window, &scales)?;
        let rel = max_relative_change(&c, &c2);
        r.finding("grid_relative_change", rel);
        r.gate(
            "grid_convergence",
            rel < t.grid_tolerance,
            "grid_tolerance",
            format!("doubling the row resolution moves c by {:.2}%", 100.0 * rel),
        );
        r.profile("vanishing_doubled", c2);
    }
    r.profile("vanishing", c);

    let small = GridSpec::new(iv(-2.0, 2.0), 2.0, 4)?;
    let small_scales = [2.0, 1.0, 0.5, 0.25];
    let ctrl = de_field(&Homeo1D::affine(2.0, 1.0)?, &small, cfg.seed)?;
    let cc = vanishing_profile(&BoxDensity::from_field(&ctrl), &small.window, &small_scales)?;
    r.finding("control_affine_max", cc.max());
    r.gate(
        "control_affine",
        cc.max() < CONTROL_TOL,
        "control_tolerance",
        format!("affine boundary map gives c at most {:.1e}", cc.max()),
    );

    let par = MapChoice::new("h_parabolic").line()?;
    let pf = de_field(&par, &GridSpec::new(iv(-2.0, 2.0), 2.0, 5)?, cfg.seed)?;
    let pc = vanishing_profile(&BoxDensity::from_field(&pf), &small.window, &small_scales)?;
    r.finding("parabolic_c_min_scale", pc.last());
    r.verdict(
        "parabolic_informational",
        Status::Informational,
        "",
        format!(
            "h_parabolic (not uniformly continuous): c = {:.3e} at the smallest scale",
            pc.last()
        ),
    );
    r.profile("vanishing_parabolic", pc);
    Ok(r)
}

fn comparability_points() -> Vec<HalfPlanePoint> {
    let mut pts = Vec::new();
    for k in 0..=8 {
        let y = 0.5f64.powi(k);
        for x in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            pts.push(HalfPlanePoint { x, y });
        }
    }
    pts
}

/// Chain dilatation of Beurling–Ahlfors extensions and the hyperbolic
/// comparability checks for `H`.
pub fn run_chain_rule(cfg: &ExperimentConfig) -> Result<ScenarioReport> {
    let mut r = ScenarioReport::new("chain-rule");
    let g = cfg.g.clone().unwrap_or_else(uc_g);
    let h = cfg.h.clone().unwrap_or_else(uc_h);
    let grid = GridSpec::new(cfg.grid.window, cfg.grid.top, cfg.grid.levels)?;
    let scales = field_scales(cfg, &grid);
    r.echo("g", &g);
    r.echo("h", &h);
    r.echo("grid", cfg.grid);
    r.echo("scales", &scales);
    r.echo("density_convention", DENSITY_CONVENTION);
    echo_thresholds(
        &mut r,
        cfg,
        &[
            "decay_threshold",
            "exact_tolerance",
            "ratio_factor",
            "box_factor",
        ],
    );
    let t = &cfg.thresholds;
    let (gm, hm) = (g.line()?, h.line()?);
    let (gf, hf) = (ba_extend(&gm), ba_extend(&hm));
    let mu_g = complex_dilatation(&gf, &grid)?;
    let mu_h = complex_dilatation(&hf, &grid)?;
    let chain = chain_dilatation_mag(&mu_g, &mu_h)?;
    r.finding("chain_sup", chain.sup_norm);
    let c = vanishing_profile(&BoxDensity::from_field(&chain), &grid.window, &scales)?;
    r.finding("chain_c_min_scale", c.last());
    r.gate(
        "chain_vanishing",
        c.decreasing_tail(3) && c.last() < t.decay,
        "decay_threshold",
        format!(
            "chain profile falls from {:.3e} to {:.3e}",
            c.first(),
            c.last()
        ),
    );
    r.profile("chain_vanishing", c);
    r.profile("chain_asymptotic", asymptotic_profile(&chain)?);

    let zero = chain_dilatation_mag(&mu_h, &mu_h)?;
    r.gate(
        "control_zero_field",
        zero.sup_norm <= EXACT,
        "exact_tolerance",
        format!("mu = nu gives sup {:e}", zero.sup_norm),
    );

    let p = |x: f64, y: f64| HalfPlanePoint { x, y };
    let pairs = [
        (p(0.0, 1.0), p(1.0, 2.0)),
        (p(-3.0, 0.1), p(2.0, 0.5)),
        (p(0.5, 0.01), p(0.51, 0.02)),
        (p(4.0, 0.25), p(4.0, 0.0625)),
    ];
    r.finding("bilipschitz_h", bilipschitz_estimate(&hf, &pairs)?);

    let rep = im_ratio_check(&hf, &hm, &comparability_points())?;
    r.finding("im_ratio_min", rep.min);
    r.finding("im_ratio_max", rep.max);
    r.gate(
        "im_ratio_comparable",
        rep.spread <= t.ratio_factor,
        "ratio_factor",
        format!("max R / min R = {:.4} over y in [2^-8, 1]", rep.spread),
    );

    let mut alphas = Vec::new();
    for len in [1.0, 0.5, 0.25] {
        alphas.push(box_image_check(
            &hf,
            &hm,
            &Interval::centered(0.0, len)?,
            16,
        )?);
    }
    let (lo, hi) = (
        alphas.iter().cloned().fold(f64::INFINITY, f64::min),
        alphas.iter().cloned().fold(0.0, f64::max),
    );
    r.finding("box_alpha_min", lo);
    r.finding("box_alpha_max", hi);
    r.gate(
        "box_image_stable",
        hi / lo < t.box_factor,
        "box_factor",
        format!("alpha ranges over [{lo:.4}, {hi:.4}] for |I| in {{1, 1/2, 1/4}}"),
    );
    Ok(r)
}

/// Sup of the disk-cap mass over centers `T(x)`, `x` on a grid of the window.
fn disk_profile(d: &DiskDensity, window: &Interval, radii: &[f64]) -> Result<Profile> {
    let mut vals = Vec::new();
    let mut args = Vec::new();
    for &rad in radii {
        let xs = grid_points(window, rad * STRIDE_FRACTION);
        let (v, k) = ordered_max(&xs, |&x| {
            disk_box_mass(d, cayley(Complex64::new(x, 0.0))?, rad)
        })?;
        vals.push(v);
        args.push(xs[k]);
    }
    Profile::new(
        radii.to_vec(),
        vals,
        args,
        ScanMeta {
            label: format!("disk_profile({})", d.name()),
            window: *window,
            stride_fraction: STRIDE_FRACTION,
        },
    )
}

/// `log|1 - ξ|` keeps a plateau on arcs shrinking to 1 while its Cayley
/// pull-back decays; the dilatation measure of a barycentric extension
/// compared on the disk and, pulled back, on the half-plane.
pub fn run_cayley_comparison(cfg: &ExperimentConfig) -> Result<ScenarioReport> {
    let mut r = ScenarioReport::new("cayley-comparison");
    let scales = cfg.scales.clone().unwrap_or(dyadic_scales(1.0, 7));
    let wc = iv(-PI, PI);
    let wl = cfg.window.unwrap_or(iv(-100.0, 100.0));
    let h = cfg.h.clone().unwrap_or_else(uc_g);
    r.echo("scales", &scales);
    r.echo("circle_window", wc);
    r.echo("line_window", wl);
    r.echo("h", &h);
    r.echo("seed", cfg.seed);
    r.echo("density_convention", DENSITY_CONVENTION);
    echo_thresholds(
        &mut r,
        cfg,
        &[
            "decay_threshold",
            "cayley_plateau_threshold",
            "exact_tolerance",
        ],
    );
    let t = &cfg.thresholds;

    let pv = vmo_profile(&RealFunction::log_one_minus_xi(), &wc, &scales)?;
    r.finding("circle_plateau_min", min_value(&pv));
    r.gate(
        "circle_plateau",
        min_value(&pv) >= t.cayley_plateau,
        "cayley_plateau_threshold",
        format!("Omega(log|1-xi|) stays at {:.4} or more", min_value(&pv)),
    );
    r.profile("vmo_circle", pv);

    let pu = vmo_profile(&RealFunction::cayley_log(), &wl, &scales)?;
    r.finding("line_min_scale", pu.last());
    r.gate(
        "line_decay",
        decays(&pu, t.decay),
        "decay_threshold",
        format!(
            "Omega(-log|x+i| + log 2) = {:.3e} at the smallest scale",
            pu.last()
        ),
    );
    r.profile("vmo_line", pu);

    let p0 = vmo_profile(&RealFunction::constant(1.0), &wl, &scales)?;
    r.gate(
        "control_constant",
        p0.max() <= EXACT,
        "exact_tolerance",
        format!("constant profile maximum {:e}", p0.max()),
    );

    // Measure side: |μ|² of the line extension, transported to the disk.
    let grid = GridSpec::new(iv(-2.0, 2.0), 2.0, 7)?;
    let yk = grid.height(grid.levels);
    let field = Arc::new(de_field(&h.line()?, &grid, cfg.seed)?);
    let fld = field.clone();
    let lambda = DiskDensity::hyperbolic(
        "disk(|mu|^2)",
        Arc::new(move |w: Complex64| match cayley_inv(w) {
            Ok(z) => fld.abs2_at(z.re, z.im).unwrap_or(f64::NAN),
            Err(_) => f64::NAN,
        }),
    )
    .with_floor(2.0 * yk);
    let radii = [0.5, 0.25, 0.125, 0.0625];
    let mw = iv(-0.5, 0.5);
    let pd = disk_profile(&lambda, &mw, &radii)?;
    let pulled = pullback_cayley(&lambda).with_floor(2.0 * yk);
    let pb = vanishing_profile(&pulled, &mw, &radii)?;
    let ratios: Vec<f64> = pd
        .values
        .iter()
        .zip(&pb.values)
        .map(|(a, b)| a / b)
        .collect();
    r.finding(
        "measure_ratio_min",
        ratios.iter().cloned().fold(f64::INFINITY, f64::min),
    );
    r.finding(
        "measure_ratio_max",
        ratios.iter().cloned().fold(0.0, f64::max),
    );
    r.verdict(
        "measure_comparison",
        Status::Informational,
        "",
        format!(
            "disk {:.3e} -> {:.3e}, half-plane {:.3e} -> {:.3e}",
            pd.first(),
            pd.last(),
            pb.first(),
            pb.last()
        ),
    );
    r.profile("disk_profile", pd);
    r.profile("pullback_profile", pb);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_profile_layout() {
        let u = RealFunction::linear();
        let p = dyadic_plateau(&u, 3, 5, "x").unwrap();
        assert_eq!(p.scales, vec![11.0 / 8.0, 11.0 / 16.0, 11.0 / 32.0]);
        // mean oscillation of x over an interval of length l is l/4
        for (s, v) in p.scales.iter().zip(&p.values) {
            assert!((v - s / 4.0).abs() < 1e-12);
        }
        assert!(dyadic_plateau(&u, 0, 0, "x").is_ok());
    }
}
