//! Acceptance suite: one line per criterion, with timing against its target.
//! Runs as a plain binary so the report prints regardless of capture.

use std::f64::consts::LN_2;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use qcline::carleson::{box_mass, vanishing_profile, BoxDensity};
use qcline::experiments::{
    run_cayley_comparison, run_chain_rule, run_composition_failure, run_de_vanishing,
    run_symmetric_closure, run_uc_closure, ExperimentConfig, ScenarioReport, Status,
};
use qcline::extension::{
    ba_extend, box_image_check, cayley, cayley_inv, complex_dilatation, de_extend_line,
    hyperbolic_distance, im_ratio_check, DeOptions, GridSpec, HalfPlanePoint, QCMap,
};
use qcline::homeo::{
    compose, doubling_constant, make_catalog, modulus_of_continuity, qs_constant,
    symmetric_profile, Homeo1D, Params,
};
use qcline::oscillation::{
    build_table, maximal_function, maximal_function_brute, vmo_profile, RealFunction,
};
use qcline::profile::{grid_points, sliding_intervals};
use qcline::{Interval, Profile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Check {
    label: String,
    ok: bool,
    detail: String,
}

fn check(label: &str, ok: bool, detail: String) -> Check {
    Check {
        label: label.to_string(),
        ok,
        detail,
    }
}

type Outcome = Result<Vec<Check>, String>;

fn iv(a: f64, b: f64) -> Interval {
    Interval::new(a, b).unwrap()
}

fn line(name: &str) -> Homeo1D {
    make_catalog(name, &Params::new()).unwrap().line().unwrap()
}

fn err(e: qcline::Error) -> String {
    e.to_string()
}

fn table<'a>(r: &'a ScenarioReport, name: &str) -> Result<&'a Profile, String> {
    r.table(name).ok_or(format!("missing profile {name}"))
}

fn verdict_passes(r: &ScenarioReport, key: &str) -> Check {
    match r.verdicts.get(key) {
        Some(v) => check(
            &format!("verdict {key}"),
            v.status == Status::Pass,
            v.detail.clone(),
        ),
        None => check(&format!("verdict {key}"), false, "missing".into()),
    }
}

fn composition() -> Outcome {
    let r = run_composition_failure(&ExperimentConfig::default()).map_err(err)?;
    let d = 0.5f64.powi(6);
    let mut out = Vec::new();
    for name in ["vmo_log_h", "vmo_log_g"] {
        let v = table(&r, name)?.value_at(d).ok_or("scale 2^-6 missing")?;
        out.push(check(
            name,
            v < 0.05,
            format!("Omega(2^-6) = {v:.3e} < 0.05"),
        ));
    }
    let p = table(&r, "plateau_log_gh")?;
    let min = p.values.iter().cloned().fold(f64::INFINITY, f64::min);
    out.push(check(
        "plateau n = 6..12",
        p.len() == 7 && min >= 0.1,
        format!("{} points, min {min:.4} >= 0.1", p.len()),
    ));
    out.push(verdict_passes(&r, "control_identity"));
    Ok(out)
}

fn uc_closure() -> Outcome {
    let r = run_uc_closure(&ExperimentConfig::default()).map_err(err)?;
    let p = table(&r, "vmo_closure")?;
    let mut out = vec![
        check(
            "bottom three scales decrease",
            p.decreasing_tail(3),
            format!("{:?}", &p.values[p.len() - 3..]),
        ),
        check(
            "ends below 0.05",
            p.last() < 0.05,
            format!("{:.3e}", p.last()),
        ),
    ];
    let pl = table(&r, "plateau_non_uc")?;
    out.push(check(
        "non-uc control (informational)",
        true,
        format!(
            "h_parabolic plateau min {:.3}",
            pl.values.iter().cloned().fold(f64::INFINITY, f64::min)
        ),
    ));
    Ok(out)
}

fn symmetric() -> Outcome {
    let r = run_symmetric_closure(&ExperimentConfig::default()).map_err(err)?;
    let p = table(&r, "symmetric_closure")?;
    let t = 0.5f64.powi(8);
    let v = p.value_at(t).ok_or("scale 2^-8 missing")?;
    let mut out = vec![check("rho(2^-8) < 0.02", v < 0.02, format!("{v:.3e}"))];
    let w = iv(-8.0, 8.0);
    let scales: Vec<f64> = (0..9).map(|k| 0.5f64.powi(k)).collect();
    let mut worst: f64 = 0.0;
    for (a, b) in [(1.0, 0.0), (2.0, 1.0), (0.5, -3.0)] {
        let pr =
            symmetric_profile(&Homeo1D::affine(a, b).map_err(err)?, &w, &scales).map_err(err)?;
        worst = worst.max(pr.max());
    }
    out.push(check(
        "affine controls exactly 0",
        worst == 0.0,
        format!("max {worst:e}"),
    ));
    Ok(out)
}

fn de_signature() -> Outcome {
    let cfg = ExperimentConfig::default();
    let r = run_de_vanishing(&cfg).map_err(err)?;
    let c = table(&r, "vanishing")?;
    let mut out = vec![
        check(
            "grid Y = 8, K = 10",
            cfg.grid.top == 8.0 && cfg.grid.levels == 10,
            format!("window {}", cfg.grid.window),
        ),
        check(
            "non-increasing over bottom three scales",
            c.non_increasing_tail(3),
            format!("{:?}", &c.values[c.len() - 3..]),
        ),
        check(
            "c(min) < c(max) / 2",
            c.last() < c.max() / 2.0,
            format!("{:.3e} vs {:.3e}", c.last(), c.max()),
        ),
    ];
    let fine = table(&r, "vanishing_doubled")?;
    let change = c
        .values
        .iter()
        .zip(&fine.values)
        .map(|(a, b)| (a - b).abs() / a.abs().max(1e-300))
        .fold(0.0, f64::max);
    out.push(check(
        "grid doubling < 10%",
        change < 0.1,
        format!("{:.2}%", 100.0 * change),
    ));
    Ok(out)
}

fn chain_rule() -> Outcome {
    let r = run_chain_rule(&ExperimentConfig::default()).map_err(err)?;
    let c = table(&r, "chain_vanishing")?;
    Ok(vec![
        check(
            "decreasing over bottom three scales",
            c.decreasing_tail(3),
            format!("{:?}", &c.values[c.len() - 3..]),
        ),
        verdict_passes(&r, "chain_vanishing"),
        verdict_passes(&r, "control_zero_field"),
    ])
}

fn comparability() -> Outcome {
    let mut out = Vec::new();
    let mut pts = Vec::new();
    for k in 0..=8 {
        for x in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            pts.push(HalfPlanePoint::new(x, 0.5f64.powi(k)).map_err(err)?);
        }
    }
    for name in ["h_parabolic", "ss_uc_smooth", "h_exp_window"] {
        let h = line(name);
        let f = ba_extend(&h);
        let rep = im_ratio_check(&f, &h, &pts).map_err(err)?;
        out.push(check(
            &format!("{name} im ratio"),
            rep.spread.is_finite() && rep.spread < 4.0,
            format!("max R / min R = {:.4} (factor 4)", rep.spread),
        ));
        let alphas: Vec<f64> = [1.0, 0.5, 0.25]
            .iter()
            .map(|&l| box_image_check(&f, &h, &iv(0.0, l), 32))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        let hi = alphas.iter().cloned().fold(0.0, f64::max);
        let lo = alphas.iter().cloned().fold(f64::INFINITY, f64::min);
        out.push(check(
            &format!("{name} box image"),
            hi / lo < 2.0,
            format!("alpha {alphas:.4?}, ratio {:.4}", hi / lo),
        ));
    }
    Ok(out)
}

fn exact_values() -> Outcome {
    let mut out = Vec::new();

    let grid = GridSpec::new(iv(-2.0, 2.0), 2.0, 4).map_err(err)?;
    let field = complex_dilatation(&ba_extend(&Homeo1D::identity()), &grid).map_err(err)?;
    let dev = field
        .samples()
        .map(|(_, _, m)| (m.norm() - 1.0 / 3.0).abs())
        .fold(0.0, f64::max);
    out.push(check(
        "BA(identity) |mu| = 1/3",
        dev < 1e-10,
        format!("max deviation {dev:.1e}"),
    ));

    let d = hyperbolic_distance(
        HalfPlanePoint::new(0.0, 1.0).map_err(err)?,
        HalfPlanePoint::new(0.0, 2.0).map_err(err)?,
    );
    out.push(check(
        "d_H(i, 2i) = ln 2",
        (d - LN_2).abs() < 1e-12,
        format!("error {:.1e}", d - LN_2),
    ));

    let strip = BoxDensity::new(
        "strip",
        Arc::new(|_, y| if y > 1.0 && y <= 2.0 { 1.0 / y } else { 0.0 }),
    );
    let m = box_mass(&strip, &iv(0.0, 4.0)).map_err(err)?.truncated;
    out.push(check(
        "strip box mass = 4 ln 2",
        (m - 4.0 * LN_2).abs() < 1e-8,
        format!("error {:.1e}", m - 4.0 * LN_2),
    ));

    let phi =
        RealFunction::new("1_[0,1]", Arc::new(|_| 1.0), iv(0.0, 1.0)).with_prefix(Arc::new(|x| x));
    let mv = maximal_function(&phi, &[2.0, 0.5, -1.0], 16).map_err(err)?;
    out.push(check(
        "maximal examples 1/2, 1, 1/2",
        mv == vec![0.5, 1.0, 0.5],
        format!("{mv:?}"),
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let z = Complex64::new(rng.gen_range(-10.0..10.0), rng.gen_range(1e-3..10.0));
        let back = cayley_inv(cayley(z).map_err(err)?).map_err(err)?;
        worst = worst.max((back - z).norm() / z.norm().max(1.0));
    }
    out.push(check(
        "Cayley round trip on 10^4 points",
        worst < 1e-12,
        format!("max {worst:.1e}"),
    ));

    let opts = DeOptions::default();
    let h = line("h_parabolic");
    let e = de_extend_line(&h, opts);
    let post = de_extend_line(&h.post_affine(3.0, -2.0).map_err(err)?, opts);
    let pre = de_extend_line(
        &compose(&h, &Homeo1D::affine(0.5, 1.0).map_err(err)?).map_err(err)?,
        opts,
    );
    let ident = de_extend_line(&Homeo1D::identity(), opts);
    let aff = de_extend_line(&Homeo1D::affine(2.0, 1.0).map_err(err)?, opts);
    let eval = |f: &QCMap, z: Complex64| f.eval_complex(z);
    let mut res: f64 = 0.0;
    for z in [
        Complex64::new(0.0, 1.0),
        Complex64::new(0.5, 0.3),
        Complex64::new(-1.0, 2.0),
    ] {
        let ez = eval(&e, z).map_err(err)?;
        res = res.max((eval(&post, z).map_err(err)? - (3.0 * ez - 2.0)).norm());
        let bz = 0.5 * z + 1.0;
        res = res.max((eval(&pre, z).map_err(err)? - eval(&e, bz).map_err(err)?).norm());
        res = res.max((eval(&ident, z).map_err(err)? - z).norm());
        res = res.max((eval(&aff, z).map_err(err)? - (2.0 * z + 1.0)).norm());
    }
    out.push(check(
        "DE conformal naturality",
        res < 1e-6,
        format!("residual {res:.1e}"),
    ));

    let g = line("g_tiled");
    let mut gap: f64 = 0.0;
    for k in 0..1000 {
        let x = -60.0 + 120.0 * (k as f64 + 0.5) / 1000.0;
        gap = gap
            .max((g.eval(x + 22.0).map_err(err)? - g.eval(x).map_err(err)? - 143.0 / 12.0).abs());
    }
    out.push(check(
        "g(x + 22) = g(x) + 143/12",
        gap < 1e-9,
        format!("max error {gap:.1e}"),
    ));
    Ok(out)
}

fn parabolic(x: f64) -> f64 {
    if x >= 0.0 {
        (x + 1.0) * (x + 1.0) - 1.0
    } else {
        -(x - 1.0) * (x - 1.0) + 1.0
    }
}

/// Largest relative gap between two value lists.
fn rel_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / y.abs().max(1.0))
        .fold(
            if a.len() == b.len() {
                0.0
            } else {
                f64::INFINITY
            },
            f64::max,
        )
}

fn oracle_equivalence() -> Outcome {
    let mut out = Vec::new();
    let h = line("h_parabolic");
    let w = iv(0.0, 10.0);
    let scales = [1.0, 0.5, 0.25];

    // every scan below samples at most 512 points per scale
    let fine = |t: f64| -> Vec<f64> { grid_points(&w, t / 4.0) };
    let quotient = |x: f64, t: f64| {
        let q = (parabolic(x + t) - parabolic(x)) / (parabolic(x) - parabolic(x - t));
        q.max(1.0 / q)
    };
    let per_scale: Vec<f64> = scales
        .iter()
        .map(|&t| {
            fine(t)
                .iter()
                .map(|&x| quotient(x, t))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let brute_qs = per_scale.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let qs = qs_constant(&h, &w, &scales).map_err(err)?.value;
    out.push(check(
        "qs_constant",
        (qs - brute_qs).abs() < 1e-6 && qs >= 1.4,
        format!("{qs:.9} vs {brute_qs:.9}"),
    ));

    let rho = symmetric_profile(&h, &w, &scales).map_err(err)?;
    let brute_rho: Vec<f64> = per_scale.iter().map(|v| v - 1.0).collect();
    let g = rel_gap(&rho.values, &brute_rho);
    out.push(check("symmetric profile", g < 1e-6, format!("gap {g:.1e}")));

    let modulus = modulus_of_continuity(&h, &w, &scales).map_err(err)?;
    let brute_mod: Vec<f64> = scales
        .iter()
        .map(|&t| {
            fine(t)
                .iter()
                .map(|&x| parabolic(x + t) - parabolic(x))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let g = rel_gap(&modulus.values, &brute_mod);
    out.push(check("modulus profile", g < 1e-6, format!("gap {g:.1e}")));

    let dbl = doubling_constant(&h, &w, &scales).map_err(err)?.value;
    let mut brute_dbl = f64::NEG_INFINITY;
    for &s in &scales {
        for i in sliding_intervals(&w, s).map_err(err)? {
            let (c, r) = (i.mid(), i.len());
            let m = parabolic(i.b) - parabolic(i.a);
            let m2 = parabolic(c + r) - parabolic(c - r);
            brute_dbl = brute_dbl.max(m2 / m);
        }
    }
    out.push(check(
        "doubling_constant",
        (dbl - brute_dbl).abs() < 1e-6,
        format!("{dbl:.9} vs {brute_dbl:.9}"),
    ));

    // u = log h' = ln(2(x+1)) is increasing, so |u - m| splits at u = m.
    let u = RealFunction::new("log h'", Arc::new(|x: f64| (2.0 * (x + 1.0)).ln()), w);
    let anti = |x: f64| (x + 1.0) * ((2.0 * (x + 1.0)).ln() - 1.0);
    let mo = |a: f64, b: f64| {
        let m = (anti(b) - anti(a)) / (b - a);
        let s = (m.exp() / 2.0 - 1.0).clamp(a, b);
        ((m * (s - a) - (anti(s) - anti(a))) + ((anti(b) - anti(s)) - m * (b - s))) / (b - a)
    };
    let vmo = vmo_profile(&u, &w, &scales).map_err(err)?;
    let brute_vmo: Vec<f64> = scales
        .iter()
        .map(|&s| {
            sliding_intervals(&w, s)
                .unwrap()
                .iter()
                .map(|i| mo(i.a, i.b))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let g = rel_gap(&vmo.values, &brute_vmo);
    out.push(check("vmo profile", g < 1e-6, format!("gap {g:.1e}")));

    let d = BoxDensity::new("y", Arc::new(|_, y| y));
    let bw = iv(-8.0, 8.0);
    let bs = [8.0, 4.0, 2.0, 1.0];
    let c = vanishing_profile(&d, &bw, &bs).map_err(err)?;
    let exact: Vec<f64> = bs
        .iter()
        .map(|&l| {
            let f = d.floor_for(&iv(0.0, l));
            (l * l - f * f) / 2.0
        })
        .collect();
    let g = rel_gap(&c.values, &exact);
    out.push(check("carleson profile", g < 1e-6, format!("gap {g:.1e}")));

    let strip = BoxDensity::new(
        "strip",
        Arc::new(|_, y| if y > 1.0 && y <= 2.0 { 1.0 / y } else { 0.0 }),
    );
    let c = vanishing_profile(&strip, &bw, &bs).map_err(err)?;
    let exact = [LN_2, LN_2, LN_2, 0.0];
    let g = rel_gap(&c.values, &exact);
    out.push(check(
        "strip carleson profile",
        g < 1e-6,
        format!("gap {g:.1e}"),
    ));

    // φ = 1 + x² on [0,1] with exact cell masses; brute force over all cell runs.
    let n = 256;
    let phi = RealFunction::new("1+x^2", Arc::new(|x: f64| 1.0 + x * x), iv(0.0, 1.0));
    let prim = |x: f64| x + x * x * x / 3.0;
    let ts: Vec<f64> = (0..64).map(|k| (k as f64 + 0.5) / 64.0).collect();
    let fast = maximal_function(&phi, &ts, n).map_err(err)?;
    let table = build_table(&phi, &ts, n).map_err(err)?;
    let mut gap = rel_gap(&fast, &maximal_function_brute(&table, &ts));
    for (&t, &v) in ts.iter().zip(&fast) {
        let c = (t * n as f64).floor() as usize;
        let mut best = f64::NEG_INFINITY;
        for i in 0..=c {
            for j in c + 1..=n {
                let (a, b) = (i as f64 / n as f64, j as f64 / n as f64);
                best = best.max((prim(b) - prim(a)) / (b - a));
            }
        }
        gap = gap.max((v - best).abs());
    }
    out.push(check(
        "maximal function",
        gap < 1e-6,
        format!("gap {gap:.1e}"),
    ));
    Ok(out)
}

fn cayley_comparison() -> Outcome {
    let r = run_cayley_comparison(&ExperimentConfig::default()).map_err(err)?;
    let circle = table(&r, "vmo_circle")?;
    let min = circle.values.iter().cloned().fold(f64::INFINITY, f64::min);
    let line = table(&r, "vmo_line")?;
    let v = line.value_at(0.5f64.powi(6)).ok_or("scale 2^-6 missing")?;
    Ok(vec![
        check("circle profile >= 0.3", min >= 0.3, format!("min {min:.4}")),
        check(
            "line profile on [-100, 100] < 0.05 at 2^-6",
            line.meta.window == iv(-100.0, 100.0) && v < 0.05,
            format!("{v:.3e}"),
        ),
    ])
}

/// Name, runtime target in seconds, check.
type Criterion = (&'static str, u64, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("composition counterexample", 60, composition),
        ("uc closure", 60, uc_closure),
        ("symmetric closure", 30, symmetric),
        ("barycentric vanishing signature", 600, de_signature),
        ("chain rule vanishing", 120, chain_rule),
        ("hyperbolic comparability", 60, comparability),
        ("exact values", 300, exact_values),
        ("oracle equivalence", 300, oracle_equivalence),
        ("cayley comparison", 60, cayley_comparison),
    ];
    let filters: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let (mut ran, mut failed) = (0, 0);
    for (name, target, run) in criteria {
        if !filters.is_empty() && !filters.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let res = run();
        let took = start.elapsed();
        let in_time = took <= Duration::from_secs(target);
        let (ok, lines) = match res {
            Ok(checks) => (
                checks.iter().all(|c| c.ok) && in_time,
                checks
                    .iter()
                    .map(|c| {
                        format!(
                            "    [{}] {}: {}",
                            if c.ok { "ok" } else { "FAIL" },
                            c.label,
                            c.detail
                        )
                    })
                    .collect(),
            ),
            Err(e) => (false, vec![format!("    error: {e}")]),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} {name} ({:.1} s, target {target} s{})",
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            if in_time { "" } else { ", over time" }
        );
        for l in lines {
            println!("{l}");
        }
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
