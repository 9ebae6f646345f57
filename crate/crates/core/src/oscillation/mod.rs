//! Mean oscillation over intervals, John–Nirenberg tails, weight tests
//! (A∞ ratio envelope, reverse Hölder), the uncentered Hardy–Littlewood
//! maximal function and the pull-back `u -> u∘h`.
//!
//! Circle functions are handled through their 2π-periodic parametrization by
//! arc length, so arcs are ordinary intervals of the angle variable.

mod function;
mod maximal;

use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::homeo::Homeo1D;
use crate::interval::Interval;
use crate::profile::{
    check_scales, fmt_f64, ordered_max, sliding_intervals, Profile, ScanMeta, ScanResult,
    STRIDE_FRACTION,
};

pub use function::{RealFunction, Weight};
pub use maximal::{build_table, maximal_function, maximal_function_brute, MaximalTable, MAX_CELLS};

/// Mean of `u` over `I`.
pub fn mean(u: &RealFunction, i: &Interval) -> Result<f64> {
    u.check_interval(i)?;
    Ok(u.integral(i.a, i.b)? / i.len())
}

/// `(1/|I|) ∫_I |u - u_I|`.
pub fn mean_oscillation(u: &RealFunction, i: &Interval) -> Result<f64> {
    let m = mean(u, i)?;
    let g = |x: f64| u.eval(x) - m;
    let mut dev = 0.0;
    let mut lo = i.a;
    for c in sign_changes(&g, i) {
        dev += u.integrate_with(|x| g(x).abs(), lo, c)?;
        lo = c;
    }
    dev += u.integrate_with(|x| g(x).abs(), lo, i.b)?;
    Ok((dev / i.len()).max(0.0))
}

/// Samples per interval used to locate the kinks of `|u - m|`.
const KINK_PROBES: usize = 64;

/// Roots of `g` bracketed by sign changes on a uniform probe grid, so that
/// `|g|` is smooth between consecutive cuts.
fn sign_changes<G: Fn(f64) -> f64>(g: &G, i: &Interval) -> Vec<f64> {
    let step = i.len() / KINK_PROBES as f64;
    let mut out = Vec::new();
    let mut prev = (i.a, g(i.a));
    for k in 1..KINK_PROBES {
        let x = i.a + k as f64 * step;
        let v = g(x);
        if prev.1.is_finite() && v.is_finite() && prev.1 * v < 0.0 {
            let (mut a, mut b, mut ga) = (prev.0, x, prev.1);
            for _ in 0..60 {
                let c = 0.5 * (a + b);
                let gc = g(c);
                if gc == 0.0 || b - a <= 1e-15 * c.abs().max(1.0) {
                    a = c;
                    b = c;
                    break;
                }
                if (gc < 0.0) == (ga < 0.0) {
                    a = c;
                    ga = gc;
                } else {
                    b = c;
                }
            }
            out.push(0.5 * (a + b));
        }
        prev = (x, v);
    }
    out
}

fn oscillation_scan(
    u: &RealFunction,
    window: &Interval,
    scales: &[f64],
) -> Result<Vec<(f64, f64)>> {
    check_scales(scales)?;
    u.check_interval(window)?;
    if !window.is_bounded() {
        return Err(Error::Invalid("scan window must be bounded".into()));
    }
    scales
        .iter()
        .map(|&d| {
            let fam = sliding_intervals(window, d)?;
            let (v, k) = ordered_max(&fam, |iv| mean_oscillation(u, iv))?;
            Ok((v, fam[k].mid()))
        })
        .collect()
}

/// Sup of the mean oscillation over the sliding family at every scale.
pub fn bmo_norm_estimate(
    u: &RealFunction,
    window: &Interval,
    scales: &[f64],
) -> Result<ScanResult> {
    let per = oscillation_scan(u, window, scales)?;
    let mut best = ScanResult {
        value: f64::NEG_INFINITY,
        argmax_x: f64::NAN,
        argmax_scale: f64::NAN,
        window: *window,
    };
    for (&(v, x), &d) in per.iter().zip(scales) {
        if v > best.value {
            best = ScanResult {
                value: v,
                argmax_x: x,
                argmax_scale: d,
                window: *window,
            };
        }
    }
    Ok(best)
}

/// `Ω(δ)`: sup of the mean oscillation over intervals of length `δ`.
pub fn vmo_profile(u: &RealFunction, window: &Interval, scales: &[f64]) -> Result<Profile> {
    let per = oscillation_scan(u, window, scales)?;
    Profile::new(
        scales.to_vec(),
        per.iter().map(|p| p.0).collect(),
        per.iter().map(|p| p.1).collect(),
        ScanMeta {
            label: format!("vmo_profile({})", u.name()),
            window: *window,
            stride_fraction: STRIDE_FRACTION,
        },
    )
}

/// Number of midpoint samples used by [`jn_tail`].
pub const JN_SAMPLES: usize = 1 << 14;

/// Distribution of `|u - u_I|` on a midpoint grid of `I`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JnTail {
    pub thresholds: Vec<f64>,
    pub fractions: Vec<f64>,
}

impl JnTail {
    /// Least-squares rate `r` in `fraction ≈ A e^{-r t}` over the thresholds
    /// with a positive fraction; `None` with fewer than two such points.
    pub fn decay_rate(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .thresholds
            .iter()
            .zip(&self.fractions)
            .filter(|(_, f)| **f > 0.0)
            .map(|(t, f)| (*t, f.ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        Some(-least_squares_slope(&pts))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("threshold,fraction\n");
        for (t, f) in self.thresholds.iter().zip(&self.fractions) {
            out.push_str(&format!("{},{}\n", fmt_f64(*t), fmt_f64(*f)));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }
}

/// `|{x ∈ I : |u(x) - u_I| > t}| / |I|` for each threshold.
pub fn jn_tail(u: &RealFunction, i: &Interval, thresholds: &[f64]) -> Result<JnTail> {
    if thresholds.iter().any(|t| !(*t > 0.0)) || thresholds.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid(
            "thresholds must be positive and increasing".into(),
        ));
    }
    let m = mean(u, i)?;
    let step = i.len() / JN_SAMPLES as f64;
    let devs: Vec<f64> = (0..JN_SAMPLES)
        .map(|k| (u.eval(i.a + (k as f64 + 0.5) * step) - m).abs())
        .collect();
    let fractions = thresholds
        .iter()
        .map(|&t| devs.iter().filter(|d| **d > t).count() as f64 / JN_SAMPLES as f64)
        .collect();
    Ok(JnTail {
        thresholds: thresholds.to_vec(),
        fractions,
    })
}

/// Tail shape relative to the oscillation norm: `κ = rate · B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JnConsistency {
    pub bmo: f64,
    pub rate: f64,
    pub kappa: f64,
}

/// Fit the tail of `u` on `I` and scale it by the scanned norm on `window`.
pub fn jn_consistency(
    u: &RealFunction,
    i: &Interval,
    window: &Interval,
    scales: &[f64],
    thresholds: &[f64],
) -> Result<JnConsistency> {
    let bmo = bmo_norm_estimate(u, window, scales)?.value;
    let tail = jn_tail(u, i, thresholds)?;
    let rate = tail.decay_rate().unwrap_or(f64::INFINITY);
    Ok(JnConsistency {
        bmo,
        rate,
        kappa: rate * bmo,
    })
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Subinterval fractions tested by [`ainf_ratio_test`].
pub const AINF_FRACTIONS: [f64; 4] = [0.5, 0.25, 0.125, 0.0625];
const AINF_CELLS: usize = 32;

/// Fitted envelope `∫_E w / ∫_I w ≤ C (|E|/|I|)^α`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AInfFit {
    pub c: f64,
    pub alpha: f64,
    /// Largest observed mass ratio per fraction, aligned with [`AINF_FRACTIONS`].
    pub max_ratio: Vec<f64>,
}

/// Scan `(E, I)` pairs and fit the A∞ envelope.
///
/// Each scanned `I` is cut into 32 equal cells; `E` runs over unions of
/// consecutive cells of length `f|I|` at offsets `f|I|/2`. `α` is the
/// least-squares slope of `log max_ratio(f)` against `log f`, and `C` the
/// smallest constant making the envelope hold at every fraction.
pub fn ainf_ratio_test(w: &Weight, window: &Interval, scales: &[f64]) -> Result<AInfFit> {
    check_scales(scales)?;
    let u = w.function();
    u.check_interval(window)?;
    let mut fams = Vec::new();
    for &s in scales {
        fams.extend(sliding_intervals(window, s)?);
    }
    let per: Vec<Result<[f64; 4]>> = {
        use rayon::prelude::*;
        fams.par_iter()
            .map(|iv| {
                let h = iv.len() / AINF_CELLS as f64;
                let mut cells = [0.0; AINF_CELLS];
                for (k, c) in cells.iter_mut().enumerate() {
                    let a = iv.a + k as f64 * h;
                    let b = if k + 1 == AINF_CELLS { iv.b } else { a + h };
                    *c = u.integral(a, b)?;
                }
                let total: f64 = cells.iter().sum();
                if !(total > 0.0) {
                    return Err(Error::ZeroMass { a: iv.a, b: iv.b });
                }
                let mut out = [0.0; 4];
                for (m, r) in out.iter_mut().enumerate() {
                    let len = AINF_CELLS >> (m + 1);
                    let stride = (len / 2).max(1);
                    let mut best: f64 = 0.0;
                    let mut s = 0;
                    while s + len <= AINF_CELLS {
                        let e: f64 = cells[s..s + len].iter().sum();
                        best = best.max(e / total);
                        s += stride;
                    }
                    *r = best;
                }
                Ok(out)
            })
            .collect()
    };
    let mut max_ratio = [0.0f64; 4];
    for r in per {
        let r = r?;
        for m in 0..4 {
            max_ratio[m] = max_ratio[m].max(r[m]);
        }
    }
    let pts: Vec<(f64, f64)> = AINF_FRACTIONS
        .iter()
        .zip(&max_ratio)
        .map(|(f, r)| (f.ln(), r.ln()))
        .collect();
    let alpha = least_squares_slope(&pts);
    let c = AINF_FRACTIONS
        .iter()
        .zip(&max_ratio)
        .map(|(f, r)| r / f.powf(alpha))
        .fold(0.0, f64::max);
    Ok(AInfFit {
        c,
        alpha,
        max_ratio: max_ratio.to_vec(),
    })
}

/// Result of the reverse Hölder scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReverseHolder {
    /// Largest accepted exponent.
    pub p: f64,
    /// `sup_I avg(w^p) / avg(w)^p` at that exponent.
    pub c: f64,
    /// Constant per tested exponent (`inf` where `w^p` is not integrable).
    pub tried: Vec<(f64, f64)>,
}

/// `sup_I avg_I(w^p) / avg_I(w)^p` over the sliding family.
pub fn reverse_holder_constant(
    w: &Weight,
    window: &Interval,
    scales: &[f64],
    p: f64,
) -> Result<f64> {
    check_scales(scales)?;
    let u = w.function();
    u.check_interval(window)?;
    let wp = w.power_of(p);
    let mut best = 0.0f64;
    for &s in scales {
        let fam = sliding_intervals(window, s)?;
        let (v, _) = ordered_max(&fam, |iv| {
            let m = u.integral(iv.a, iv.b)? / iv.len();
            if !(m > 0.0) {
                return Err(Error::ZeroMass { a: iv.a, b: iv.b });
            }
            match wp.integral(iv.a, iv.b) {
                Ok(mp) => Ok(mp / iv.len() / m.powf(p)),
                Err(Error::QuadratureFailure { .. }) => Ok(f64::INFINITY),
                Err(e) => Err(e),
            }
        })?;
        best = best.max(v);
    }
    Ok(best)
}

/// Walk the ascending exponent grid and keep the largest `p` whose constant
/// stays within `cap`.
pub fn reverse_holder(
    w: &Weight,
    window: &Interval,
    scales: &[f64],
    p_grid: &[f64],
    cap: f64,
) -> Result<ReverseHolder> {
    if p_grid.is_empty()
        || p_grid.iter().any(|p| !(*p > 1.0 && *p <= 4.0))
        || p_grid.windows(2).any(|v| v[1] <= v[0])
    {
        return Err(Error::Invalid(
            "p grid must be ascending inside (1, 4]".into(),
        ));
    }
    let mut tried = Vec::new();
    let mut accepted: Option<(f64, f64)> = None;
    for &p in p_grid {
        let c = reverse_holder_constant(w, window, scales, p)?;
        tried.push((p, c));
        if c <= cap {
            accepted = Some((p, c));
        } else {
            break;
        }
    }
    match accepted {
        Some((p, c)) => Ok(ReverseHolder { p, c, tried }),
        None => Err(Error::NoValidP { cap }),
    }
}

/// `u∘h` on the part of `h`'s window that `h` maps into `u`'s window.
pub fn pullback(u: &RealFunction, h: &Homeo1D) -> Result<RealFunction> {
    let range = h.range();
    let target = range.intersect(&u.window()).ok_or(Error::EmptyWindow)?;
    let lo = if target.a.is_finite() {
        h.inverse_eval(target.a)?
    } else {
        f64::NEG_INFINITY
    };
    let hi = if target.b.is_finite() {
        h.inverse_eval(target.b)?
    } else {
        f64::INFINITY
    };
    let window = Interval::new(lo, hi)
        .ok()
        .and_then(|w| w.intersect(&h.window()))
        .ok_or(Error::EmptyWindow)?;
    let mut sing = Vec::new();
    for s in u.singularities_in(target.a.max(-1e300), target.b.min(1e300)) {
        sing.push(h.inverse_eval(s)?);
    }
    let (ue, he) = (u.eval_fn(), h.eval_fn());
    Ok(RealFunction::new(
        format!("{}∘{}", u.name(), h.name()),
        Arc::new(move |x| ue(he(x))),
        window,
    )
    .with_singularities(sing)
    .with_quad(u.quad_options()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homeo::{make_catalog, Params};

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    #[test]
    fn oscillation_examples() {
        let c = RealFunction::constant(5.0);
        assert_eq!(mean_oscillation(&c, &iv(-3.0, 7.0)).unwrap(), 0.0);
        let x = RealFunction::linear();
        assert!((mean_oscillation(&x, &iv(0.0, 1.0)).unwrap() - 0.25).abs() < 1e-12);
        let u = crate::homeo::log_deriv(&Homeo1D::identity()).unwrap();
        assert_eq!(mean_oscillation(&u, &iv(0.0, 2.0)).unwrap(), 0.0);
    }

    #[test]
    fn log_abs_oscillation_is_two_over_e() {
        // ∫_0^1 |ln x + 1| dx = 2/e on [0,1]; symmetric extension leaves it unchanged
        let u = RealFunction::log_abs(0.0);
        let mo = mean_oscillation(&u, &iv(-1.0, 1.0)).unwrap();
        assert!((mo - 2.0 / std::f64::consts::E).abs() < 1e-9, "{mo}");
        let mo = mean_oscillation(&u, &iv(-1e-3, 1e-3)).unwrap();
        assert!((mo - 2.0 / std::f64::consts::E).abs() < 1e-9, "{mo}");
    }

    #[test]
    fn norm_and_profile_examples() {
        let x = RealFunction::linear();
        let b = bmo_norm_estimate(&x, &iv(0.0, 1.0), &[1.0, 0.5, 0.25]).unwrap();
        assert!((b.value - 0.25).abs() < 1e-12);
        assert_eq!(b.argmax_scale, 1.0);
        let l = RealFunction::log_abs(0.0);
        let b = bmo_norm_estimate(&l, &iv(-1.0, 1.0), &[1.0, 0.5]).unwrap();
        assert!(b.value > 0.0 && b.value.is_finite());

        let u = RealFunction::new("log(x+1)", Arc::new(|x: f64| x.ln_1p()), iv(0.0, 100.0));
        let p = vmo_profile(&u, &iv(0.0, 100.0), &[1.0, 0.5, 0.25, 0.125]).unwrap();
        assert!(p.values.windows(2).all(|w| w[1] < w[0]));
        assert!(p.last() < 0.05);
    }

    #[test]
    fn tiled_log_derivative_profile() {
        let g = make_catalog("g_tiled", &Params::new())
            .unwrap()
            .line()
            .unwrap();
        let u = crate::homeo::log_deriv(&g).unwrap();
        let p = vmo_profile(&u, &iv(0.0, 44.0), &[22.0, 1.0, 0.125, 0.015625]).unwrap();
        assert!(p.first() > 0.3, "{:?}", p.values);
        assert!(p.last() < 0.05, "{:?}", p.values);
    }

    #[test]
    fn jn_examples() {
        let c = RealFunction::constant(1.0);
        let t = jn_tail(&c, &iv(0.0, 1.0), &[0.1, 0.5]).unwrap();
        assert_eq!(t.fractions, vec![0.0, 0.0]);
        let x = RealFunction::linear();
        let t = jn_tail(&x, &iv(0.0, 1.0), &[0.25]).unwrap();
        assert_eq!(t.fractions, vec![0.5]);
        let l = RealFunction::log_abs(0.0);
        let t = jn_tail(&l, &iv(-1.0, 1.0), &[1.0, 2.0, 3.0]).unwrap();
        // |ln x + 1| > t  <=>  x < e^{-1-t} on the left tail; exact fractions e^{-1-t}
        for (k, f) in t.fractions.iter().enumerate() {
            let exact = (-2.0 - k as f64).exp();
            assert!((f - exact).abs() < 2e-4, "{f} vs {exact}");
        }
        assert!((t.decay_rate().unwrap() - 1.0).abs() < 0.01);
        assert!(t.to_csv().starts_with("threshold,fraction\n"));
    }

    #[test]
    fn ainf_examples() {
        let fit = ainf_ratio_test(&Weight::unit(), &iv(0.0, 4.0), &[2.0, 1.0]).unwrap();
        assert!((fit.alpha - 1.0).abs() < 1e-12 && (fit.c - 1.0).abs() < 1e-12);
        let h = make_catalog("h_parabolic", &Params::new())
            .unwrap()
            .line()
            .unwrap();
        let w = Weight::derivative_of(&h).unwrap();
        let fit = ainf_ratio_test(&w, &iv(0.0, 10.0), &[10.0, 5.0, 2.5]).unwrap();
        assert!(
            fit.alpha > 0.85 && fit.alpha <= 1.0 && fit.c < 2.0,
            "{fit:?}"
        );
        let fit = ainf_ratio_test(&Weight::power(0.5), &iv(-1.0, 1.0), &[2.0, 1.0, 0.5]).unwrap();
        assert!(
            fit.alpha < 1.0 && fit.alpha > 0.0 && fit.c.is_finite(),
            "{fit:?}"
        );
        let zero = Weight::new(RealFunction::constant(0.0), &iv(0.0, 1.0)).unwrap();
        assert!(matches!(
            ainf_ratio_test(&zero, &iv(0.0, 1.0), &[1.0]),
            Err(Error::ZeroMass { .. })
        ));
    }

    #[test]
    fn reverse_holder_examples() {
        let r = reverse_holder(
            &Weight::unit(),
            &iv(0.0, 1.0),
            &[1.0, 0.5],
            &[2.0, 4.0],
            10.0,
        )
        .unwrap();
        assert_eq!(r.p, 4.0);
        assert!((r.c - 1.0).abs() < 1e-12);
        let h = make_catalog("h_parabolic", &Params::new())
            .unwrap()
            .line()
            .unwrap();
        let w = Weight::derivative_of(&h).unwrap();
        let c = reverse_holder_constant(&w, &iv(0.0, 10.0), &[10.0, 1.0, 0.5], 2.0).unwrap();
        // on [0,1]: avg w^2 = 28/3, avg w = 3
        assert!((28.0 / 27.0 - 1e-12..=4.0 / 3.0).contains(&c), "{c}");
        let w = Weight::power(-0.5);
        let r = reverse_holder(&w, &iv(-1.0, 1.0), &[2.0, 1.0], &[1.5, 1.75, 2.0], 1e6).unwrap();
        assert_eq!(r.p, 1.75);
        assert!(r.c > 2.0);
        assert_eq!(r.tried.last().unwrap().1, f64::INFINITY);
        assert!(matches!(
            reverse_holder(&w, &iv(-1.0, 1.0), &[2.0], &[2.0], 1e6),
            Err(Error::NoValidP { .. })
        ));
    }

    #[test]
    fn pullback_examples() {
        let h = make_catalog("h_parabolic", &Params::new())
            .unwrap()
            .line()
            .unwrap();
        let c = pullback(&RealFunction::constant(3.0), &h).unwrap();
        assert_eq!(c.eval(1.7), 3.0);
        let p = pullback(&RealFunction::linear(), &h).unwrap();
        for x in [-2.0, 0.0, 1.5] {
            assert_eq!(p.eval(x), h.eval(x).unwrap());
        }
        let l = RealFunction::log_abs(3.0).with_window(iv(0.0, 8.0));
        let p = pullback(&l, &h).unwrap();
        assert!((p.window().a - 0.0).abs() < 1e-12 && (p.window().b - 2.0).abs() < 1e-9);
        assert!((p.singularities_in(0.0, 2.0)[0] - 1.0).abs() < 1e-12);
        assert!(mean_oscillation(&p, &iv(0.5, 1.5)).unwrap().is_finite());
        let far = RealFunction::constant(1.0).with_window(iv(1e9, 1e9 + 1.0));
        let bounded = h.clone().with_window(iv(0.0, 1.0));
        assert!(matches!(pullback(&far, &bounded), Err(Error::EmptyWindow)));
    }
}
