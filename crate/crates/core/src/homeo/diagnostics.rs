//! Sup-scans over the boundary map: quasisymmetry quotients, the symmetric
//! profile, doubling and continuity moduli.
//!
//! For a scale `t` the base points are spaced `t/4` across the scan window;
//! the first maximizer in left-to-right order is recorded.

use std::sync::Arc;

use super::Homeo1D;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::oscillation::RealFunction;
use crate::profile::{
    check_scales, grid_points, ordered_max, sliding_intervals, Profile, ScanMeta, ScanResult,
    STRIDE_FRACTION,
};

/// `(h(x+t) - h(x)) / (h(x) - h(x-t))`.
pub fn qs_quotient(h: &Homeo1D, x: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::DegenerateStep(format!("t = {t} must be positive")));
    }
    let hx = h.eval(x)?;
    let num = h.eval(x + t)? - hx;
    let den = hx - h.eval(x - t)?;
    if den.abs() < 1e-300 {
        return Err(Error::DegenerateStep(format!(
            "denominator {den:e} at x = {x}, t = {t}"
        )));
    }
    Ok(num / den)
}

fn quotient_dev(h: &Homeo1D, x: f64, t: f64) -> Result<f64> {
    let q = qs_quotient(h, x, t)?;
    Ok(q.max(1.0 / q))
}

/// Per-scale sup of `max(q, 1/q)` over the scan grid.
fn quotient_scan(h: &Homeo1D, window: &Interval, scales: &[f64]) -> Result<Vec<(f64, f64)>> {
    check_scales(scales)?;
    if !window.is_bounded() {
        return Err(Error::Invalid("scan window must be bounded".into()));
    }
    scales
        .iter()
        .map(|&t| {
            let xs = grid_points(window, t * STRIDE_FRACTION);
            let (v, i) = ordered_max(&xs, |&x| quotient_dev(h, x, t))?;
            Ok((v, xs[i]))
        })
        .collect()
}

/// Lower bound for the quasisymmetry constant from the scan grid.
pub fn qs_constant(h: &Homeo1D, window: &Interval, scales: &[f64]) -> Result<ScanResult> {
    let per = quotient_scan(h, window, scales)?;
    let mut best = ScanResult {
        value: f64::NEG_INFINITY,
        argmax_x: f64::NAN,
        argmax_scale: f64::NAN,
        window: *window,
    };
    for (&(v, x), &t) in per.iter().zip(scales) {
        if v > best.value {
            best.value = v;
            best.argmax_x = x;
            best.argmax_scale = t;
        }
    }
    Ok(best)
}

/// `ρ(t) = sup_x max(q, 1/q) - 1` for each scale.
pub fn symmetric_profile(h: &Homeo1D, window: &Interval, scales: &[f64]) -> Result<Profile> {
    let per = quotient_scan(h, window, scales)?;
    Profile::new(
        scales.to_vec(),
        per.iter().map(|(v, _)| (v - 1.0).max(0.0)).collect(),
        per.iter().map(|(_, x)| *x).collect(),
        ScanMeta {
            label: format!("symmetric_profile({})", h.name()),
            window: *window,
            stride_fraction: STRIDE_FRACTION,
        },
    )
}

/// `sup m_h(2I) / m_h(I)` over intervals `I` of the given lengths inside the
/// window. The doubled intervals must lie in the trusted domain of `h`.
pub fn doubling_constant(h: &Homeo1D, window: &Interval, scales: &[f64]) -> Result<ScanResult> {
    check_scales(scales)?;
    let mut best = ScanResult {
        value: f64::NEG_INFINITY,
        argmax_x: f64::NAN,
        argmax_scale: f64::NAN,
        window: *window,
    };
    for &s in scales {
        let fam = sliding_intervals(window, s)?;
        let (v, i) = ordered_max(&fam, |iv| {
            let m = h.eval(iv.b)? - h.eval(iv.a)?;
            let d = iv.dilate(2.0)?;
            let m2 = h.eval(d.b)? - h.eval(d.a)?;
            if m <= 0.0 {
                return Err(Error::ZeroMass { a: iv.a, b: iv.b });
            }
            Ok(m2 / m)
        })?;
        if v > best.value {
            best.value = v;
            best.argmax_x = fam[i].mid();
            best.argmax_scale = s;
        }
    }
    Ok(best)
}

/// `ω(δ) = sup_x h(x + δ) - h(x)` over base points in the window.
pub fn modulus_of_continuity(h: &Homeo1D, window: &Interval, scales: &[f64]) -> Result<Profile> {
    check_scales(scales)?;
    if !window.is_bounded() {
        return Err(Error::Invalid("scan window must be bounded".into()));
    }
    let mut values = Vec::with_capacity(scales.len());
    let mut args = Vec::with_capacity(scales.len());
    for &d in scales {
        let xs = grid_points(window, d * STRIDE_FRACTION);
        let (v, i) = ordered_max(&xs, |&x| Ok(h.eval(x + d)? - h.eval(x)?))?;
        values.push(v);
        args.push(xs[i]);
    }
    Profile::new(
        scales.to_vec(),
        values,
        args,
        ScanMeta {
            label: format!("modulus_of_continuity({})", h.name()),
            window: *window,
            stride_fraction: STRIDE_FRACTION,
        },
    )
}

/// `u = log h'` on the window of `h`.
pub fn log_deriv(h: &Homeo1D) -> Result<RealFunction> {
    let d = h.deriv_fn().ok_or(Error::MissingDerivative)?;
    let w = h.window();
    let probe = if w.is_bounded() {
        w
    } else {
        Interval::new(w.a.max(-100.0), w.b.min(100.0))?
    };
    for k in 0..=1000 {
        let x = probe.a + probe.len() * k as f64 / 1000.0;
        let v = d(x);
        if !(v > 0.0) {
            return Err(Error::NonpositiveDerivative { x });
        }
    }
    Ok(RealFunction::new(
        format!("log_deriv({})", h.name()),
        Arc::new(move |x| d(x).ln()),
        w,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homeo::{compose, make_catalog, Params};

    fn cat(name: &str) -> Homeo1D {
        make_catalog(name, &Params::new()).unwrap().line().unwrap()
    }

    #[test]
    fn quotient_examples() {
        let aff = Homeo1D::affine(2.0, 1.0).unwrap();
        assert!((qs_quotient(&aff, 0.3, 0.7).unwrap() - 1.0).abs() < 1e-14);
        let h = cat("h_parabolic");
        assert_eq!(qs_quotient(&h, 0.0, 1.0).unwrap(), 1.0);
        assert!((qs_quotient(&h, 2.0, 1.0).unwrap() - 7.0 / 5.0).abs() < 1e-15);
        assert!(matches!(
            qs_quotient(&h, 0.0, 0.0),
            Err(Error::DegenerateStep(_))
        ));
        assert!(matches!(
            qs_quotient(&h, 0.0, -1.0),
            Err(Error::DegenerateStep(_))
        ));
    }

    #[test]
    fn quotient_affine_invariance() {
        let h = cat("h_parabolic");
        let ah = h.post_affine(3.5, -2.0).unwrap();
        for (x, t) in [(0.0, 1.0), (2.0, 0.5), (-3.0, 2.0), (5.5, 0.25)] {
            let d = qs_quotient(&ah, x, t).unwrap() - qs_quotient(&h, x, t).unwrap();
            assert!(d.abs() < 1e-12);
        }
    }

    #[test]
    fn constants_for_affine_and_identity() {
        let w = Interval::new(-5.0, 5.0).unwrap();
        let s = [1.0, 0.5, 0.25];
        assert_eq!(
            qs_constant(&Homeo1D::identity(), &w, &s).unwrap().value,
            1.0
        );
        let aff = Homeo1D::affine(2.0, 1.0).unwrap();
        assert!((qs_constant(&aff, &w, &s).unwrap().value - 1.0).abs() < 1e-12);
        let p = symmetric_profile(&Homeo1D::affine(2.0, 0.0).unwrap(), &w, &s).unwrap();
        assert!(p.values.iter().all(|v| *v == 0.0));
        assert!(
            (doubling_constant(&Homeo1D::identity(), &w, &s)
                .unwrap()
                .value
                - 2.0)
                .abs()
                < 1e-12
        );
    }

    #[test]
    fn parabolic_scan_values() {
        let h = cat("h_parabolic");
        let q = qs_constant(&h, &Interval::new(-10.0, 10.0).unwrap(), &[1.0, 0.5, 0.25]).unwrap();
        assert!(q.value >= 7.0 / 5.0);
        let p = symmetric_profile(
            &h,
            &Interval::new(0.0, 10.0).unwrap(),
            &[1.0, 0.5, 0.25, 0.125],
        )
        .unwrap();
        assert!(p.values.windows(2).all(|w| w[1] < w[0]));
        let d = doubling_constant(&h, &Interval::new(0.0, 10.0).unwrap(), &[1.0]).unwrap();
        assert!(d.value > 2.0 && d.value <= 4.0, "{}", d.value);
    }

    #[test]
    fn modulus_examples() {
        let id = Homeo1D::identity();
        let w = Interval::new(0.0, 10.0).unwrap();
        let p = modulus_of_continuity(&id, &w, &[1.0, 0.5]).unwrap();
        assert_eq!(p.values, vec![1.0, 0.5]);
        let h = cat("h_parabolic");
        let p = modulus_of_continuity(&h, &Interval::new(0.0, 100.0).unwrap(), &[1.0]).unwrap();
        assert!((p.values[0] - 203.0).abs() < 1e-9);
        let inv = h.inverse();
        let p = modulus_of_continuity(&inv, &Interval::new(0.0, 1e4).unwrap(), &[1.0]).unwrap();
        assert!(p.values[0] <= 1.0);
        assert!((p.values[0] - (2f64.sqrt() - 1.0)).abs() < 1e-9);
    }

    #[test]
    fn log_deriv_examples() {
        let u = log_deriv(&Homeo1D::identity()).unwrap();
        assert_eq!(u.eval(3.0), 0.0);
        let h = cat("h_parabolic");
        let u = log_deriv(&h).unwrap();
        assert!((u.eval(1e-300) - 2f64.ln()).abs() < 1e-15);
        let e = cat("h_exp_window");
        let u = log_deriv(&e).unwrap();
        for x in [-4.0, 0.0, 2.5] {
            assert!((u.eval(x) - x).abs() < 1e-14);
        }
        let no_d = Homeo1D::closed_form("nod", std::sync::Arc::new(|x| x), None);
        assert!(matches!(log_deriv(&no_d), Err(Error::MissingDerivative)));
    }

    #[test]
    fn composed_derivative_matches_finite_differences() {
        let g = cat("g_tiled");
        let h = cat("h_parabolic");
        let c = compose(&g, &h).unwrap();
        for k in 0..200 {
            let x = -6.0 + 0.0613 * k as f64;
            let step = 1e-6;
            let fd = (c.eval(x + step).unwrap() - c.eval(x - step).unwrap()) / (2.0 * step);
            let d = c.deriv(x).unwrap();
            // skip the C^1 joints of g where the second derivative jumps
            assert!((fd - d).abs() < 1e-6 * (1.0 + d.abs()), "{x}: {fd} vs {d}");
        }
    }
}
