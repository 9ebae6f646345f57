//! Beurling–Ahlfors extension
//! `F(x + iy) = ½[(α + β) + i(α - β)]`, with `α`, `β` the averages of `h`
//! over `[x, x + y]` and `[x - y, x]`.

use std::sync::Arc;

use num_complex::Complex64;

use super::{QCMap, QcKind};
use crate::error::Result;
use crate::homeo::Homeo1D;
use crate::quad::{integrate, QuadOptions};

/// Averages and the boundary values they are built from.
struct Averages {
    alpha: f64,
    beta: f64,
    h_plus: f64,
    h_mid: f64,
    h_minus: f64,
}

fn averages(h: &Homeo1D, x: f64, y: f64) -> Result<Averages> {
    let h_plus = h.eval(x + y)?;
    let h_mid = h.eval(x)?;
    let h_minus = h.eval(x - y)?;
    // Integrate increments against h(x) so the tolerance tracks the local rise.
    let scale = (h_plus - h_minus).abs().max(f64::MIN_POSITIVE);
    let opts = QuadOptions {
        tol: 1e-13 * scale * y,
        max_depth: 30,
    };
    let f = h.eval_fn();
    let up = integrate(|t| f(x + t) - h_mid, 0.0, y, opts)?;
    let down = integrate(|t| f(x - t) - h_mid, 0.0, y, opts)?;
    Ok(Averages {
        alpha: h_mid + up / y,
        beta: h_mid + down / y,
        h_plus,
        h_mid,
        h_minus,
    })
}

/// The Beurling–Ahlfors extension of `h`, with exact partials from the
/// Leibniz rule applied to the averaging integrals.
pub fn ba_extend(h: &Homeo1D) -> QCMap {
    let he = h.clone();
    let eval = Arc::new(move |z: Complex64| -> Result<Complex64> {
        let a = averages(&he, z.re, z.im)?;
        Ok(Complex64::new(
            0.5 * (a.alpha + a.beta),
            0.5 * (a.alpha - a.beta),
        ))
    });
    let hp = h.clone();
    let partials = Arc::new(move |z: Complex64| -> Result<(Complex64, Complex64)> {
        let y = z.im;
        let a = averages(&hp, z.re, y)?;
        let ax = (a.h_plus - a.h_mid) / y;
        let ay = (a.h_plus - a.alpha) / y;
        let bx = (a.h_mid - a.h_minus) / y;
        let by = (a.h_minus - a.beta) / y;
        let fx = Complex64::new(0.5 * (ax + bx), 0.5 * (ax - bx));
        let fy = Complex64::new(0.5 * (ay + by), 0.5 * (ay - by));
        let i = Complex64::i();
        Ok(((fx - i * fy) * 0.5, (fx + i * fy) * 0.5))
    });
    QCMap::from_parts(
        format!("ba({})", h.name()),
        QcKind::BeurlingAhlfors,
        eval,
        Some(partials),
        Some(h.clone()),
    )
}
