//! Increasing homeomorphisms of the line and sense-preserving homeomorphisms
//! of the circle, together with the boundary-map diagnostics.

mod catalog;
mod diagnostics;
mod pchip;

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::profile::fmt_f64;

pub use crate::profile::ScanResult;
pub use catalog::{
    catalog_names, g_tiled_base, make_catalog, CatalogItem, Params, G_TILED_PERIOD, G_TILED_RISE,
};
pub use diagnostics::{
    doubling_constant, log_deriv, modulus_of_continuity, qs_constant, qs_quotient,
    symmetric_profile,
};

/// Shared real function handle.
pub type Func = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum HomeoKind {
    ClosedForm,
    Composed,
    Inverse,
    SampledMonotone,
}

/// Increasing homeomorphism `h` of (a window of) the real line.
#[derive(Clone)]
pub struct Homeo1D {
    name: String,
    eval: Func,
    deriv: Option<Func>,
    window: Interval,
    kind: HomeoKind,
}

impl std::fmt::Debug for Homeo1D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Homeo1D")
            .field("name", &self.name)
            .field("window", &self.window)
            .field("kind", &self.kind)
            .field("has_deriv", &self.deriv.is_some())
            .finish()
    }
}

const INVERSE_MAX_ITER: usize = 200;

impl Homeo1D {
    pub fn closed_form(name: impl Into<String>, eval: Func, deriv: Option<Func>) -> Self {
        Homeo1D {
            name: name.into(),
            eval,
            deriv,
            window: Interval::real_line(),
            kind: HomeoKind::ClosedForm,
        }
    }

    pub fn identity() -> Self {
        Homeo1D::closed_form("identity", Arc::new(|x| x), Some(Arc::new(|_| 1.0)))
    }

    /// `x -> a x + b` with `a > 0`.
    pub fn affine(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::BadParams(format!(
                "affine slope {a} must be positive"
            )));
        }
        Ok(Homeo1D::closed_form(
            format!("affine({a},{b})"),
            Arc::new(move |x| a * x + b),
            Some(Arc::new(move |_| a)),
        ))
    }

    /// Restrict the trusted domain.
    pub fn with_window(mut self, window: Interval) -> Self {
        self.window = window;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn window(&self) -> Interval {
        self.window
    }

    pub fn kind(&self) -> HomeoKind {
        self.kind
    }

    pub fn has_deriv(&self) -> bool {
        self.deriv.is_some()
    }

    fn checks_window(&self) -> bool {
        self.kind != HomeoKind::ClosedForm
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if self.checks_window() {
            self.window.check_contains(x)?;
        }
        Ok((self.eval)(x))
    }

    /// Evaluation without the window check.
    pub fn eval_raw(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn deriv(&self, x: f64) -> Result<f64> {
        let d = self.deriv.as_ref().ok_or(Error::MissingDerivative)?;
        if self.checks_window() {
            self.window.check_contains(x)?;
        }
        Ok(d(x))
    }

    pub fn deriv_fn(&self) -> Option<Func> {
        self.deriv.clone()
    }

    pub fn eval_fn(&self) -> Func {
        self.eval.clone()
    }

    /// Image of the window. Unbounded ends map to unbounded ends.
    pub fn range(&self) -> Interval {
        let lo = if self.window.a.is_finite() {
            (self.eval)(self.window.a)
        } else {
            f64::NEG_INFINITY
        };
        let hi = if self.window.b.is_finite() {
            (self.eval)(self.window.b)
        } else {
            f64::INFINITY
        };
        Interval { a: lo, b: hi }
    }

    /// `h^{-1}(y)` by bracketing bisection, refined by Newton steps when a
    /// derivative is available.
    pub fn inverse_eval(&self, y: f64) -> Result<f64> {
        let range = self.range();
        if !(range.a <= y && y <= range.b) {
            return Err(Error::OutOfRange {
                y,
                lo: range.a,
                hi: range.b,
            });
        }
        let tol = 1e-12 * (1.0 + y.abs());
        let (mut lo, mut hi) = self.bracket(y)?;
        let f = |x: f64| (self.eval)(x) - y;
        let (flo, fhi) = (f(lo), f(hi));
        if flo.abs() <= tol {
            return Ok(lo);
        }
        if fhi.abs() <= tol {
            return Ok(hi);
        }
        let mut x = 0.5 * (lo + hi);
        let mut best = (f64::INFINITY, x);
        for _ in 0..INVERSE_MAX_ITER {
            let fx = f(x);
            if fx.abs() < best.0 {
                best = (fx.abs(), x);
            }
            if fx.abs() <= tol {
                return Ok(x);
            }
            if fx < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            // The bracket cannot shrink below floating point resolution.
            if hi - lo <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
                return Ok(best.1);
            }
            let newton = self.deriv.as_ref().and_then(|d| {
                let slope = d(x);
                let cand = x - fx / slope;
                (slope > 0.0 && cand > lo && cand < hi).then_some(cand)
            });
            x = newton.unwrap_or(0.5 * (lo + hi));
        }
        Err(Error::NoConvergence {
            iterations: INVERSE_MAX_ITER,
            residual: best.0,
        })
    }

    fn bracket(&self, y: f64) -> Result<(f64, f64)> {
        let w = self.window;
        if w.is_bounded() {
            return Ok((w.a, w.b));
        }
        let center = if w.a.is_finite() {
            w.a
        } else if w.b.is_finite() {
            w.b
        } else {
            0.0
        };
        let mut lo = if w.a.is_finite() { w.a } else { center - 1.0 };
        let mut hi = if w.b.is_finite() { w.b } else { center + 1.0 };
        let mut step = 1.0;
        for _ in 0..2100 {
            let ok_lo = (self.eval)(lo) <= y;
            let ok_hi = (self.eval)(hi) >= y;
            if ok_lo && ok_hi {
                return Ok((lo, hi));
            }
            step *= 2.0;
            if !ok_lo && !w.a.is_finite() {
                lo = center - step;
            }
            if !ok_hi && !w.b.is_finite() {
                hi = center + step;
            }
            if !lo.is_finite() || !hi.is_finite() {
                break;
            }
        }
        Err(Error::NoConvergence {
            iterations: 2100,
            residual: f64::INFINITY,
        })
    }

    /// The inverse homeomorphism, defined on the range of `self`.
    pub fn inverse(&self) -> Homeo1D {
        let fwd = self.clone();
        let eval: Func = Arc::new(move |y| fwd.inverse_eval(y).unwrap_or(f64::NAN));
        let deriv = self.deriv.as_ref().map(|d| {
            let d = d.clone();
            let fwd = self.clone();
            Arc::new(move |y: f64| 1.0 / d(fwd.inverse_eval(y).unwrap_or(f64::NAN))) as Func
        });
        Homeo1D {
            name: format!("inverse({})", self.name),
            eval,
            deriv,
            window: self.range(),
            kind: HomeoKind::Inverse,
        }
    }

    /// `x -> a h(x) + b`, keeping the kind and window.
    pub fn post_affine(&self, a: f64, b: f64) -> Result<Homeo1D> {
        if !(a > 0.0) {
            return Err(Error::BadParams(format!("slope {a} must be positive")));
        }
        let e = self.eval.clone();
        let d = self.deriv.clone();
        Ok(Homeo1D {
            name: format!("{a}*{}+{b}", self.name),
            eval: Arc::new(move |x| a * e(x) + b),
            deriv: d.map(|d| Arc::new(move |x: f64| a * d(x)) as Func),
            window: self.window,
            kind: self.kind,
        })
    }

    /// Monotone piecewise-cubic interpolant through strictly increasing samples.
    pub fn sampled(name: impl Into<String>, xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let interp = Arc::new(pchip::Pchip::new(xs, ys)?);
        let window = interp.domain();
        let i2 = interp.clone();
        Ok(Homeo1D {
            name: name.into(),
            eval: Arc::new(move |x| interp.eval(x)),
            deriv: Some(Arc::new(move |x| i2.deriv(x))),
            window,
            kind: HomeoKind::SampledMonotone,
        })
    }

    /// Tabulate on `n + 1` equispaced nodes of a bounded window.
    pub fn sample_table(&self, window: &Interval, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        if !window.is_bounded() || n == 0 {
            return Err(Error::Invalid(
                "sampling needs a bounded window and n > 0".into(),
            ));
        }
        let xs: Vec<f64> = (0..=n)
            .map(|j| window.a + window.len() * j as f64 / n as f64)
            .collect();
        let ys = xs
            .iter()
            .map(|&x| self.eval(x))
            .collect::<Result<Vec<_>>>()?;
        Ok((xs, ys))
    }

    /// CSV table with header `x,h_x`.
    pub fn write_csv(&self, path: &Path, window: &Interval, n: usize) -> Result<()> {
        let (xs, ys) = self.sample_table(window, n)?;
        let mut out = String::from("x,h_x\n");
        for (x, y) in xs.iter().zip(&ys) {
            out.push_str(&format!("{},{}\n", fmt_f64(*x), fmt_f64(*y)));
        }
        std::fs::File::create(path)?.write_all(out.as_bytes())?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path)?;
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["x", "h_x"] {
            return Err(Error::Invalid(format!(
                "expected header `x,h_x`, found {headers:?}"
            )));
        }
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let p = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Invalid(format!("bad number `{s}`: {e}")))
            };
            xs.push(p(&rec[0])?);
            ys.push(p(&rec[1])?);
        }
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "sampled".into());
        Homeo1D::sampled(name, xs, ys)
    }
}

/// `g ∘ h` on the largest window where both evaluate.
pub fn compose(g: &Homeo1D, h: &Homeo1D) -> Result<Homeo1D> {
    let window = composed_window(g, h)?;
    let (ge, he) = (g.eval.clone(), h.eval.clone());
    let deriv = match (&g.deriv, &h.deriv) {
        (Some(gd), Some(hd)) => {
            let (gd, hd, he) = (gd.clone(), hd.clone(), h.eval.clone());
            Some(Arc::new(move |x: f64| gd(he(x)) * hd(x)) as Func)
        }
        _ => None,
    };
    let kind = if g.kind == HomeoKind::ClosedForm
        && h.kind == HomeoKind::ClosedForm
        && window == Interval::real_line()
    {
        // Closed forms of the whole line compose without window checks.
        HomeoKind::ClosedForm
    } else {
        HomeoKind::Composed
    };
    Ok(Homeo1D {
        name: format!("{}∘{}", g.name, h.name),
        eval: Arc::new(move |x| ge(he(x))),
        deriv,
        window,
        kind,
    })
}

fn composed_window(g: &Homeo1D, h: &Homeo1D) -> Result<Interval> {
    let hw = h.window;
    let gw = g.window;
    let hr = h.range();
    let overlap = hr.intersect(&gw).ok_or(Error::EmptyWindow)?;
    let a = if overlap.a <= hr.a {
        hw.a
    } else {
        h.inverse_eval(overlap.a)?
    };
    let b = if overlap.b >= hr.b {
        hw.b
    } else {
        h.inverse_eval(overlap.b)?
    };
    let mut w = Interval::new(a.max(hw.a), b.min(hw.b)).map_err(|_| Error::EmptyWindow)?;
    // Pull the numeric preimage endpoints inward until they map inside g's window.
    for _ in 0..64 {
        let ok_a = !w.a.is_finite() || gw.contains(h.eval_raw(w.a));
        let ok_b = !w.b.is_finite() || gw.contains(h.eval_raw(w.b));
        if ok_a && ok_b {
            return Ok(w);
        }
        if !ok_a {
            w.a = next_up(w.a);
        }
        if !ok_b {
            w.b = next_down(w.b);
        }
    }
    Err(Error::EmptyWindow)
}

fn next_up(x: f64) -> f64 {
    x + x.abs().max(1.0) * f64::EPSILON
}

fn next_down(x: f64) -> f64 {
    x - x.abs().max(1.0) * f64::EPSILON
}

/// Sense-preserving circle homeomorphism through its lift `θ -> lift(θ)` with
/// `lift(θ + 2π) = lift(θ) + 2π`.
#[derive(Clone)]
pub struct CircleHomeo {
    name: String,
    // Lift on [0, 2π); extended by periodicity.
    base: Func,
}

impl std::fmt::Debug for CircleHomeo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CircleHomeo")
            .field("name", &self.name)
            .finish()
    }
}

impl CircleHomeo {
    /// `lift` must satisfy the periodicity identity on all of ℝ; only its
    /// values on `[0, 2π)` are used.
    pub fn from_lift(name: impl Into<String>, lift: Func) -> Self {
        CircleHomeo {
            name: name.into(),
            base: lift,
        }
    }

    pub fn identity() -> Self {
        CircleHomeo::from_lift("circle_identity", Arc::new(|t| t))
    }

    pub fn rotation(sigma: f64) -> Self {
        CircleHomeo::from_lift(format!("rotation({sigma})"), Arc::new(move |t| t + sigma))
    }

    /// Boundary values of `ζ -> e^{iσ} (ζ + a)/(1 + ā ζ)`, the Möbius map
    /// sending `0` to `e^{iσ} a`.
    pub fn mobius(a: Complex64, sigma: f64) -> Result<Self> {
        if a.norm() >= 1.0 {
            return Err(Error::BadParams(format!("|a| = {} must be < 1", a.norm())));
        }
        let ac = a.conj();
        Ok(CircleHomeo::from_lift(
            format!("mobius({a},{sigma})"),
            Arc::new(move |t: f64| {
                let z = Complex64::from_polar(1.0, t);
                t + sigma - 2.0 * (Complex64::new(1.0, 0.0) + ac * z).arg()
            }),
        ))
    }

    /// `T ∘ h ∘ T^{-1}` for the Cayley transform `T(z) = (z - i)/(z + i)`.
    pub fn cayley_conjugate(h: &Homeo1D) -> Self {
        let e = h.eval_fn();
        CircleHomeo::from_lift(
            format!("cayley({})", h.name()),
            Arc::new(move |t: f64| {
                let r = t.rem_euclid(2.0 * PI);
                let turns = t - r;
                if r == 0.0 {
                    return turns;
                }
                let x = -1.0 / (0.5 * r).tan();
                turns + 2.0 * f64::atan2(1.0, -e(x))
            }),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lift(&self, theta: f64) -> f64 {
        let r = theta.rem_euclid(2.0 * PI);
        (self.base)(r) + (theta - r)
    }

    pub fn point(&self, theta: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.lift(theta))
    }

    /// Post-compose with the Möbius map `ζ -> e^{iσ}(ζ - a)/(1 - ā ζ)`.
    pub fn post_mobius(&self, a: Complex64, sigma: f64) -> Result<Self> {
        let outer = CircleHomeo::mobius(-a, sigma)?;
        let inner = self.clone();
        let o = outer.clone();
        Ok(CircleHomeo::from_lift(
            format!("mobius∘{}", self.name),
            Arc::new(move |t| {
                let s = inner.lift(t);
                o.lift(s)
            }),
        ))
    }
}
