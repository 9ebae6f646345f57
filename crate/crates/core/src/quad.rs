//! One-dimensional quadrature.
//!
//! The adaptive rule compares an 8-point Gauss–Legendre estimate on a panel
//! with the sum over its two halves and bisects until the two agree to the
//! absolute tolerance. Gauss nodes never touch panel endpoints or the panel
//! center, so integrable endpoint singularities such as `log|x|` at a split
//! point are resolved without special casing.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Adaptive quadrature settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    /// Absolute tolerance per panel.
    pub tol: f64,
    pub max_depth: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            tol: 1e-10,
            max_depth: 30,
        }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn gl8() -> &'static (Vec<f64>, Vec<f64>) {
    static GL8: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    GL8.get_or_init(|| gauss_legendre(8))
}

/// Fixed Gauss–Legendre rule with `nodes`/`weights` on `[a, b]`.
pub fn fixed_rule<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, nodes: &[f64], weights: &[f64]) -> f64 {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let mut s = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        s += w * f(c + r * x);
    }
    s * r
}

fn gl8_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (x, w) = gl8();
    fixed_rule(f, a, b, x, w)
}

/// Adaptive integral of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Invalid(format!("cannot integrate over [{a}, {b}]")));
    }
    if b < a {
        return integrate(f, b, a, opts).map(|v| -v);
    }
    let whole = gl8_panel(&f, a, b);
    let mut stack = vec![(a, b, whole, 0usize)];
    let mut total = 0.0;
    // Left-to-right traversal keeps the summation order fixed.
    while let Some((lo, hi, est, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = gl8_panel(&f, lo, mid);
        let right = gl8_panel(&f, mid, hi);
        let refined = left + right;
        if !refined.is_finite() {
            return Err(Error::QuadratureFailure {
                a: lo,
                b: hi,
                depth,
            });
        }
        if (refined - est).abs() <= opts.tol {
            total += refined;
        } else if depth + 1 >= opts.max_depth {
            return Err(Error::QuadratureFailure {
                a: lo,
                b: hi,
                depth: depth + 1,
            });
        } else {
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    Ok(total)
}

/// Integral with the default options.
pub fn integrate_default<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    integrate(f, a, b, QuadOptions::default())
}

/// Tanh–sinh (double exponential) rule on `[a, b]`, robust to integrable
/// algebraic or logarithmic singularities at either endpoint. Points are
/// generated as offsets from the nearer endpoint so that a singularity sitting
/// exactly on an endpoint is never evaluated.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return tanh_sinh(f, b, a, tol).map(|v| -v);
    }
    let half = std::f64::consts::FRAC_PI_2;
    let r = 0.5 * (b - a);
    let c = 0.5 * (a + b);
    // (near, deep): contributions of ±t, split by distance to the endpoint.
    // Mass closer than r 1e-150 to an endpoint must be negligible for an
    // integrable singularity.
    let term = |t: f64| -> (f64, f64) {
        let u = half * t.sinh();
        let cu = u.cosh();
        let w = half * t.cosh() / (cu * cu);
        if t == 0.0 {
            return (f(c) * w * r, 0.0);
        }
        // r (1 - tanh u) = 2r / (1 + e^{2u})
        let d = 2.0 * r / (1.0 + (2.0 * u).exp());
        if !(d > 0.0) || !w.is_finite() || w == 0.0 {
            return (0.0, 0.0);
        }
        // each side is dropped once its node rounds onto the endpoint
        let (xp, xm) = (b - d, a + d);
        let mut v = 0.0;
        if xp < b {
            v += f(xp);
        }
        if xm > a {
            v += f(xm);
        }
        let v = v * w * r;
        if d < r * 1e-150 {
            (0.0, v)
        } else {
            (v, 0.0)
        }
    };
    let t_max = 6.5;
    let mut h = 1.0;
    let (mut near, mut deep) = (0.0, 0.0);
    let mut t = 0.0;
    while t <= t_max {
        let (n, d) = term(t);
        near += n;
        deep += d;
        t += h;
    }
    let mut prev = near * h;
    for level in 0..12 {
        h *= 0.5;
        let mut t = h;
        while t <= t_max {
            let (n, d) = term(t);
            near += n;
            deep += d;
            t += 2.0 * h;
        }
        let est = near * h;
        if !est.is_finite() || !(deep * h).is_finite() || (deep * h).abs() > tol {
            return Err(Error::QuadratureFailure { a, b, depth: level });
        }
        if (est - prev).abs() <= tol {
            return Ok(est + deep * h);
        }
        prev = est;
    }
    Err(Error::QuadratureFailure { a, b, depth: 12 })
}

/// Panels graded geometrically toward a singular endpoint `s` of `[s, e]`
/// (or `[e, s]`): adaptive Gauss on each `2:1` panel. At `s = 0` the last
/// sliver goes to tanh–sinh, whose nodes approach 0 without rounding; elsewhere
/// grading continues until panels reach a few ulps of `s`, below which the
/// integrand cannot be sampled.
fn graded<F: Fn(f64) -> f64>(f: &F, s: f64, e: f64, opts: QuadOptions) -> Result<f64> {
    let len = e - s;
    let floor = if s == 0.0 {
        0.0
    } else {
        64.0 * f64::EPSILON * s.abs()
    };
    let mut total = 0.0;
    let mut k = 0;
    loop {
        let outer = s + len * 0.5f64.powi(k);
        let inner = s + len * 0.5f64.powi(k + 1);
        total += integrate(f, inner.min(outer), inner.max(outer), opts)? * len.signum();
        k += 1;
        let width = (len * 0.5f64.powi(k)).abs();
        if s == 0.0 && k >= 30 {
            let sliver = s + len * 0.5f64.powi(k);
            total += tanh_sinh(f, s.min(sliver), s.max(sliver), opts.tol)? * len.signum();
            return Ok(total);
        }
        if width <= floor {
            return Ok(total);
        }
    }
}

/// Integral over `[a, b]` that splits at the listed singular points and
/// grades the mesh toward each of them.
pub fn integrate_singular<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    singular: &[f64],
    opts: QuadOptions,
) -> Result<f64> {
    if b < a {
        return integrate_singular(f, b, a, singular, opts).map(|v| -v);
    }
    let mut cuts: Vec<f64> = singular
        .iter()
        .copied()
        .filter(|s| *s >= a && *s <= b)
        .collect();
    if cuts.is_empty() {
        return integrate(f, a, b, opts);
    }
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    let mut pts = vec![a];
    pts.extend(cuts.iter().copied().filter(|s| *s > a && *s < b));
    pts.push(b);
    let is_sing = |x: f64| cuts.contains(&x);
    let mut total = 0.0;
    for w in pts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        total += match (is_sing(lo), is_sing(hi)) {
            (false, false) => integrate(&f, lo, hi, opts)?,
            (true, false) => graded(&f, lo, hi, opts)?,
            (false, true) => -graded(&f, hi, lo, opts)?,
            (true, true) => {
                let m = 0.5 * (lo + hi);
                graded(&f, lo, m, opts)? - graded(&f, hi, m, opts)?
            }
        };
    }
    Ok(total)
}
