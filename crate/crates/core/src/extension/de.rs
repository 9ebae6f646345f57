//! Barycentric (Douady–Earle) extension.
//!
//! For a circle homeomorphism `φ` the average
//! `ξ_φ(w) = (1/2π) ∫ γ_w(φ(ζ)) |dζ|`, `γ_w(z) = (z - w)/(1 - w̄ z)`,
//! has a unique zero `w₀` in the disk and `e(φ)(0) = w₀`. Line maps are
//! handled through the Cayley transform. To keep the barycenter problem well
//! conditioned near the real axis, `e(h)(z)` is evaluated via naturality:
//! with `A₁(t) = x + y t` and `A₂(s) = p + q s` chosen so that
//! `k = A₂⁻¹ ∘ h ∘ A₁` fixes `±1`, `e(h)(z) = A₂(e(k)(i))`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{cayley, cayley_inv, central_partials, QCMap, QcKind};
use crate::error::{Error, Result};
use crate::homeo::{CircleHomeo, Homeo1D};

/// Largest admissible `|w|` for Newton iterates.
const DISK_MARGIN: f64 = 1e-9;

/// Quadrature and solver settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeOptions {
    /// Initial number of trapezoid nodes.
    pub n0: usize,
    /// Node cap for the doubling loop.
    pub n_max: usize,
    /// Successive doublings must agree to this tolerance.
    pub tol: f64,
    pub newton_steps: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for DeOptions {
    fn default() -> Self {
        DeOptions {
            n0: 2048,
            n_max: 1 << 16,
            tol: 1e-10,
            newton_steps: 100,
            restarts: 64,
            seed: 0x5eed,
        }
    }
}

/// `φ(e^{iθ_j})` at `θ_j = 2πj/n`.
pub fn circle_samples(phi: &CircleHomeo, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|j| phi.point(2.0 * PI * j as f64 / n as f64))
        .collect()
}

/// Trapezoid value of `ξ` from precomputed samples.
pub fn de_average_samples(u: &[Complex64], w: Complex64) -> Complex64 {
    let wc = w.conj();
    let one = Complex64::new(1.0, 0.0);
    let s: Complex64 = u.iter().map(|&z| (z - w) / (one - wc * z)).sum();
    s / u.len() as f64
}

/// `ξ` with the Wirtinger derivatives `∂ξ/∂w`, `∂ξ/∂w̄`.
fn average_with_derivatives(u: &[Complex64], w: Complex64) -> (Complex64, Complex64, Complex64) {
    let wc = w.conj();
    let one = Complex64::new(1.0, 0.0);
    let (mut xi, mut a, mut b) = (
        Complex64::default(),
        Complex64::default(),
        Complex64::default(),
    );
    for &z in u {
        let d = one / (one - wc * z);
        let g = (z - w) * d;
        xi += g;
        a -= d;
        b += g * z * d;
    }
    let n = u.len() as f64;
    (xi / n, a / n, b / n)
}

/// `ξ_φ(w)` by periodic trapezoid, doubling nodes until two successive values
/// agree to `opts.tol`.
pub fn de_average(phi: &CircleHomeo, w: Complex64, opts: &DeOptions) -> Result<Complex64> {
    if !(w.norm() < 1.0) {
        return Err(Error::Invalid(format!(
            "|w| = {} must be below 1",
            w.norm()
        )));
    }
    let mut n = opts.n0;
    let mut prev = de_average_samples(&circle_samples(phi, n), w);
    while n < opts.n_max {
        n *= 2;
        let next = de_average_samples(&circle_samples(phi, n), w);
        if (next - prev).norm() < opts.tol {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::QuadratureFailure {
        a: 0.0,
        b: 2.0 * PI,
        depth: n.trailing_zeros() as usize,
    })
}

/// Damped Newton on `ξ(w) = 0` from `seed`, with step halving that keeps the
/// iterate inside the disk and decreases `|ξ|`. Returns the final point and
/// residual.
pub fn barycenter_from(u: &[Complex64], seed: Complex64, steps: usize) -> (Complex64, f64) {
    let rmax = 1.0 - DISK_MARGIN;
    let mut w = if seed.norm() < rmax {
        seed
    } else {
        seed * (0.5 / seed.norm())
    };
    let (mut xi, mut a, mut b) = average_with_derivatives(u, w);
    let mut res = xi.norm();
    for _ in 0..steps {
        if res <= 1e-13 {
            break;
        }
        // real Jacobian of (Re ξ, Im ξ) with respect to (Re w, Im w)
        let cx = a + b;
        let cy = Complex64::i() * (a - b);
        let det = cx.re * cy.im - cy.re * cx.im;
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let dx = (-xi.re * cy.im + cy.re * xi.im) / det;
        let dy = (-cx.re * xi.im + cx.im * xi.re) / det;
        let delta = Complex64::new(dx, dy);
        let mut lambda = 1.0;
        let mut moved = false;
        while lambda > 1e-12 {
            let cand = w + delta * lambda;
            if cand.norm() < rmax {
                let (x2, a2, b2) = average_with_derivatives(u, cand);
                if x2.norm() < res {
                    w = cand;
                    xi = x2;
                    a = a2;
                    b = b2;
                    res = x2.norm();
                    moved = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !moved {
            break;
        }
    }
    (w, res)
}

/// Barycenter of sampled boundary values: Newton from `seed` (the average at
/// 0 when absent), then seeded random restarts.
fn barycenter_samples(u: &[Complex64], opts: &DeOptions) -> Result<Complex64> {
    barycenter_seeded(u, opts, None)
}

fn barycenter_seeded(
    u: &[Complex64],
    opts: &DeOptions,
    seed: Option<Complex64>,
) -> Result<Complex64> {
    let seed = seed.unwrap_or_else(|| de_average_samples(u, Complex64::new(0.0, 0.0)));
    let (w, res) = barycenter_from(u, seed, opts.newton_steps);
    if res <= 1e-10 {
        return Ok(w);
    }
    let mut best = (w, res);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.restarts {
        let r = 0.95 * rng.gen::<f64>().sqrt();
        let t = 2.0 * PI * rng.gen::<f64>();
        let (w, res) = barycenter_from(u, Complex64::from_polar(r, t), opts.newton_steps);
        if res <= 1e-10 {
            return Ok(w);
        }
        if res < best.1 {
            best = (w, res);
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.newton_steps,
        residual: best.1,
    })
}

/// `w₀` with `ξ_φ(w₀) = 0`, doubling the node count until two successive
/// solutions agree to `opts.tol`.
pub fn de_barycenter(phi: &CircleHomeo, opts: &DeOptions) -> Result<Complex64> {
    doubling(opts, |n| barycenter_samples(&circle_samples(phi, n), opts)).map(|(w, _)| w)
}

fn doubling<F: Fn(usize) -> Result<Complex64>>(
    opts: &DeOptions,
    f: F,
) -> Result<(Complex64, usize)> {
    let mut n = opts.n0;
    let mut prev = f(n)?;
    while n < opts.n_max {
        n *= 2;
        let next = f(n)?;
        if (next - prev).norm() < opts.tol {
            return Ok((next, n));
        }
        prev = next;
    }
    Err(Error::QuadratureFailure {
        a: 0.0,
        b: 2.0 * PI,
        depth: n.trailing_zeros() as usize,
    })
}

/// Normalizing affine data `(p, q)` for the point `x + iy`.
fn normalization(h: &Homeo1D, x: f64, y: f64) -> Result<(f64, f64)> {
    let hp = h.eval(x + y)?;
    let hm = h.eval(x - y)?;
    Ok((0.5 * (hp + hm), 0.5 * (hp - hm)))
}

/// Sample of `T ∘ k ∘ T⁻¹` at `θ = 2πj/n`, `k(t) = (h(x + y t) - p)/q`.
fn line_sample(
    h: &Homeo1D,
    x: f64,
    y: f64,
    p: f64,
    q: f64,
    j: usize,
    n: usize,
) -> Result<Complex64> {
    if j == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let half = PI * j as f64 / n as f64;
    let t = -half.cos() / half.sin();
    let s = (h.eval(x + y * t)? - p) / q;
    let d = s * s + 1.0;
    Ok(Complex64::new((s * s - 1.0) / d, -2.0 * s / d))
}

fn line_samples(h: &Homeo1D, x: f64, y: f64, p: f64, q: f64, n: usize) -> Result<Vec<Complex64>> {
    (0..n).map(|j| line_sample(h, x, y, p, q, j, n)).collect()
}

/// Samples on `2n` nodes, keeping the `n` already computed.
fn refine_samples(
    h: &Homeo1D,
    x: f64,
    y: f64,
    p: f64,
    q: f64,
    u: &[Complex64],
) -> Result<Vec<Complex64>> {
    let n = u.len();
    let mut out = Vec::with_capacity(2 * n);
    for (j, &v) in u.iter().enumerate() {
        out.push(v);
        out.push(line_sample(h, x, y, p, q, 2 * j + 1, 2 * n)?);
    }
    Ok(out)
}

fn check_pole(z: Complex64) -> Result<()> {
    let r = cayley(z)?.norm();
    if r > 1.0 - DISK_MARGIN {
        return Err(Error::BoundaryBlowup { margin: 1.0 - r });
    }
    Ok(())
}

fn eval_fixed(
    h: &Homeo1D,
    z: Complex64,
    n: usize,
    opts: &DeOptions,
    seed: Complex64,
) -> Result<Complex64> {
    let (p, q) = normalization(h, z.re, z.im)?;
    let u = line_samples(h, z.re, z.im, p, q, n)?;
    let w = barycenter_seeded(&u, opts, Some(seed))?;
    Ok(cayley_inv(w)? * q + p)
}

/// Normalized barycenter at `z`, the node count that met the doubling
/// tolerance and the normalization `(p, q)`.
fn eval_normalized(
    h: &Homeo1D,
    z: Complex64,
    opts: &DeOptions,
) -> Result<(Complex64, usize, f64, f64)> {
    if !(z.im > 0.0) {
        return Err(Error::Invalid(format!(
            "{z} is not in the upper half-plane"
        )));
    }
    check_pole(z)?;
    let (x, y) = (z.re, z.im);
    let (p, q) = normalization(h, x, y)?;
    let mut n = opts.n0;
    let mut u = line_samples(h, x, y, p, q, n)?;
    let mut prev = barycenter_seeded(&u, opts, None)?;
    while n < opts.n_max {
        u = refine_samples(h, x, y, p, q, &u)?;
        n *= 2;
        let next = barycenter_seeded(&u, opts, Some(prev))?;
        if (next - prev).norm() < opts.tol {
            return Ok((next, n, p, q));
        }
        prev = next;
    }
    Err(Error::QuadratureFailure {
        a: 0.0,
        b: 2.0 * PI,
        depth: n.trailing_zeros() as usize,
    })
}

/// `e(h)(z)` with the node count that met the doubling tolerance.
pub fn de_eval_line(h: &Homeo1D, z: Complex64, opts: &DeOptions) -> Result<(Complex64, usize)> {
    let (w, n, p, q) = eval_normalized(h, z, opts)?;
    Ok((cayley_inv(w)? * q + p, n))
}

/// Exact partials of the trapezoid-discretized extension by implicit
/// differentiation of `ξ(w; x, y) = 0`, given `h'`.
fn de_partials_implicit(
    h: &Homeo1D,
    dh: &(dyn Fn(f64) -> f64 + Send + Sync),
    z: Complex64,
    opts: &DeOptions,
) -> Result<(Complex64, Complex64)> {
    let (w, n, p, q) = eval_normalized(h, z, opts)?;
    let (x, y) = (z.re, z.im);
    let (dp_, dm_) = (dh(x + y), dh(x - y));
    let (px, py) = (0.5 * (dp_ + dm_), 0.5 * (dp_ - dm_));
    let (qx, qy) = (py, px);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::i();
    let wc = w.conj();
    let kappa = 1.0 - w.norm_sqr();
    let (mut xi_x, mut xi_y) = (Complex64::default(), Complex64::default());
    let (mut a, mut b) = (Complex64::default(), Complex64::default());
    for j in 0..n {
        let u = line_sample(h, x, y, p, q, j, n)?;
        let d = one / (one - wc * u);
        let g = (u - w) * d;
        a -= d;
        b += g * u * d;
        if j == 0 {
            continue;
        }
        let half = PI * j as f64 / n as f64;
        let t = -half.cos() / half.sin();
        let xt = x + y * t;
        let s = (h.eval(xt)? - p) / q;
        let slope = dh(xt);
        let sx = (slope - px - s * qx) / q;
        let sy = (t * slope - py - s * qy) / q;
        let du = 2.0 * i / ((s + i) * (s + i));
        let dg = kappa * d * d * du;
        xi_x += dg * sx;
        xi_y += dg * sy;
    }
    let nf = n as f64;
    let (a, b, xi_x, xi_y) = (a / nf, b / nf, xi_x / nf, xi_y / nf);
    let det = a.norm_sqr() - b.norm_sqr();
    if !(det.abs() > 1e-300) {
        return Err(Error::DegenerateJacobian { x, y, value: det });
    }
    let solve = |v: Complex64| (-(a.conj() * v) + b * v.conj()) / det;
    let (wx, wy) = (solve(xi_x), solve(xi_y));
    let zz = cayley_inv(w)?;
    let dz = 2.0 * i / ((one - w) * (one - w));
    let fx = px + qx * zz + q * dz * wx;
    let fy = py + qy * zz + q * dz * wy;
    Ok(((fx - i * fy) * 0.5, (fx + i * fy) * 0.5))
}

/// The barycentric extension of a line homeomorphism.
///
/// Dilatation partials come from implicit differentiation of the barycenter
/// equation when `h'` is known. Otherwise central differences with step
/// `1e-4 y` are used, at the node count found at the center and with Newton
/// seeded by the center's barycenter.
pub fn de_extend_line(h: &Homeo1D, opts: DeOptions) -> QCMap {
    let he = h.clone();
    let eval = Arc::new(move |z: Complex64| de_eval_line(&he, z, &opts).map(|r| r.0));
    let hp = h.clone();
    let partials = Arc::new(move |z: Complex64| {
        if let Some(d) = hp.deriv_fn() {
            return de_partials_implicit(&hp, &*d, z, &opts);
        }
        de_partials_stencil(&hp, z, &opts)
    });
    QCMap::from_parts(
        format!("de({})", h.name()),
        QcKind::DouadyEarle,
        eval,
        Some(partials),
        Some(h.clone()),
    )
}

fn de_partials_stencil(
    h: &Homeo1D,
    z: Complex64,
    opts: &DeOptions,
) -> Result<(Complex64, Complex64)> {
    let (w0, n, _, _) = eval_normalized(h, z, opts)?;
    central_partials(
        |w| {
            check_pole(w)?;
            eval_fixed(h, w, n, opts, w0)
        },
        z,
        1e-4 * z.im,
    )
}
