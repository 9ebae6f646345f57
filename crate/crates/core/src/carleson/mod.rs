//! Carleson-box masses of densities on the upper half-plane, Carleson norms
//! and vanishing profiles, the disk-cap variant and the Cayley pull-back of
//! disk densities.
//!
//! Densities are integrated against `dx dy`; the dilatation-induced measure
//! `|μ|² dx dy / y` is [`BoxDensity::from_field`].

mod disk;

use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extension::DilatationField;
use crate::interval::Interval;
use crate::profile::{
    check_scales, fmt_f64, ordered_max, sliding_intervals, Profile, ScanMeta, ScanResult,
    STRIDE_FRACTION,
};
use crate::quad::{gauss_legendre, integrate, QuadOptions};

pub use disk::{disk_box_mass, pullback_cayley, DiskDensity};

/// Default truncation height as a fraction of `|I|`.
pub const DEFAULT_FLOOR_FRACTION: f64 = 1.0 / 4096.0;

type DensityFn = Arc<dyn Fn(f64, f64) -> Result<f64> + Send + Sync>;

/// A nonnegative density on `𝕌` with its trusted domain.
#[derive(Clone)]
pub struct BoxDensity {
    name: String,
    f: DensityFn,
    window: Interval,
    top: f64,
    y_floor: Option<f64>,
}

impl std::fmt::Debug for BoxDensity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BoxDensity")
            .field("name", &self.name)
            .field("window", &self.window)
            .field("top", &self.top)
            .field("y_floor", &self.y_floor)
            .finish()
    }
}

impl BoxDensity {
    /// Density defined on all of `𝕌`.
    pub fn new(name: impl Into<String>, f: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>) -> Self {
        BoxDensity {
            name: name.into(),
            f: Arc::new(move |x, y| Ok(f(x, y))),
            window: Interval::real_line(),
            top: f64::INFINITY,
            y_floor: None,
        }
    }

    pub(crate) fn fallible(name: impl Into<String>, f: DensityFn) -> Self {
        BoxDensity {
            name: name.into(),
            f,
            window: Interval::real_line(),
            top: f64::INFINITY,
            y_floor: None,
        }
    }

    /// `|μ|² / y` from a sampled field, truncated at the lowest grid row.
    pub fn from_field(field: &DilatationField) -> Self {
        let fld = Arc::new(field.clone());
        let grid = field.grid;
        let floor = grid.height(grid.levels);
        BoxDensity {
            name: "field".into(),
            f: Arc::new(move |x, y| {
                fld.abs2_at(x, y)
                    .map(|v| v / y)
                    .ok_or(Error::WindowExceeded {
                        a: x,
                        b: x,
                        height: y,
                    })
            }),
            window: grid.window,
            top: grid.top,
            y_floor: Some(floor),
        }
    }

    /// The zero density.
    pub fn zero() -> Self {
        BoxDensity::new("zero", Arc::new(|_, _| 0.0))
    }

    /// Absolute truncation height for every box.
    pub fn with_floor(mut self, y_floor: f64) -> Self {
        self.y_floor = Some(y_floor);
        self
    }

    pub fn with_domain(mut self, window: Interval, top: f64) -> Self {
        self.window = window;
        self.top = top;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn window(&self) -> Interval {
        self.window
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        (self.f)(x, y)
    }

    /// Truncation height used for a box over `I`.
    pub fn floor_for(&self, i: &Interval) -> f64 {
        self.y_floor.unwrap_or(i.len() * DEFAULT_FLOOR_FRACTION)
    }

    fn check_box(&self, i: &Interval, height: f64) -> Result<()> {
        if !self.window.contains_interval(i) || height > self.top * (1.0 + 1e-12) {
            return Err(Error::WindowExceeded {
                a: i.a,
                b: i.b,
                height,
            });
        }
        Ok(())
    }

    /// `∬_{I × (lo, hi]} d dx dy`: adaptive Gauss in `y`, composite 4-point
    /// Gauss in `x` on cells no wider than `hi / 2`.
    pub fn region_mass(&self, i: &Interval, lo: f64, hi: f64) -> Result<f64> {
        if !(lo >= 0.0 && hi > lo) {
            return Err(Error::Invalid(format!("bad height range ({lo}, {hi}]")));
        }
        self.check_box(i, hi)?;
        let cells = ((i.len() / (0.5 * hi)).ceil() as usize).max(1);
        let w = i.len() / cells as f64;
        let (xn, xw) = gl4();
        let err = std::cell::Cell::new(None);
        let row = |y: f64| -> f64 {
            let mut s = 0.0;
            for c in 0..cells {
                let mid = i.a + (c as f64 + 0.5) * w;
                for (t, wt) in xn.iter().zip(xw) {
                    match self.eval(mid + 0.5 * w * t, y) {
                        Ok(v) => s += wt * v,
                        Err(e) => {
                            err.set(Some(e));
                            return f64::NAN;
                        }
                    }
                }
            }
            0.5 * w * s
        };
        let opts = QuadOptions {
            tol: 1e-12 * i.len().max(1e-3),
            max_depth: 30,
        };
        let v = integrate(row, lo, hi, opts);
        if let Some(e) = err.take() {
            return Err(e);
        }
        v
    }
}

fn gl4() -> &'static (Vec<f64>, Vec<f64>) {
    static GL4: std::sync::OnceLock<(Vec<f64>, Vec<f64>)> = std::sync::OnceLock::new();
    GL4.get_or_init(|| gauss_legendre(4))
}

/// Carleson box `Q_I = I × (0, |I|]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CarlesonBox {
    pub interval: Interval,
}

impl CarlesonBox {
    pub fn new(interval: Interval) -> Self {
        CarlesonBox { interval }
    }

    pub fn height(&self) -> f64 {
        self.interval.len()
    }
}

/// Truncated box mass with the per-level breakdown and the tail estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxMass {
    pub interval: Interval,
    pub y_floor: f64,
    /// Mass over `I × (y_floor, |I|]`.
    pub truncated: f64,
    /// Masses of the dyadic levels from the top down.
    pub levels: Vec<f64>,
    /// Geometric extrapolation of the mass below `y_floor`, absent when
    /// the level masses do not decay.
    pub tail: Option<f64>,
    /// The last three full levels are non-decreasing toward the axis.
    pub tail_divergent: bool,
}

impl BoxMass {
    pub fn with_tail(&self) -> f64 {
        self.truncated + self.tail.unwrap_or(0.0)
    }
}

/// Mass of the density over the truncated box, level by level on
/// `(|I| 2^{-k-1}, |I| 2^{-k}]`.
pub fn box_mass(d: &BoxDensity, i: &Interval) -> Result<BoxMass> {
    let height = i.len();
    let floor = d.floor_for(i);
    if !(floor > 0.0 && floor < height) {
        return Err(Error::Invalid(format!(
            "floor {floor} must lie in (0, {height})"
        )));
    }
    d.check_box(i, height)?;
    let mut levels = Vec::new();
    let mut full = Vec::new();
    let mut hi = height;
    while hi > floor * (1.0 + 1e-12) {
        let lo = (0.5 * hi).max(floor);
        let m = d.region_mass(i, lo, hi)?;
        levels.push(m);
        if lo == 0.5 * hi {
            full.push(m);
        }
        hi *= 0.5;
    }
    let truncated = levels.iter().sum();
    let (tail, tail_divergent) = tail_estimate(&full);
    Ok(BoxMass {
        interval: *i,
        y_floor: floor,
        truncated,
        levels,
        tail,
        tail_divergent,
    })
}

fn tail_estimate(full: &[f64]) -> (Option<f64>, bool) {
    let n = full.len();
    if n < 3 {
        return (None, false);
    }
    let (m1, m2, m3) = (full[n - 3], full[n - 2], full[n - 1]);
    if m2 >= m1 * (1.0 - 1e-9) && m3 >= m2 * (1.0 - 1e-9) && m3 > 0.0 {
        return (None, true);
    }
    if m2 <= 0.0 || m3 <= 0.0 {
        return (Some(0.0), false);
    }
    let r = m3 / m2;
    if r >= 1.0 {
        return (None, true);
    }
    (Some(m3 * r / (1.0 - r)), false)
}

fn box_scan(d: &BoxDensity, window: &Interval, scales: &[f64]) -> Result<Vec<(f64, f64)>> {
    check_scales(scales)?;
    scales
        .iter()
        .map(|&s| {
            let fam = sliding_intervals(window, s)?;
            let (v, k) = ordered_max(&fam, |iv| Ok(box_mass(d, iv)?.truncated / iv.len()))?;
            Ok((v, fam[k].mid()))
        })
        .collect()
}

/// Sup of `mass / |I|` over the sliding family at all scales.
pub fn carleson_norm(d: &BoxDensity, window: &Interval, scales: &[f64]) -> Result<ScanResult> {
    let per = box_scan(d, window, scales)?;
    let mut best = ScanResult {
        value: f64::NEG_INFINITY,
        argmax_x: f64::NAN,
        argmax_scale: f64::NAN,
        window: *window,
    };
    for (&(v, x), &s) in per.iter().zip(scales) {
        if v > best.value {
            best = ScanResult {
                value: v,
                argmax_x: x,
                argmax_scale: s,
                window: *window,
            };
        }
    }
    Ok(best)
}

/// `c(δ) = sup_{|I| = δ} mass / |I|`.
pub fn vanishing_profile(d: &BoxDensity, window: &Interval, scales: &[f64]) -> Result<Profile> {
    let per = box_scan(d, window, scales)?;
    Profile::new(
        scales.to_vec(),
        per.iter().map(|p| p.0).collect(),
        per.iter().map(|p| p.1).collect(),
        ScanMeta {
            label: format!("vanishing_profile({})", d.name()),
            window: *window,
            stride_fraction: STRIDE_FRACTION,
        },
    )
}

/// Box masses for every interval of a family, as report rows.
pub fn box_report(d: &BoxDensity, intervals: &[Interval]) -> Result<Vec<BoxMass>> {
    intervals.iter().map(|i| box_mass(d, i)).collect()
}

/// CSV with header `interval_left,interval_right,mass,mass_over_length,tail_flag`.
pub fn box_report_csv(rows: &[BoxMass]) -> String {
    let mut out = String::from("interval_left,interval_right,mass,mass_over_length,tail_flag\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f64(r.interval.a),
            fmt_f64(r.interval.b),
            fmt_f64(r.truncated),
            fmt_f64(r.truncated / r.interval.len()),
            if r.tail_divergent { "divergent" } else { "ok" }
        ));
    }
    out
}

pub fn write_box_report(rows: &[BoxMass], path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(box_report_csv(rows).as_bytes())?;
    Ok(())
}

/// Terms of the Carleson embedding inequality for one `(λ, F)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmbeddingReport {
    /// `∬ F dλ` over `window × (y_floor, height]`.
    pub lhs: f64,
    /// `∫_window F*`.
    pub rhs_integral: f64,
    /// Scanned Carleson norm of `λ`.
    pub norm: f64,
    pub ratio: f64,
}

/// Compare `∬ F dλ` with `‖λ‖_c ∫ F*`, where `F*(t)` is the sup of `F`
/// over the cone `|x - t| ≤ y` inside `window × (y_floor, height]`.
pub fn embedding_check<F>(
    d: &BoxDensity,
    f: F,
    window: &Interval,
    height: f64,
    scales: &[f64],
) -> Result<EmbeddingReport>
where
    F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
{
    let floor = d.y_floor.unwrap_or(height * DEFAULT_FLOOR_FRACTION);
    let f = Arc::new(f);
    let product = BoxDensity::fallible("F*density", {
        let d = d.clone();
        let f = f.clone();
        Arc::new(move |x, y| Ok(f(x, y) * d.eval(x, y)?))
    });
    let product = product.with_domain(d.window, d.top);
    let mut lhs = 0.0;
    let mut hi = height;
    while hi > floor * (1.0 + 1e-12) {
        let lo = (0.5 * hi).max(floor);
        lhs += product.region_mass(window, lo, hi)?;
        hi *= 0.5;
    }
    let norm = carleson_norm(d, window, scales)?.value;
    // F* on a uniform grid, integrated by the trapezoid rule
    const NT: usize = 256;
    const NY: usize = 64;
    const NX: usize = 17;
    let step = window.len() / NT as f64;
    let ratio_y = (height / floor).powf(1.0 / (NY - 1) as f64);
    let fstar: Vec<f64> = (0..=NT)
        .map(|k| {
            let t = window.a + k as f64 * step;
            let mut best: f64 = 0.0;
            for iy in 0..NY {
                let y = floor * ratio_y.powi(iy as i32);
                let (a, b) = ((t - y).max(window.a), (t + y).min(window.b));
                for ix in 0..NX {
                    let x = a + (b - a) * ix as f64 / (NX - 1) as f64;
                    best = best.max(f(x, y));
                }
            }
            best
        })
        .collect();
    let rhs_integral = step * (fstar.iter().sum::<f64>() - 0.5 * (fstar[0] + fstar[NT]));
    Ok(EmbeddingReport {
        lhs,
        rhs_integral,
        norm,
        ratio: lhs / (norm * rhs_integral),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::{ba_extend, complex_dilatation, GridSpec};
    use crate::homeo::Homeo1D;
    use std::f64::consts::LN_2;

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    fn strip() -> BoxDensity {
        BoxDensity::new(
            "strip",
            Arc::new(|_, y| if y > 1.0 && y <= 2.0 { 1.0 / y } else { 0.0 }),
        )
    }

    #[test]
    fn zero_density_masses() {
        let m = box_mass(&BoxDensity::zero(), &iv(0.0, 1.0)).unwrap();
        assert_eq!(m.truncated, 0.0);
        assert!(!m.tail_divergent);
        let p = vanishing_profile(&BoxDensity::zero(), &iv(-4.0, 4.0), &[2.0, 1.0, 0.5]).unwrap();
        assert!(p.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn strip_mass_and_norm() {
        let m = box_mass(&strip(), &iv(0.0, 4.0)).unwrap();
        assert!((m.truncated - 4.0 * LN_2).abs() < 1e-8, "{}", m.truncated);
        let n = carleson_norm(&strip(), &iv(-8.0, 8.0), &[8.0, 4.0, 2.0]).unwrap();
        assert!((n.value - LN_2).abs() < 1e-8);
    }

    #[test]
    fn constant_dilatation_is_log_divergent() {
        let d =
            BoxDensity::new("1/(9y)", Arc::new(|_, y| 1.0 / (9.0 * y))).with_floor(1.0 / 1024.0);
        let m = box_mass(&d, &iv(0.0, 1.0)).unwrap();
        assert!((m.truncated - 10.0 * LN_2 / 9.0).abs() < 1e-10);
        assert!(m.tail_divergent && m.tail.is_none());
    }

    #[test]
    fn ba_identity_field_density() {
        let grid = GridSpec::new(iv(-1.0, 2.0), 1.0, 10).unwrap();
        let field = complex_dilatation(&ba_extend(&Homeo1D::identity()), &grid).unwrap();
        let d = BoxDensity::from_field(&field);
        let m = box_mass(&d, &iv(0.0, 1.0)).unwrap();
        assert!(
            (m.truncated - 10.0 * LN_2 / 9.0).abs() < 1e-8,
            "{}",
            m.truncated
        );
        assert!(m.tail_divergent);
        assert!(matches!(
            box_mass(&d, &iv(0.0, 4.0)),
            Err(Error::WindowExceeded { .. })
        ));
    }

    #[test]
    fn linear_density_profile() {
        let d = BoxDensity::new("y", Arc::new(|_, y| y));
        let scales = [2.0, 1.0, 0.5, 0.25];
        let p = vanishing_profile(&d, &iv(-4.0, 4.0), &scales).unwrap();
        for (s, v) in scales.iter().zip(&p.values) {
            let f = s * DEFAULT_FLOOR_FRACTION;
            assert!((v - 0.5 * (s * s - f * f)).abs() < 1e-12, "{s} {v}");
        }
        let m = box_mass(&d, &iv(0.0, 1.0)).unwrap();
        assert!(!m.tail_divergent && m.tail.unwrap() > 0.0);
        assert!((m.with_tail() - 0.5).abs() < 1e-6);
    }

    #[test]
    fn embedding_on_strip() {
        let w = iv(-8.0, 8.0);
        let r = embedding_check(&strip(), |_, _| 1.0, &w, 4.0, &[8.0, 4.0, 2.0]).unwrap();
        assert!((r.lhs - 16.0 * LN_2).abs() < 1e-8);
        assert!((r.rhs_integral - 16.0).abs() < 1e-12);
        assert!((r.ratio - 1.0).abs() < 1e-8);
        let r = embedding_check(&strip(), |_, y| y, &w, 4.0, &[8.0, 4.0, 2.0]).unwrap();
        assert!((r.lhs - 16.0).abs() < 1e-8);
        assert!((r.rhs_integral - 64.0).abs() < 1e-9);
        assert!((r.ratio - 1.0 / (4.0 * LN_2)).abs() < 1e-8);
        let r = embedding_check(&strip(), |_, _| 0.0, &w, 4.0, &[8.0]).unwrap();
        assert_eq!(r.lhs, 0.0);
    }

    #[test]
    fn report_csv_layout() {
        let rows = box_report(&strip(), &[iv(0.0, 4.0), iv(0.0, 1.0)]).unwrap();
        let csv = box_report_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next(),
            Some("interval_left,interval_right,mass,mass_over_length,tail_flag")
        );
        assert!(lines.next().unwrap().starts_with("0,4.0000000000000000e0,"));
        assert!(lines.next().unwrap().ends_with(",0,0,ok"));
    }
}
