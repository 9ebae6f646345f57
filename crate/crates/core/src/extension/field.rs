//! Complex dilatation fields sampled on a dyadic half-plane grid.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{HalfPlanePoint, QCMap};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::profile::{fmt_f64, Profile, ScanMeta};

/// Upper bound on grid size; larger requests are rejected before any work.
pub const MAX_GRID_POINTS: usize = 4_000_000;

/// Rows at heights `y_k = top 2^{-k}` for `k = 0..=levels`, each sampled
/// across `window` at spacing `y_k / x_div`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub window: Interval,
    pub top: f64,
    pub levels: usize,
    pub x_div: f64,
}

impl GridSpec {
    /// Grid with the default spacing `y_k / 2`.
    pub fn new(window: Interval, top: f64, levels: usize) -> Result<Self> {
        let g = GridSpec {
            window,
            top,
            levels,
            x_div: 2.0,
        };
        g.validate()?;
        Ok(g)
    }

    /// Same rows with twice as many points per row.
    pub fn doubled(&self) -> Self {
        GridSpec {
            x_div: 2.0 * self.x_div,
            ..*self
        }
    }

    pub fn height(&self, k: usize) -> f64 {
        self.top * 0.5f64.powi(k as i32)
    }

    pub fn spacing(&self, k: usize) -> f64 {
        self.height(k) / self.x_div
    }

    /// Heights from the top row down.
    pub fn heights(&self) -> Vec<f64> {
        (0..=self.levels).map(|k| self.height(k)).collect()
    }

    pub fn row_len(&self, k: usize) -> usize {
        (self.window.len() / self.spacing(k) * (1.0 + 1e-12)).floor() as usize + 1
    }

    /// Total number of samples, computed without overflow.
    pub fn point_count(&self) -> f64 {
        (0..=self.levels)
            .map(|k| (self.window.len() / self.spacing(k)).floor() + 1.0)
            .sum()
    }

    pub fn validate(&self) -> Result<()> {
        if !self.window.is_bounded() {
            return Err(Error::Invalid("grid window must be bounded".into()));
        }
        if !(self.top > 0.0 && self.top.is_finite()) || !(self.x_div > 0.0) {
            return Err(Error::Invalid(
                "grid top height and spacing divisor must be positive".into(),
            ));
        }
        if self.levels > 60 {
            return Err(Error::Invalid(format!(
                "K = {} levels exceeds the supported depth of 60",
                self.levels
            )));
        }
        let n = self.point_count();
        if n > MAX_GRID_POINTS as f64 {
            return Err(Error::Invalid(format!(
                "grid needs {n:.3e} samples, above the resource limit of {MAX_GRID_POINTS}"
            )));
        }
        Ok(())
    }

    fn points(&self) -> Vec<(usize, f64, f64)> {
        let mut out = Vec::new();
        for k in 0..=self.levels {
            let (y, s) = (self.height(k), self.spacing(k));
            for j in 0..self.row_len(k) {
                out.push((k, self.window.a + j as f64 * s, y));
            }
        }
        out
    }
}

/// One grid row.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldRow {
    pub y: f64,
    pub xs: Vec<f64>,
    pub mu: Vec<Complex64>,
}

/// Complex field `μ` on a [`GridSpec`] with `sup |μ| < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DilatationField {
    pub grid: GridSpec,
    pub rows: Vec<FieldRow>,
    pub sup_norm: f64,
}

impl DilatationField {
    /// Fill the grid from `f(x, y)`, evaluating points in parallel.
    pub fn from_fn<F>(grid: &GridSpec, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Result<Complex64> + Sync,
    {
        grid.validate()?;
        let pts = grid.points();
        let vals: Vec<Result<Complex64>> = pts.par_iter().map(|&(_, x, y)| f(x, y)).collect();
        let mut rows: Vec<FieldRow> = grid
            .heights()
            .into_iter()
            .map(|y| FieldRow {
                y,
                xs: Vec::new(),
                mu: Vec::new(),
            })
            .collect();
        let mut sup: f64 = 0.0;
        for (&(k, x, y), v) in pts.iter().zip(vals) {
            let v = v?;
            let m = v.norm();
            if !(m < 1.0 - 1e-9) {
                return Err(Error::NotQuasiconformal { x, y, value: m });
            }
            sup = sup.max(m);
            rows[k].xs.push(x);
            rows[k].mu.push(v);
        }
        Ok(DilatationField {
            grid: *grid,
            rows,
            sup_norm: sup,
        })
    }

    /// The zero field on `grid`.
    pub fn zero(grid: &GridSpec) -> Result<Self> {
        DilatationField::from_fn(grid, |_, _| Ok(Complex64::new(0.0, 0.0)))
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.xs.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(x, y, μ)` in row-major order, rows from the top.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64, Complex64)> + '_ {
        self.rows
            .iter()
            .flat_map(|r| r.xs.iter().zip(&r.mu).map(move |(x, m)| (*x, r.y, *m)))
    }

    /// `|μ|²` interpolated linearly along the row, then linearly in `y`
    /// between the two bracketing rows. Below the last row the last row is
    /// used. `None` outside the grid window or above the top row.
    pub fn abs2_at(&self, x: f64, y: f64) -> Option<f64> {
        let w = self.grid.window;
        if x < w.a || x > w.b || !(y > 0.0) || y > self.grid.top * (1.0 + 1e-12) {
            return None;
        }
        let kf = (self.grid.top / y).log2();
        let last = self.rows.len() - 1;
        if kf >= last as f64 {
            return Some(row_abs2(&self.rows[last], w.a, self.grid.spacing(last), x));
        }
        let k = (kf.floor().max(0.0) as usize).min(last - 1);
        let (hi, lo) = (&self.rows[k], &self.rows[k + 1]);
        let vh = row_abs2(hi, w.a, self.grid.spacing(k), x);
        let vl = row_abs2(lo, w.a, self.grid.spacing(k + 1), x);
        let t = (y - lo.y) / (hi.y - lo.y);
        Some(vl + t * (vh - vl))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,re_mu,im_mu,abs_mu\n");
        for row in &self.rows {
            for (x, m) in row.xs.iter().zip(&row.mu) {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    fmt_f64(*x),
                    fmt_f64(row.y),
                    fmt_f64(m.re),
                    fmt_f64(m.im),
                    fmt_f64(m.norm())
                ));
            }
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }
}

fn row_abs2(row: &FieldRow, a: f64, step: f64, x: f64) -> f64 {
    let n = row.mu.len();
    if n == 1 {
        return row.mu[0].norm_sqr();
    }
    let s = ((x - a) / step).max(0.0);
    let j = (s.floor() as usize).min(n - 2);
    let t = (s - j as f64).min(1.0);
    let (v0, v1) = (row.mu[j].norm_sqr(), row.mu[j + 1].norm_sqr());
    v0 + t * (v1 - v0)
}

/// `μ = F_z̄ / F_z` on the grid.
pub fn complex_dilatation(f: &QCMap, grid: &GridSpec) -> Result<DilatationField> {
    DilatationField::from_fn(grid, |x, y| {
        let (fz, fzb) = f.partials(HalfPlanePoint::new(x, y)?)?;
        let m = fz.norm();
        if !(m >= 1e-12) {
            return Err(Error::DegenerateJacobian { x, y, value: m });
        }
        Ok(fzb / fz)
    })
}

/// `|(μ - ν)/(1 - ν̄ μ)|` at every grid point, stored as a real field.
pub fn chain_dilatation_mag(mu: &DilatationField, nu: &DilatationField) -> Result<DilatationField> {
    if mu.grid != nu.grid || mu.rows.len() != nu.rows.len() {
        return Err(Error::GridMismatch);
    }
    let one = Complex64::new(1.0, 0.0);
    let mut rows = Vec::with_capacity(mu.rows.len());
    let mut sup: f64 = 0.0;
    for (rm, rn) in mu.rows.iter().zip(&nu.rows) {
        if rm.xs != rn.xs {
            return Err(Error::GridMismatch);
        }
        let vals: Vec<Complex64> = rm
            .mu
            .iter()
            .zip(&rn.mu)
            .map(|(&m, &n)| {
                let v = (m - n).norm() / (one - n.conj() * m).norm();
                Complex64::new(v, 0.0)
            })
            .collect();
        for v in &vals {
            sup = sup.max(v.re);
        }
        rows.push(FieldRow {
            y: rm.y,
            xs: rm.xs.clone(),
            mu: vals,
        });
    }
    Ok(DilatationField {
        grid: mu.grid,
        rows,
        sup_norm: sup,
    })
}

/// `a(t) = sup |μ|` over samples with `y ≤ t`, for `t` on the row heights.
pub fn asymptotic_profile(mu: &DilatationField) -> Result<Profile> {
    let n = mu.rows.len();
    let mut values = vec![0.0; n];
    let mut args = vec![mu.grid.window.mid(); n];
    let (mut best, mut arg) = (0.0f64, mu.grid.window.mid());
    for k in (0..n).rev() {
        let row = &mu.rows[k];
        for (x, m) in row.xs.iter().zip(&row.mu) {
            if m.norm() > best {
                best = m.norm();
                arg = *x;
            }
        }
        values[k] = best;
        args[k] = arg;
    }
    Profile::new(
        mu.grid.heights(),
        values,
        args,
        ScanMeta {
            label: "asymptotic_profile".into(),
            window: mu.grid.window,
            stride_fraction: 1.0 / mu.grid.x_div,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::ba_extend;
    use crate::homeo::Homeo1D;

    fn grid() -> GridSpec {
        GridSpec::new(Interval::new(-2.0, 2.0).unwrap(), 2.0, 5).unwrap()
    }

    #[test]
    fn grid_layout_and_limits() {
        let g = grid();
        assert_eq!(g.row_len(0), 5);
        assert_eq!(g.row_len(5), 129);
        assert!(GridSpec::new(Interval::new(-8.0, 8.0).unwrap(), 8.0, 40).is_err());
        assert_eq!(g.doubled().row_len(0), 9);
    }

    #[test]
    fn identity_and_ba_fields() {
        let f = complex_dilatation(&QCMap::identity(), &grid()).unwrap();
        assert_eq!(f.sup_norm, 0.0);
        let f = complex_dilatation(&ba_extend(&Homeo1D::identity()), &grid()).unwrap();
        for (_, _, m) in f.samples() {
            assert!((m.norm() - 1.0 / 3.0).abs() < 1e-12);
        }
        let a = asymptotic_profile(&f).unwrap();
        assert!(a.values.iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-12));
    }

    #[test]
    fn chain_examples() {
        let g = grid();
        let half = DilatationField::from_fn(&g, |_, _| Ok(Complex64::new(0.5, 0.0))).unwrap();
        let quarter = DilatationField::from_fn(&g, |_, _| Ok(Complex64::new(0.25, 0.0))).unwrap();
        let c = chain_dilatation_mag(&half, &quarter).unwrap();
        assert!(c
            .samples()
            .all(|(_, _, v)| (v.re - 2.0 / 7.0).abs() < 1e-15));
        let z = chain_dilatation_mag(&half, &half).unwrap();
        assert_eq!(z.sup_norm, 0.0);
        let zero = DilatationField::zero(&g).unwrap();
        let same = chain_dilatation_mag(&half, &zero).unwrap();
        assert!(same.samples().all(|(_, _, v)| v.re == 0.5));
        let other = DilatationField::zero(&g.doubled()).unwrap();
        assert!(matches!(
            chain_dilatation_mag(&half, &other),
            Err(Error::GridMismatch)
        ));
    }

    #[test]
    fn asymptotic_profile_of_power_field() {
        let g = grid();
        let f =
            DilatationField::from_fn(&g, |_, y| Ok(Complex64::new(0.5 * (y / 4.0).sqrt(), 0.0)))
                .unwrap();
        let a = asymptotic_profile(&f).unwrap();
        for (t, v) in a.scales.iter().zip(&a.values) {
            assert!((v - 0.5 * (t / 4.0).sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn interpolation_and_csv() {
        let g = grid();
        let f = DilatationField::from_fn(&g, |x, _| Ok(Complex64::new(0.1 * (x + 2.0) / 4.0, 0.0)))
            .unwrap();
        let v = f.abs2_at(0.3, 0.7).unwrap();
        assert!((v - (0.1f64 * 2.3 / 4.0).powi(2)).abs() < 1e-3);
        assert!(f.abs2_at(3.0, 0.5).is_none());
        assert!(f.abs2_at(0.0, 3.0).is_none());
        let csv = f.to_csv();
        assert!(csv.starts_with("x,y,re_mu,im_mu,abs_mu\n"));
        assert_eq!(csv.lines().count(), f.len() + 1);
        let rejected = DilatationField::from_fn(&g, |_, _| Ok(Complex64::new(1.0, 0.0)));
        assert!(matches!(rejected, Err(Error::NotQuasiconformal { .. })));
    }
}
