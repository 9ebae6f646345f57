//! Decay curves `scale -> value` produced by every sup-scan diagnostic, and
//! the shared scan families that feed them.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;

/// Fraction of the scale used as stride for sliding scans.
pub const STRIDE_FRACTION: f64 = 0.25;

/// Provenance of a sup-scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanMeta {
    pub label: String,
    pub window: Interval,
    pub stride_fraction: f64,
}

/// A table `scale -> value` with the location where each sup was attained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub scales: Vec<f64>,
    pub values: Vec<f64>,
    pub argmax: Vec<f64>,
    pub meta: ScanMeta,
}

impl Profile {
    pub fn new(
        scales: Vec<f64>,
        values: Vec<f64>,
        argmax: Vec<f64>,
        meta: ScanMeta,
    ) -> Result<Self> {
        if scales.len() != values.len() || scales.len() != argmax.len() {
            return Err(Error::Invalid("profile columns differ in length".into()));
        }
        check_scales(&scales)?;
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::Invalid(format!(
                "profile value {v} is not finite and nonnegative"
            )));
        }
        Ok(Profile {
            scales,
            values,
            argmax,
            meta,
        })
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    /// Value at the smallest scale.
    pub fn last(&self) -> f64 {
        *self.values.last().unwrap_or(&0.0)
    }

    pub fn first(&self) -> f64 {
        *self.values.first().unwrap_or(&0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    /// True when the last `n` values never increase as the scale shrinks.
    pub fn non_increasing_tail(&self, n: usize) -> bool {
        let k = self.values.len();
        if k < n || n == 0 {
            return false;
        }
        self.values[k - n..].windows(2).all(|w| w[1] <= w[0])
    }

    /// Strictly decreasing over the last `n` values.
    pub fn decreasing_tail(&self, n: usize) -> bool {
        let k = self.values.len();
        if k < n || n == 0 {
            return false;
        }
        self.values[k - n..].windows(2).all(|w| w[1] < w[0])
    }

    /// Value at the given scale, matched to 1e-12 relative.
    pub fn value_at(&self, scale: f64) -> Option<f64> {
        self.scales
            .iter()
            .position(|s| (s - scale).abs() <= 1e-12 * scale.abs().max(1.0))
            .map(|i| self.values[i])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("scale,value,argmax_center\n");
        for i in 0..self.scales.len() {
            out.push_str(&format!(
                "{},{},{}\n",
                fmt_f64(self.scales[i]),
                fmt_f64(self.values[i]),
                fmt_f64(self.argmax[i])
            ));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }

    pub fn read_csv(path: &Path, label: &str) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path)?;
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["scale", "value", "argmax_center"] {
            return Err(Error::Invalid(format!(
                "unexpected profile header {headers:?}"
            )));
        }
        let (mut s, mut v, mut m) = (Vec::new(), Vec::new(), Vec::new());
        for rec in rdr.records() {
            let rec = rec?;
            let parse = |i: usize| -> Result<f64> {
                rec[i]
                    .parse::<f64>()
                    .map_err(|e| Error::Invalid(format!("bad number `{}`: {e}", &rec[i])))
            };
            s.push(parse(0)?);
            v.push(parse(1)?);
            m.push(parse(2)?);
        }
        let lo = m.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = m.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let window = Interval::new(lo, hi).unwrap_or_else(|_| Interval::real_line());
        Profile::new(
            s,
            v,
            m,
            ScanMeta {
                label: label.to_string(),
                window,
                stride_fraction: STRIDE_FRACTION,
            },
        )
    }
}

/// Floats in outputs carry 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// Scales must be positive and strictly decreasing.
pub fn check_scales(scales: &[f64]) -> Result<()> {
    if scales.is_empty() {
        return Err(Error::Invalid("empty scale list".into()));
    }
    if scales.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(Error::Invalid("scales must be positive and finite".into()));
    }
    if scales.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Invalid("scales must be strictly decreasing".into()));
    }
    Ok(())
}

/// `2^{-k}` ladder from `top` down, `count` entries.
pub fn dyadic_scales(top: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| top * 0.5f64.powi(k as i32)).collect()
}

/// Sample points `a, a + step, ...` up to `b` inclusive (with rounding slack).
pub fn grid_points(window: &Interval, step: f64) -> Vec<f64> {
    let n = ((window.len() / step) * (1.0 + 1e-12)).floor() as usize;
    (0..=n).map(|j| window.a + j as f64 * step).collect()
}

/// Sliding intervals of length `len` inside `window` with stride `len/4`.
pub fn sliding_intervals(window: &Interval, len: f64) -> Result<Vec<Interval>> {
    if len > window.len() * (1.0 + 1e-12) {
        return Err(Error::Invalid(format!(
            "scale {len} does not fit in window {window}"
        )));
    }
    let stride = len * STRIDE_FRACTION;
    let span = (window.len() - len).max(0.0);
    let n = ((span / stride) * (1.0 + 1e-12) + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|j| {
            let s = (window.a + j as f64 * stride).min(window.b - len);
            Interval { a: s, b: s + len }
        })
        .collect())
}

/// A scanned supremum with its maximizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanResult {
    pub value: f64,
    pub argmax_x: f64,
    pub argmax_scale: f64,
    pub window: Interval,
}

/// Evaluate `f` over `items` (possibly in parallel) and return the first
/// maximizer in input order.
pub fn ordered_max<T, F>(items: &[T], f: F) -> Result<(f64, usize)>
where
    T: Sync,
    F: Fn(&T) -> Result<f64> + Sync,
{
    let vals: Vec<Result<f64>> = items.par_iter().map(&f).collect();
    let mut best = f64::NEG_INFINITY;
    let mut arg = 0;
    for (i, v) in vals.into_iter().enumerate() {
        let v = v?;
        if v > best {
            best = v;
            arg = i;
        }
    }
    if items.is_empty() {
        return Err(Error::Invalid("empty scan family".into()));
    }
    Ok((best, arg))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sliding_family_covers_window() {
        let w = Interval::new(0.0, 1.0).unwrap();
        let fam = sliding_intervals(&w, 0.5).unwrap();
        assert_eq!(fam.len(), 5);
        assert_eq!(fam[0], Interval { a: 0.0, b: 0.5 });
        assert_eq!(fam[1], Interval { a: 0.125, b: 0.625 });
        assert!((fam[4].b - 1.0).abs() < 1e-15);
        let full = sliding_intervals(&w, 1.0).unwrap();
        assert_eq!(full.len(), 1);
        assert!(sliding_intervals(&w, 2.0).is_err());
    }

    #[test]
    fn scales_validation() {
        assert!(check_scales(&[1.0, 0.5]).is_ok());
        assert!(check_scales(&[0.5, 1.0]).is_err());
        assert!(check_scales(&[1.0, 1.0]).is_err());
        assert!(check_scales(&[1.0, -1.0]).is_err());
    }

    #[test]
    fn ordered_max_takes_first_maximizer() {
        let xs = [1.0, 3.0, 2.0, 3.0];
        let (v, i) = ordered_max(&xs, |x| Ok(*x)).unwrap();
        assert_eq!((v, i), (3.0, 1));
    }

    #[test]
    fn csv_roundtrip() {
        let meta = ScanMeta {
            label: "t".into(),
            window: Interval::new(0.0, 1.0).unwrap(),
            stride_fraction: 0.25,
        };
        let p = Profile::new(vec![1.0, 0.5], vec![0.3, 0.1], vec![0.5, 0.25], meta).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        p.write_csv(&path).unwrap();
        let q = Profile::read_csv(&path, "t").unwrap();
        assert_eq!(p.values, q.values);
        assert!(p.to_csv().starts_with("scale,value,argmax_center\n"));
    }
}
