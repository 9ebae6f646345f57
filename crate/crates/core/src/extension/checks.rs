//! Hyperbolic distortion and boundary comparability checks.

use serde::Serialize;

use super::{hyperbolic_distance, HalfPlanePoint, QCMap};
use crate::error::{Error, Result};
use crate::homeo::Homeo1D;
use crate::interval::Interval;

/// `max over pairs of max(r, 1/r)`, `r = d(F z, F w) / d(z, w)`.
pub fn bilipschitz_estimate(f: &QCMap, pairs: &[(HalfPlanePoint, HalfPlanePoint)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::Invalid("no sample pairs".into()));
    }
    let mut best: f64 = 1.0;
    for &(z, w) in pairs {
        let d = hyperbolic_distance(z, w);
        if d < 1e-9 {
            return Err(Error::DegeneratePair(d));
        }
        let dd = hyperbolic_distance(f.eval(z)?, f.eval(w)?);
        let r = dd / d;
        best = best.max(r.max(1.0 / r));
    }
    Ok(best)
}

/// Ratios `R(z) = (Im F(z) / Im z) / (|f(I_z)| / |I_z|)` over a point set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImRatioReport {
    pub min: f64,
    pub max: f64,
    pub spread: f64,
    pub ratios: Vec<f64>,
}

pub fn im_ratio_check(
    f: &QCMap,
    boundary: &Homeo1D,
    grid: &[HalfPlanePoint],
) -> Result<ImRatioReport> {
    if grid.is_empty() {
        return Err(Error::Invalid("empty point set".into()));
    }
    let mut ratios = Vec::with_capacity(grid.len());
    for &z in grid {
        let w = f.eval(z)?;
        let image = boundary.eval(z.x + z.y)? - boundary.eval(z.x - z.y)?;
        ratios.push((w.y / z.y) / (image / (2.0 * z.y)));
    }
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(ImRatioReport {
        min,
        max,
        spread: max / min,
        ratios,
    })
}

/// Smallest `α` such that the sampled image of `∂Q_I` (sides and top, with
/// `probe` points each) lies in the Carleson box over `α f(I)`. The bottom
/// side maps onto `f(I)`, so the result is at least 1.
pub fn box_image_check(f: &QCMap, boundary: &Homeo1D, i: &Interval, probe: usize) -> Result<f64> {
    if probe == 0 {
        return Err(Error::Invalid("probe count must be positive".into()));
    }
    let fa = boundary.eval(i.a)?;
    let fb = boundary.eval(i.b)?;
    let (c, len) = (0.5 * (fa + fb), fb - fa);
    let h = i.len();
    let mut pts = Vec::with_capacity(3 * probe + 1);
    for j in 1..=probe {
        let y = h * j as f64 / probe as f64;
        pts.push((i.a, y));
        pts.push((i.b, y));
    }
    for j in 0..=probe {
        pts.push((i.a + h * j as f64 / probe as f64, h));
    }
    let mut alpha: f64 = 1.0;
    for (x, y) in pts {
        let w = f.eval(HalfPlanePoint::new(x, y)?)?;
        alpha = alpha.max(2.0 * (w.x - c).abs() / len).max(w.y / len);
    }
    Ok(alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::ba_extend;
    use crate::homeo::{make_catalog, Params};

    fn p(x: f64, y: f64) -> HalfPlanePoint {
        HalfPlanePoint::new(x, y).unwrap()
    }

    fn pairs() -> Vec<(HalfPlanePoint, HalfPlanePoint)> {
        vec![
            (p(0.0, 1.0), p(1.0, 2.0)),
            (p(-3.0, 0.1), p(2.0, 0.5)),
            (p(0.5, 0.01), p(0.51, 0.02)),
        ]
    }

    #[test]
    fn bilipschitz_examples() {
        assert_eq!(
            bilipschitz_estimate(&QCMap::identity(), &pairs()).unwrap(),
            1.0
        );
        let m = QCMap::mobius(2.0, 1.0, -1.0, 3.0).unwrap();
        assert!((bilipschitz_estimate(&m, &pairs()).unwrap() - 1.0).abs() < 1e-9);
        let ba = ba_extend(&Homeo1D::identity());
        let l = bilipschitz_estimate(&ba, &pairs()).unwrap();
        assert!(l > 1.0 && l < 3.0);
        assert!(matches!(
            bilipschitz_estimate(&ba, &[(p(0.0, 1.0), p(0.0, 1.0))]),
            Err(Error::DegeneratePair(_))
        ));
    }

    #[test]
    fn im_ratio_examples() {
        let pts = [p(0.0, 1.0), p(3.0, 0.25), p(-1.0, 0.01)];
        let r = im_ratio_check(&QCMap::identity(), &Homeo1D::identity(), &pts).unwrap();
        assert!((r.min - 1.0).abs() < 1e-14 && (r.max - 1.0).abs() < 1e-14);
        let r = im_ratio_check(
            &QCMap::affine(3.0, 1.0).unwrap(),
            &Homeo1D::affine(3.0, 1.0).unwrap(),
            &pts,
        )
        .unwrap();
        assert!((r.min - 1.0).abs() < 1e-14 && (r.max - 1.0).abs() < 1e-14);
    }

    #[test]
    fn box_image_examples() {
        let i = Interval::new(0.0, 1.0).unwrap();
        assert_eq!(
            box_image_check(&QCMap::identity(), &Homeo1D::identity(), &i, 8).unwrap(),
            1.0
        );
        let a = box_image_check(
            &QCMap::affine(2.0, 5.0).unwrap(),
            &Homeo1D::affine(2.0, 5.0).unwrap(),
            &i,
            8,
        );
        assert!((a.unwrap() - 1.0).abs() < 1e-14);
        let h = make_catalog("h_parabolic", &Params::new())
            .unwrap()
            .line()
            .unwrap();
        let ba = ba_extend(&h);
        let a1 = box_image_check(&ba, &h, &i, 16).unwrap();
        let a2 = box_image_check(&ba, &h, &Interval::new(0.0, 0.25).unwrap(), 16).unwrap();
        assert!(
            a1.is_finite() && a1 / a2 < 2.0 && a2 / a1 < 2.0,
            "{a1} {a2}"
        );
    }
}
