//! Named homeomorphisms used throughout the scenarios.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use super::{CircleHomeo, Func, Homeo1D};
use crate::error::{Error, Result};
use crate::interval::Interval;

pub type Params = BTreeMap<String, f64>;

/// Horizontal period of the tiled map.
pub const G_TILED_PERIOD: f64 = 22.0;
/// Vertical rise of the tiled map over one period.
pub const G_TILED_RISE: f64 = 143.0 / 12.0;

#[derive(Debug, Clone)]
pub enum CatalogItem {
    Line(Homeo1D),
    Circle(CircleHomeo),
}

impl CatalogItem {
    pub fn line(self) -> Result<Homeo1D> {
        match self {
            CatalogItem::Line(h) => Ok(h),
            CatalogItem::Circle(c) => {
                Err(Error::BadParams(format!("{} is a circle map", c.name())))
            }
        }
    }

    pub fn circle(self) -> Result<CircleHomeo> {
        match self {
            CatalogItem::Circle(c) => Ok(c),
            CatalogItem::Line(h) => Err(Error::BadParams(format!("{} is a line map", h.name()))),
        }
    }
}

/// `(name, parameters with defaults, description)` for every catalog entry.
pub fn catalog_names() -> Vec<(&'static str, &'static str, &'static str)> {
    vec![
        ("identity", "", "x"),
        ("affine", "a=2, b=1", "a x + b"),
        ("h_parabolic", "", "(x+1)^2-1 for x>=0, -(x-1)^2+1 for x<=0"),
        (
            "g_tiled",
            "",
            "tiled piecewise quadratic built from x^2/24 on [1,12]",
        ),
        ("h_exp_window", "lo=-5, hi=5", "e^x - 1 on [lo, hi]"),
        (
            "ss_uc_smooth",
            "a=0.3, omega=1, decay=8",
            "x + (a/omega) sin(omega x) / (1 + (x/decay)^2); decay=0 disables the envelope",
        ),
        ("circle_rotation", "sigma=0.5", "theta + sigma"),
        (
            "circle_from_lift",
            "eps=0.2, k=1",
            "theta + eps sin(k theta)",
        ),
        (
            "circle_mobius",
            "re=0.3, im=0.2, sigma=0",
            "boundary of e^{i sigma}(z+a)/(1+conj(a) z)",
        ),
    ]
}

fn param(params: &Params, key: &str, default: f64) -> f64 {
    params.get(key).copied().unwrap_or(default)
}

fn check_keys(name: &str, params: &Params, allowed: &[&str]) -> Result<()> {
    for k in params.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(Error::BadParams(format!(
                "`{k}` is not a parameter of {name}"
            )));
        }
    }
    Ok(())
}

pub fn make_catalog(name: &str, params: &Params) -> Result<CatalogItem> {
    match name {
        "identity" => {
            check_keys(name, params, &[])?;
            Ok(CatalogItem::Line(Homeo1D::identity()))
        }
        "affine" => {
            check_keys(name, params, &["a", "b"])?;
            Ok(CatalogItem::Line(Homeo1D::affine(
                param(params, "a", 2.0),
                param(params, "b", 1.0),
            )?))
        }
        "h_parabolic" => {
            check_keys(name, params, &[])?;
            Ok(CatalogItem::Line(h_parabolic()))
        }
        "g_tiled" => {
            check_keys(name, params, &[])?;
            Ok(CatalogItem::Line(g_tiled()))
        }
        "h_exp_window" => {
            check_keys(name, params, &["lo", "hi"])?;
            let w = Interval::new(param(params, "lo", -5.0), param(params, "hi", 5.0))
                .map_err(|e| Error::BadParams(e.to_string()))?;
            let h = Homeo1D::closed_form(
                "h_exp_window",
                Arc::new(|x: f64| x.exp_m1()),
                Some(Arc::new(|x: f64| x.exp())),
            )
            .with_window(w);
            Ok(CatalogItem::Line(h))
        }
        "ss_uc_smooth" => {
            check_keys(name, params, &["a", "omega", "decay"])?;
            Ok(CatalogItem::Line(ss_uc_smooth(
                param(params, "a", 0.3),
                param(params, "omega", 1.0),
                param(params, "decay", 8.0),
            )?))
        }
        "circle_rotation" => {
            check_keys(name, params, &["sigma"])?;
            Ok(CatalogItem::Circle(CircleHomeo::rotation(param(
                params, "sigma", 0.5,
            ))))
        }
        "circle_from_lift" => {
            check_keys(name, params, &["eps", "k"])?;
            let eps = param(params, "eps", 0.2);
            let k = param(params, "k", 1.0);
            if k.fract() != 0.0 || k < 1.0 {
                return Err(Error::BadParams(format!(
                    "k = {k} must be a positive integer"
                )));
            }
            if (eps * k).abs() >= 1.0 {
                return Err(Error::BadParams(format!(
                    "|eps k| = {} must be < 1",
                    (eps * k).abs()
                )));
            }
            Ok(CatalogItem::Circle(CircleHomeo::from_lift(
                format!("circle_from_lift({eps},{k})"),
                Arc::new(move |t: f64| t + eps * (k * t).sin()),
            )))
        }
        "circle_mobius" => {
            check_keys(name, params, &["re", "im", "sigma"])?;
            let a = Complex64::new(param(params, "re", 0.3), param(params, "im", 0.2));
            Ok(CatalogItem::Circle(CircleHomeo::mobius(
                a,
                param(params, "sigma", 0.0),
            )?))
        }
        other => Err(Error::UnknownName(other.to_string())),
    }
}

fn h_parabolic() -> Homeo1D {
    Homeo1D::closed_form(
        "h_parabolic",
        Arc::new(|x: f64| {
            if x >= 0.0 {
                (x + 1.0) * (x + 1.0) - 1.0
            } else {
                -(x - 1.0) * (x - 1.0) + 1.0
            }
        }),
        Some(Arc::new(|x: f64| 2.0 * (x.abs() + 1.0))),
    )
}

/// One quadratic branch `c0 + c1 (X - lo) + c2 (X - lo)^2` on `[lo, hi]`.
#[derive(Debug, Clone, Copy)]
struct Branch {
    lo: f64,
    hi: f64,
    c0: f64,
    c1: f64,
    c2: f64,
}

// The base tile on [0, 22]: the rotated copy of x^2/24 followed by the original
// arc, translated so the tile starts at the origin.
//   X in [0, 11]:  6 - (12 - X)^2 / 24
//   X in [11, 22]: (X - 10)^2 / 24 + 71/12
const BRANCHES: [Branch; 2] = [
    Branch {
        lo: 0.0,
        hi: 11.0,
        c0: 0.0,
        c1: 1.0,
        c2: -1.0 / 24.0,
    },
    Branch {
        lo: 11.0,
        hi: 22.0,
        c0: 143.0 / 24.0,
        c1: 1.0 / 12.0,
        c2: 1.0 / 24.0,
    },
];

/// Value and slope of the base tile at `X ∈ [0, 22]`.
pub fn g_tiled_base(x: f64) -> (f64, f64) {
    let br = if x <= BRANCHES[0].hi {
        &BRANCHES[0]
    } else {
        &BRANCHES[1]
    };
    debug_assert!(x >= br.lo - 1e-9 && x <= br.hi + 1e-9);
    let s = x - br.lo;
    (br.c0 + s * (br.c1 + s * br.c2), br.c1 + 2.0 * br.c2 * s)
}

fn g_tiled_pos(x: f64) -> (f64, f64) {
    let n = (x / G_TILED_PERIOD).floor();
    let r = (x - n * G_TILED_PERIOD).clamp(0.0, G_TILED_PERIOD);
    let (v, d) = g_tiled_base(r);
    (n * G_TILED_RISE + v, d)
}

fn g_tiled() -> Homeo1D {
    let eval: Func = Arc::new(|x: f64| {
        if x >= 0.0 {
            g_tiled_pos(x).0
        } else {
            -g_tiled_pos(-x).0
        }
    });
    let deriv: Func = Arc::new(|x: f64| g_tiled_pos(x.abs()).1);
    Homeo1D::closed_form("g_tiled", eval, Some(deriv))
}

fn ss_uc_smooth(a: f64, omega: f64, decay: f64) -> Result<Homeo1D> {
    if !(omega > 0.0) || !(a >= 0.0) || decay < 0.0 {
        return Err(Error::BadParams(
            "need a >= 0, omega > 0, decay >= 0".into(),
        ));
    }
    // |h' - 1| <= a (1 + 0.65 / (omega decay)); max of 2u/(1+u^2)^2 is < 0.65.
    let bound = if decay > 0.0 {
        a * (1.0 + 0.65 / (omega * decay))
    } else {
        a
    };
    if bound >= 1.0 {
        return Err(Error::BadParams(format!(
            "derivative bound {bound} must stay below 1"
        )));
    }
    let name = format!("ss_uc_smooth({a},{omega},{decay})");
    if decay == 0.0 {
        return Ok(Homeo1D::closed_form(
            name,
            Arc::new(move |x: f64| x + a / omega * (omega * x).sin()),
            Some(Arc::new(move |x: f64| 1.0 + a * (omega * x).cos())),
        ));
    }
    let l2 = decay * decay;
    Ok(Homeo1D::closed_form(
        name,
        Arc::new(move |x: f64| x + a / omega * (omega * x).sin() / (1.0 + x * x / l2)),
        Some(Arc::new(move |x: f64| {
            let env = 1.0 / (1.0 + x * x / l2);
            1.0 + a * (omega * x).cos() * env
                - a / omega * (omega * x).sin() * 2.0 * x / l2 * env * env
        })),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_tiled_fixes_origin_and_has_period() {
        let g = g_tiled();
        assert_eq!(g.eval(0.0).unwrap(), 0.0);
        assert!((g.eval(22.0).unwrap() - G_TILED_RISE).abs() < 1e-12);
        assert!((g.eval(-22.0).unwrap() + G_TILED_RISE).abs() < 1e-12);
    }

    #[test]
    fn g_tiled_matches_geometric_construction() {
        // Rebuild the tile from its geometric description: the arc y = x^2/24
        // on [1, 12] and its rotation by π about (1, 1/24), shifted so the
        // far end of the rotated copy sits at the origin.
        let g1 = |x: f64| x * x / 24.0;
        let (ox, oy) = (1.0, g1(1.0));
        let (ex, ey) = (2.0 * ox - 12.0, 2.0 * oy - g1(12.0));
        assert_eq!(ex, -10.0);
        assert!((ey + 71.0 / 12.0).abs() < 1e-15);
        let g = g_tiled();
        for k in 0..=200 {
            let s = 1.0 + 11.0 * k as f64 / 200.0;
            // original arc point
            let (px, py) = (s - ex, g1(s) - ey);
            assert!((g.eval(px).unwrap() - py).abs() < 1e-12);
            // rotated arc point
            let (qx, qy) = (2.0 * ox - s - ex, 2.0 * oy - g1(s) - ey);
            assert!((g.eval(qx).unwrap() - qy).abs() < 1e-12);
        }
    }

    #[test]
    fn g_tiled_slope_range() {
        let g = g_tiled();
        for k in 0..5000 {
            let x = -60.0 + 120.0 * k as f64 / 4999.0;
            let d = g.deriv(x).unwrap();
            assert!((1.0 / 12.0 - 1e-12..=1.0 + 1e-12).contains(&d), "{x} {d}");
        }
        assert!((g.deriv(11.0).unwrap() - 1.0 / 12.0).abs() < 1e-15);
        assert_eq!(g.deriv(0.0).unwrap(), 1.0);
    }

    #[test]
    fn ss_uc_smooth_slope_bound() {
        let h = ss_uc_smooth(0.3, 1.0, 8.0).unwrap();
        for k in 0..10000 {
            let x = -200.0 + 0.04 * k as f64;
            let d = h.deriv(x).unwrap();
            assert!((d - 1.0).abs() <= 0.3 * (1.0 + 0.65 / 8.0));
            let fd = (h.eval(x + 1e-6).unwrap() - h.eval(x - 1e-6).unwrap()) / 2e-6;
            assert!((fd - d).abs() < 1e-7);
        }
        assert!(ss_uc_smooth(0.95, 1.0, 0.5).is_err());
    }

    #[test]
    fn unknown_and_bad_params() {
        assert!(matches!(
            make_catalog("nope", &Params::new()),
            Err(Error::UnknownName(_))
        ));
        let mut p = Params::new();
        p.insert("a".into(), -1.0);
        assert!(matches!(
            make_catalog("affine", &p),
            Err(Error::BadParams(_))
        ));
        let mut q = Params::new();
        q.insert("zz".into(), 1.0);
        assert!(matches!(
            make_catalog("h_parabolic", &q),
            Err(Error::BadParams(_))
        ));
    }

    #[test]
    fn every_name_builds() {
        for (name, _, _) in catalog_names() {
            make_catalog(name, &Params::new()).unwrap();
        }
    }
}
