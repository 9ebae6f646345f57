//! Quasiconformal self-maps of the upper half-plane `𝕌`: the
//! Beurling–Ahlfors and barycentric (Douady–Earle) extensions of boundary
//! homeomorphisms, the Cayley transform, complex dilatation fields and the
//! hyperbolic comparability checks.

mod ba;
mod checks;
mod de;
mod field;

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::homeo::Homeo1D;

pub use ba::ba_extend;
pub use checks::{bilipschitz_estimate, box_image_check, im_ratio_check, ImRatioReport};
pub use de::{
    barycenter_from, circle_samples, de_average, de_average_samples, de_barycenter, de_eval_line,
    de_extend_line, DeOptions,
};
pub use field::{
    asymptotic_profile, chain_dilatation_mag, complex_dilatation, DilatationField, FieldRow,
    GridSpec,
};

/// A point `x + iy` of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HalfPlanePoint {
    pub x: f64,
    pub y: f64,
}

impl HalfPlanePoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::Invalid(format!(
                "({x}, {y}) is not in the upper half-plane"
            )));
        }
        Ok(HalfPlanePoint { x, y })
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        HalfPlanePoint::new(z.re, z.im)
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }
}

/// `T(z) = (z - i)/(z + i)`, mapping `𝕌` onto the unit disk.
pub fn cayley(z: Complex64) -> Result<Complex64> {
    let den = z + Complex64::i();
    if den.norm() < 1e-300 {
        return Err(Error::PoleInput(format!("{z}")));
    }
    Ok((z - Complex64::i()) / den)
}

/// `T^{-1}(w) = i (1 + w)/(1 - w)`.
pub fn cayley_inv(w: Complex64) -> Result<Complex64> {
    let den = Complex64::new(1.0, 0.0) - w;
    if den.norm() < 1e-300 {
        return Err(Error::PoleInput(format!("{w}")));
    }
    Ok(Complex64::i() * (Complex64::new(1.0, 0.0) + w) / den)
}

/// `|T'(z)| = 2 / |z + i|^2`.
pub fn cayley_deriv_abs(z: Complex64) -> f64 {
    2.0 / (z + Complex64::i()).norm_sqr()
}

/// `d(z, w) = 2 asinh(|z - w| / (2 sqrt(Im z Im w)))`.
pub fn hyperbolic_distance(z: HalfPlanePoint, w: HalfPlanePoint) -> f64 {
    let d = (z.z() - w.z()).norm();
    2.0 * (d / (2.0 * (z.y * w.y).sqrt())).asinh()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QcKind {
    Identity,
    Affine,
    Mobius,
    BeurlingAhlfors,
    DouadyEarle,
}

pub(crate) type EvalFn = Arc<dyn Fn(Complex64) -> Result<Complex64> + Send + Sync>;
/// Returns `(F_z, F_z̄)`.
pub(crate) type PartialsFn = Arc<dyn Fn(Complex64) -> Result<(Complex64, Complex64)> + Send + Sync>;

/// A quasiconformal self-map of `𝕌` with point evaluation and, where
/// available, direct access to its Wirtinger derivatives.
#[derive(Clone)]
pub struct QCMap {
    name: String,
    kind: QcKind,
    eval: EvalFn,
    partials: Option<PartialsFn>,
    boundary: Option<Homeo1D>,
}

impl std::fmt::Debug for QCMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("QCMap")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .finish()
    }
}

impl QCMap {
    pub(crate) fn from_parts(
        name: String,
        kind: QcKind,
        eval: EvalFn,
        partials: Option<PartialsFn>,
        boundary: Option<Homeo1D>,
    ) -> Self {
        QCMap {
            name,
            kind,
            eval,
            partials,
            boundary,
        }
    }

    pub fn identity() -> Self {
        QCMap::from_parts(
            "identity".into(),
            QcKind::Identity,
            Arc::new(Ok),
            Some(Arc::new(|_| {
                Ok((Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)))
            })),
            Some(Homeo1D::identity()),
        )
    }

    /// `z -> a z + b` with `a > 0`.
    pub fn affine(a: f64, b: f64) -> Result<Self> {
        Ok(QCMap::from_parts(
            format!("affine({a},{b})"),
            QcKind::Affine,
            Arc::new(move |z| Ok(z * a + b)),
            Some(Arc::new(move |_| {
                Ok((Complex64::new(a, 0.0), Complex64::new(0.0, 0.0)))
            })),
            Some(Homeo1D::affine(a, b)?),
        ))
    }

    /// `z -> (a z + b)/(c z + d)` with real coefficients and `ad - bc > 0`.
    pub fn mobius(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det > 0.0) {
            return Err(Error::BadParams(format!(
                "ad - bc = {det} must be positive"
            )));
        }
        let boundary = if c == 0.0 {
            Some(Homeo1D::affine(a / d, b / d)?)
        } else {
            None
        };
        Ok(QCMap::from_parts(
            format!("mobius({a},{b},{c},{d})"),
            QcKind::Mobius,
            Arc::new(move |z| {
                let den = z * c + d;
                if den.norm() < 1e-300 {
                    return Err(Error::PoleInput(format!("{z}")));
                }
                Ok((z * a + b) / den)
            }),
            Some(Arc::new(move |z| {
                let den = z * c + d;
                Ok((
                    Complex64::new(det, 0.0) / (den * den),
                    Complex64::new(0.0, 0.0),
                ))
            })),
            boundary,
        ))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> QcKind {
        self.kind
    }

    pub fn boundary(&self) -> Option<&Homeo1D> {
        self.boundary.as_ref()
    }

    pub fn eval(&self, z: HalfPlanePoint) -> Result<HalfPlanePoint> {
        let w = (self.eval)(z.z())?;
        HalfPlanePoint::from_complex(w)
    }

    pub fn eval_complex(&self, z: Complex64) -> Result<Complex64> {
        (self.eval)(z)
    }

    /// `(F_z, F_z̄)` from the closed form when available, otherwise by central
    /// differences with step `1e-4 y`.
    pub fn partials(&self, z: HalfPlanePoint) -> Result<(Complex64, Complex64)> {
        if let Some(p) = &self.partials {
            return p(z.z());
        }
        central_partials(|w| (self.eval)(w), z.z(), 1e-4 * z.y)
    }

    pub fn has_analytic_partials(&self) -> bool {
        self.partials.is_some()
    }
}

/// Wirtinger derivatives by central differences.
pub(crate) fn central_partials<F: Fn(Complex64) -> Result<Complex64>>(
    f: F,
    z: Complex64,
    h: f64,
) -> Result<(Complex64, Complex64)> {
    let fx = (f(z + h)? - f(z - h)?) / (2.0 * h);
    let ih = Complex64::new(0.0, h);
    let fy = (f(z + ih)? - f(z - ih)?) / (2.0 * h);
    let i = Complex64::i();
    Ok(((fx - i * fy) * 0.5, (fx + i * fy) * 0.5))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cayley_examples() {
        assert!(cayley(Complex64::i()).unwrap().norm() < 1e-16);
        assert!((cayley(Complex64::new(0.0, 0.0)).unwrap() + 1.0).norm() < 1e-16);
        for k in -10..=10 {
            assert!(cayley_deriv_abs(Complex64::new(k as f64, 0.0)) <= 2.0);
        }
        assert_eq!(cayley_deriv_abs(Complex64::i()), 0.5);
        assert!(matches!(cayley(-Complex64::i()), Err(Error::PoleInput(_))));
        assert!(matches!(
            cayley_inv(Complex64::new(1.0, 0.0)),
            Err(Error::PoleInput(_))
        ));
        let z = Complex64::new(0.3, 2.5);
        assert!((cayley_inv(cayley(z).unwrap()).unwrap() - z).norm() < 1e-15);
    }

    #[test]
    fn hyperbolic_examples() {
        let i = HalfPlanePoint::new(0.0, 1.0).unwrap();
        assert_eq!(hyperbolic_distance(i, i), 0.0);
        let d = hyperbolic_distance(i, HalfPlanePoint::new(0.0, 2.0).unwrap());
        assert!((d - 2f64.ln()).abs() < 1e-15);
        let d = hyperbolic_distance(i, HalfPlanePoint::new(1.0, 1.0).unwrap());
        assert!((d - 2.0 * 0.5f64.asinh()).abs() < 1e-15);
        assert!(HalfPlanePoint::new(0.0, 0.0).is_err());
    }

    #[test]
    fn mobius_partials_match_differences() {
        let m = QCMap::mobius(2.0, 1.0, 1.0, 3.0).unwrap();
        let z = HalfPlanePoint::new(0.4, 0.7).unwrap();
        let (a, b) = m.partials(z).unwrap();
        let (c, d) = central_partials(|w| m.eval_complex(w), z.z(), 1e-5).unwrap();
        assert!((a - c).norm() < 1e-8 && b.norm() == 0.0 && d.norm() < 1e-8);
        assert!(m.boundary().is_none());
        assert!(QCMap::mobius(1.0, 2.0, 3.0, 1.0).is_err());
    }
}
