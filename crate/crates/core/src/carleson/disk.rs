//! Densities on the unit disk, disk-cap masses `λ(Δ(ξ, r) ∩ 𝔻) / r` and the
//! Cayley pull-back to the half-plane.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::BoxDensity;
use crate::error::{Error, Result};
use crate::extension::{cayley, cayley_deriv_abs};
use crate::quad::{integrate, QuadOptions};

/// Distance to the Cayley pole `w = 1` below which pull-backs are refused.
pub const POLE_MARGIN: f64 = 1e-9;

/// A nonnegative area density on `𝔻`, optionally cut off within `floor` of
/// the unit circle.
#[derive(Clone)]
pub struct DiskDensity {
    name: String,
    f: Arc<dyn Fn(Complex64) -> f64 + Send + Sync>,
    floor: f64,
}

impl std::fmt::Debug for DiskDensity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DiskDensity")
            .field("name", &self.name)
            .field("floor", &self.floor)
            .finish()
    }
}

impl DiskDensity {
    pub fn new(name: impl Into<String>, f: Arc<dyn Fn(Complex64) -> f64 + Send + Sync>) -> Self {
        DiskDensity {
            name: name.into(),
            f,
            floor: 0.0,
        }
    }

    pub fn zero() -> Self {
        DiskDensity::new("zero", Arc::new(|_| 0.0))
    }

    /// `|μ(w)|² / (1 - |w|)` for a dilatation magnitude `abs2(w) = |μ(w)|²`.
    pub fn hyperbolic(
        name: impl Into<String>,
        abs2: Arc<dyn Fn(Complex64) -> f64 + Send + Sync>,
    ) -> Self {
        DiskDensity::new(
            name,
            Arc::new(move |w: Complex64| abs2(w) / (1.0 - w.norm())),
        )
    }

    /// Zero the density where `1 - |w| < floor`.
    pub fn with_floor(mut self, floor: f64) -> Self {
        self.floor = floor;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn eval(&self, w: Complex64) -> f64 {
        if 1.0 - w.norm() < self.floor {
            return 0.0;
        }
        (self.f)(w)
    }
}

/// `λ(Δ(ξ, r) ∩ {|w| < 1 - floor}) / r` in polar coordinates about `ξ`.
pub fn disk_box_mass(d: &DiskDensity, xi: Complex64, r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 2.0) {
        return Err(Error::Invalid(format!("disk radius {r} outside (0, 2)")));
    }
    if (xi.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::Invalid(format!("{xi} is not on the unit circle")));
    }
    let xi = xi / xi.norm();
    // |ξ + ρ e^{iψ} ξ|² < (1 - f)²  ⇔  ρ² + 2ρ cos ψ + c < 0
    let c = 1.0 - (1.0 - d.floor).powi(2);
    let a = c.sqrt().min(1.0).acos();
    let kink = (r * r + c) / (2.0 * r);
    let mut cuts = vec![PI - a, PI + a];
    if kink < 1.0 {
        let b = kink.acos();
        if b < a {
            cuts.extend([PI - b, PI + b]);
        }
    }
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let opts = QuadOptions {
        tol: 1e-12 * r * r,
        max_depth: 30,
    };
    let err = std::cell::Cell::new(None);
    let radial = |psi: f64| -> f64 {
        let cs = psi.cos();
        let disc = cs * cs - c;
        if cs >= 0.0 || disc <= 0.0 {
            return 0.0;
        }
        let lo = -cs - disc.sqrt();
        let hi = (-cs + disc.sqrt()).min(r);
        if hi <= lo {
            return 0.0;
        }
        let dir = xi * Complex64::from_polar(1.0, psi);
        match integrate(|rho| d.eval(xi + dir * rho) * rho, lo.max(0.0), hi, opts) {
            Ok(v) => v,
            Err(e) => {
                err.set(Some(e));
                f64::NAN
            }
        }
    };
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let v = integrate(radial, w[0], w[1], opts);
        if let Some(e) = err.take() {
            return Err(e);
        }
        total += v?;
    }
    Ok(total / r)
}

/// Half-plane density `λ(T z) |T'(z)|`, so that its mass over `R` equals
/// `∬_{T(R)} λ(w) |T'(T⁻¹ w)|⁻¹ dA(w)` with `|T'(T⁻¹ w)|⁻¹ = 2 / |1 - w|²`.
pub fn pullback_cayley(lambda: &DiskDensity) -> BoxDensity {
    let l = lambda.clone();
    BoxDensity::fallible(
        format!("cayley*({})", lambda.name()),
        Arc::new(move |x, y| {
            let z = Complex64::new(x, y);
            let w = cayley(z)?;
            let gap = (Complex64::new(1.0, 0.0) - w).norm();
            if gap < POLE_MARGIN {
                return Err(Error::PoleProximity(gap));
            }
            Ok(l.eval(w) * cayley_deriv_abs(z))
        }),
    )
}
