use std::sync::Arc;

use crate::error::{Error, Result};
use crate::homeo::Func;
use crate::interval::Interval;
use crate::quad::{integrate_singular, QuadOptions};

/// A locally integrable function on a window, with optional closed-form
/// antiderivative and known integrable singular points.
#[derive(Clone)]
pub struct RealFunction {
    name: String,
    eval: Func,
    window: Interval,
    prefix: Option<Func>,
    singular: Vec<f64>,
    period: Option<f64>,
    quad: QuadOptions,
}

impl std::fmt::Debug for RealFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RealFunction")
            .field("name", &self.name)
            .field("window", &self.window)
            .field("singular", &self.singular)
            .field("period", &self.period)
            .finish()
    }
}

impl RealFunction {
    pub fn new(name: impl Into<String>, eval: Func, window: Interval) -> Self {
        RealFunction {
            name: name.into(),
            eval,
            window,
            prefix: None,
            singular: Vec::new(),
            period: None,
            quad: QuadOptions::default(),
        }
    }

    pub fn constant(c: f64) -> Self {
        RealFunction::new(
            format!("const({c})"),
            Arc::new(move |_| c),
            Interval::real_line(),
        )
        .with_prefix(Arc::new(move |x| c * x))
    }

    pub fn linear() -> Self {
        RealFunction::new("x", Arc::new(|x| x), Interval::real_line())
            .with_prefix(Arc::new(|x| 0.5 * x * x))
    }

    /// `log|x - c|`.
    pub fn log_abs(c: f64) -> Self {
        RealFunction::new(
            format!("log|x-{c}|"),
            Arc::new(move |x: f64| (x - c).abs().ln()),
            Interval::real_line(),
        )
        .with_singularities(vec![c])
    }

    /// `v(θ) = log|1 - e^{iθ}| = log(2|sin(θ/2)|)`, the circle function with a
    /// logarithmic singularity at `ξ = 1`, parametrized by arc length.
    pub fn log_one_minus_xi() -> Self {
        RealFunction::new(
            "log|1-xi|",
            Arc::new(|t: f64| (2.0 * (0.5 * t).sin().abs()).ln()),
            Interval::real_line(),
        )
        .with_singularities(vec![0.0])
        .with_period(2.0 * std::f64::consts::PI)
    }

    /// `u(x) = -log|x + i| + log 2`, the Cayley pull-back of `log|1 - ξ|`.
    pub fn cayley_log() -> Self {
        RealFunction::new(
            "-log|x+i|+log2",
            Arc::new(|x: f64| -0.5 * (x * x).ln_1p() + std::f64::consts::LN_2),
            Interval::real_line(),
        )
    }

    pub fn with_prefix(mut self, prefix: Func) -> Self {
        self.prefix = Some(prefix);
        self
    }

    pub fn with_singularities(mut self, points: Vec<f64>) -> Self {
        self.singular = points;
        self
    }

    /// Singular points repeat with this period.
    pub fn with_period(mut self, period: f64) -> Self {
        self.period = Some(period);
        self
    }

    pub fn with_window(mut self, window: Interval) -> Self {
        self.window = window;
        self
    }

    pub fn with_quad(mut self, quad: QuadOptions) -> Self {
        self.quad = quad;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn window(&self) -> Interval {
        self.window
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn eval_fn(&self) -> Func {
        self.eval.clone()
    }

    pub fn quad_options(&self) -> QuadOptions {
        self.quad
    }

    /// Singular points inside `[a, b]`.
    pub fn singularities_in(&self, a: f64, b: f64) -> Vec<f64> {
        match self.period {
            None => self
                .singular
                .iter()
                .copied()
                .filter(|s| *s >= a && *s <= b)
                .collect(),
            Some(p) => {
                let mut out = Vec::new();
                for &s in &self.singular {
                    let k0 = ((a - s) / p).ceil() as i64;
                    let k1 = ((b - s) / p).floor() as i64;
                    for k in k0..=k1 {
                        out.push(s + k as f64 * p);
                    }
                }
                out
            }
        }
    }

    pub fn check_interval(&self, i: &Interval) -> Result<()> {
        if self.window.contains_interval(i) {
            Ok(())
        } else {
            Err(Error::OutOfWindow {
                x: if i.a < self.window.a { i.a } else { i.b },
                a: self.window.a,
                b: self.window.b,
            })
        }
    }

    /// `∫_a^b u`.
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        if let Some(p) = &self.prefix {
            return Ok(p(b) - p(a));
        }
        self.integrate_with(|x| self.eval(x), a, b)
    }

    /// Integrate a function derived from `u` (sharing its singular points).
    /// The absolute tolerance shrinks with the interval below unit length so
    /// that averages keep the same accuracy.
    pub fn integrate_with<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<f64> {
        let sing = self.singularities_in(a.min(b), a.max(b));
        let mut opts = self.quad;
        opts.tol *= (b - a).abs().min(1.0);
        integrate_singular(f, a, b, &sing, opts)
    }

    /// `c u + d`.
    pub fn affine_image(&self, c: f64, d: f64) -> Self {
        let e = self.eval.clone();
        let mut out = self.clone();
        out.name = format!("{c}*{}+{d}", self.name);
        out.eval = Arc::new(move |x| c * e(x) + d);
        out.prefix = self.prefix.as_ref().map(|p| {
            let p = p.clone();
            Arc::new(move |x: f64| c * p(x) + d * x) as Func
        });
        out
    }

    /// `x -> u(a x)` for `a > 0`.
    pub fn dilate(&self, a: f64) -> Self {
        let e = self.eval.clone();
        let w = self.window;
        let mut out = self.clone();
        out.name = format!("{}(x*{a})", self.name);
        out.eval = Arc::new(move |x| e(a * x));
        out.window = Interval {
            a: w.a / a,
            b: w.b / a,
        };
        out.singular = self.singular.iter().map(|s| s / a).collect();
        out.period = self.period.map(|p| p / a);
        out.prefix = self.prefix.as_ref().map(|p| {
            let p = p.clone();
            Arc::new(move |x: f64| p(a * x) / a) as Func
        });
        out
    }
}

/// A nonnegative function used as a density.
#[derive(Debug, Clone)]
pub struct Weight(RealFunction);

impl Weight {
    /// Checks nonnegativity on 4097 equispaced samples of `probe`.
    pub fn new(f: RealFunction, probe: &Interval) -> Result<Self> {
        if probe.is_bounded() {
            for k in 0..=4096 {
                let x = probe.a + probe.len() * k as f64 / 4096.0;
                let v = f.eval(x);
                if v < 0.0 {
                    return Err(Error::Invalid(format!("weight is negative ({v}) at {x}")));
                }
            }
        }
        Ok(Weight(f))
    }

    pub fn unit() -> Self {
        Weight(RealFunction::constant(1.0))
    }

    /// `|x|^a`, with an integrable singularity at 0 when `a < 0`.
    pub fn power(a: f64) -> Self {
        Weight(
            RealFunction::new(
                format!("|x|^{a}"),
                Arc::new(move |x: f64| x.abs().powf(a)),
                Interval::real_line(),
            )
            .with_singularities(vec![0.0]),
        )
    }

    /// `h'` of a homeomorphism with a derivative.
    pub fn derivative_of(h: &crate::homeo::Homeo1D) -> Result<Self> {
        let d = h.deriv_fn().ok_or(Error::MissingDerivative)?;
        let e = h.eval_fn();
        let f = RealFunction::new(format!("{}'", h.name()), d, h.window()).with_prefix(e);
        Ok(Weight(f))
    }

    /// `exp(u)`.
    pub fn exp_of(u: &RealFunction) -> Self {
        let e = u.eval_fn();
        let mut f = RealFunction::new(
            format!("exp({})", u.name()),
            Arc::new(move |x| e(x).exp()),
            u.window(),
        );
        f.singular = u.singular.clone();
        f.period = u.period;
        Weight(f)
    }

    pub fn function(&self) -> &RealFunction {
        &self.0
    }

    /// `w^p` sharing window and singular points.
    pub fn power_of(&self, p: f64) -> RealFunction {
        let e = self.0.eval_fn();
        let mut f = self.0.clone();
        f.name = format!("({})^{p}", self.0.name);
        f.eval = Arc::new(move |x| e(x).powf(p));
        f.prefix = None;
        f
    }
}
