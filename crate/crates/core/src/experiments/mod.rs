//! Named scenario runners. Each run wires the library modules into one check,
//! gates the outcome against configured thresholds and emits a
//! [`ScenarioReport`] with its CSV artifacts.
//!
//! Thresholds are desk-scale gates, not sharp constants; every report echoes
//! the ones it used.

mod report;
mod runners;

pub use report::{ScenarioReport, Status, Verdict};
pub use runners::{
    run_cayley_comparison, run_chain_rule, run_composition_failure, run_de_vanishing,
    run_symmetric_closure, run_uc_closure,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homeo::{make_catalog, Homeo1D, Params};
use crate::interval::Interval;

/// `(name, description)` of every scenario.
pub const SCENARIOS: [(&str, &str); 6] = [
    (
        "composition-failure",
        "log-derivative oscillation of g_tiled o h_parabolic plateaus while both factors decay",
    ),
    (
        "uc-closure",
        "g o h^-1 keeps a vanishing log-derivative oscillation for uniformly continuous h",
    ),
    (
        "symmetric-closure",
        "symmetric quotient profiles of g, h and g o h^-1",
    ),
    (
        "de-vanishing",
        "Carleson profile of the barycentric extension's dilatation",
    ),
    (
        "chain-rule",
        "chain dilatation of Beurling-Ahlfors extensions and hyperbolic comparability",
    ),
    (
        "cayley-comparison",
        "log|1-xi| on the circle against its Cayley pull-back on the line",
    ),
];

/// A catalog entry with parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapChoice {
    pub name: String,
    pub params: Params,
}

impl MapChoice {
    pub fn new(name: &str) -> Self {
        MapChoice {
            name: name.to_string(),
            params: Params::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn line(&self) -> Result<Homeo1D> {
        make_catalog(&self.name, &self.params)?.line()
    }
}

/// Half-plane sampling grid for field-based scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridChoice {
    pub window: Interval,
    pub top: f64,
    pub levels: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Upper bound for a decaying profile at its smallest scale.
    pub decay: f64,
    /// Lower bound for a plateau.
    pub plateau: f64,
    /// Upper bound for the symmetric profile at its smallest scale.
    pub symmetric: f64,
    /// Lower bound for the circle profile of `log|1 - ξ|`.
    pub cayley_plateau: f64,
    /// Relative change allowed when the grid is refined.
    pub grid_tolerance: f64,
    /// Largest accepted `max R / min R` in the imaginary-part ratio check.
    pub ratio_factor: f64,
    /// Largest accepted variation of the box-image constant across scales.
    pub box_factor: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            decay: 0.05,
            plateau: 0.1,
            symmetric: 0.02,
            cayley_plateau: 0.3,
            grid_tolerance: 0.1,
            ratio_factor: 4.0,
            box_factor: 2.0,
        }
    }
}

/// Inputs shared by the scenario runners. `None` selects the scenario's own
/// default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub g: Option<MapChoice>,
    pub h: Option<MapChoice>,
    pub window: Option<Interval>,
    pub scales: Option<Vec<f64>>,
    pub grid: GridChoice,
    /// Repeat field runs on a grid with twice the horizontal resolution.
    pub grid_check: bool,
    /// Dyadic points `x_n = 2^n` probed by the plateau checks.
    pub n_min: u32,
    pub n_max: u32,
    pub thresholds: Thresholds,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            g: None,
            h: None,
            window: None,
            scales: None,
            grid: GridChoice {
                window: Interval { a: -8.0, b: 8.0 },
                top: 8.0,
                levels: 10,
            },
            grid_check: true,
            n_min: 6,
            n_max: 12,
            thresholds: Thresholds::default(),
            seed: 0x5eed,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let t = &self.thresholds;
        let all = [
            ("decay", t.decay),
            ("plateau", t.plateau),
            ("symmetric", t.symmetric),
            ("cayley_plateau", t.cayley_plateau),
            ("grid_tolerance", t.grid_tolerance),
            ("ratio_factor", t.ratio_factor),
            ("box_factor", t.box_factor),
        ];
        let bad: Vec<&str> = all
            .iter()
            .filter(|(_, v)| !(v.is_finite() && *v > 0.0))
            .map(|(k, _)| *k)
            .collect();
        if !bad.is_empty() {
            return Err(Error::Invalid(format!(
                "thresholds must be positive: {}",
                bad.join(", ")
            )));
        }
        if let Some(s) = &self.scales {
            crate::profile::check_scales(s)?;
        }
        if self.n_min > self.n_max || self.n_max > 40 {
            return Err(Error::Invalid(format!(
                "n range {}..={} must be ordered and at most 40",
                self.n_min, self.n_max
            )));
        }
        crate::extension::GridSpec::new(self.grid.window, self.grid.top, self.grid.levels)?;
        Ok(())
    }
}

/// Strip an optional `run-` prefix and look the scenario up.
pub fn canonical_name(name: &str) -> Option<&'static str> {
    let n = name.strip_prefix("run-").unwrap_or(name).replace('_', "-");
    SCENARIOS.iter().map(|s| s.0).find(|s| *s == n)
}

/// Run a scenario by name.
pub fn run_scenario(name: &str, cfg: &ExperimentConfig) -> Result<ScenarioReport> {
    cfg.validate()?;
    match canonical_name(name) {
        Some("composition-failure") => run_composition_failure(cfg),
        Some("uc-closure") => run_uc_closure(cfg),
        Some("symmetric-closure") => run_symmetric_closure(cfg),
        Some("de-vanishing") => run_de_vanishing(cfg),
        Some("chain-rule") => run_chain_rule(cfg),
        Some("cayley-comparison") => run_cayley_comparison(cfg),
        _ => Err(Error::UnknownName(name.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_resolve() {
        assert_eq!(canonical_name("run-de-vanishing"), Some("de-vanishing"));
        assert_eq!(canonical_name("chain_rule"), Some("chain-rule"));
        assert_eq!(canonical_name("nope"), None);
        assert!(matches!(
            run_scenario("nope", &ExperimentConfig::default()),
            Err(Error::UnknownName(_))
        ));
    }

    #[test]
    fn validation_rejects_bad_inputs() {
        let mut c = ExperimentConfig::default();
        c.thresholds.decay = -1.0;
        assert!(c.validate().is_err());
        let c = ExperimentConfig {
            scales: Some(vec![0.25, 0.5]),
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::default();
        c.grid.levels = 40;
        assert!(c.validate().is_err());
        assert!(ExperimentConfig::default().validate().is_ok());
    }
}
