//! Scenario configuration: the JSON document, its defaults and validation.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use nhcse_core::hatano_nelson::ZetaRule;
use nhcse_core::lattice::{Boundary, EdgeSide, EdgeStyle, HaldaneParams, ProfileSpec};
use nhcse_core::spectra::ClassifyOptions;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Fig2a,
    Fig2b,
    Fig2cd,
    Fig3ab,
    Fig3cd,
    Fig3strip,
    Fig4,
    CircuitCheck,
    Chern,
    OracleSuite,
    Custom,
}

impl Scenario {
    pub const ALL: [Scenario; 11] = [
        Scenario::Fig2a,
        Scenario::Fig2b,
        Scenario::Fig2cd,
        Scenario::Fig3ab,
        Scenario::Fig3cd,
        Scenario::Fig3strip,
        Scenario::Fig4,
        Scenario::CircuitCheck,
        Scenario::Chern,
        Scenario::OracleSuite,
        Scenario::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Fig2a => "fig2a",
            Scenario::Fig2b => "fig2b",
            Scenario::Fig2cd => "fig2cd",
            Scenario::Fig3ab => "fig3ab",
            Scenario::Fig3cd => "fig3cd",
            Scenario::Fig3strip => "fig3strip",
            Scenario::Fig4 => "fig4",
            Scenario::CircuitCheck => "circuit-check",
            Scenario::Chern => "chern",
            Scenario::OracleSuite => "oracle-suite",
            Scenario::Custom => "custom",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Scenario::Fig2a => "zigzag cylinder, bulk domain walls -gamma | +gamma (gamma = 0.1)",
            Scenario::Fig2b => "zigzag cylinder, bulk domain walls -gamma | 0 (gamma = 0.2)",
            Scenario::Fig2cd => "zigzag cylinder, bulk domain walls -gamma | +gamma with localization fit (gamma = 0.2)",
            Scenario::Fig3ab => "uniform loss on the lower zigzag edge, harmonics and half Hatano-Nelson comparison (gamma = 0.1)",
            Scenario::Fig3cd => "domain walls on the lower zigzag edge with localization fit (gamma = 0.1)",
            Scenario::Fig3strip => "edge domain walls on strips of two widths, dissipation-free edge response (gamma = 0.5)",
            Scenario::Fig4 => "staggered gain and loss on a rectangle, armchair and zigzag effective dissipation (gamma = 0.3)",
            Scenario::CircuitCheck => "electrical network reduced to the Bloch Hamiltonian at random momenta",
            Scenario::Chern => "Chern number of the lower band",
            Scenario::OracleSuite => "random continuum fields checked against the closed forms and quadrature",
            Scenario::Custom => "user geometry and dissipation profile",
        }
    }

    /// Dissipation strength used when the config gives none.
    pub fn default_gamma(self) -> f64 {
        match self {
            Scenario::Fig2a | Scenario::Fig3ab | Scenario::Fig3cd | Scenario::CircuitCheck => 0.1,
            Scenario::Fig2b | Scenario::Fig2cd => 0.2,
            Scenario::Fig3strip => 0.5,
            Scenario::Fig4 => 0.3,
            Scenario::Chern | Scenario::OracleSuite | Scenario::Custom => 0.0,
        }
    }

    fn default_geometry(self) -> Geometry {
        let zigzag = |lx, ly| Geometry { lx, ly, edges: EdgeStyle::Zigzag, bc_x: None, bc_y: None };
        match self {
            Scenario::Fig3strip => zigzag(32, 16),
            Scenario::Fig4 => Geometry { lx: 20, ly: 20, edges: EdgeStyle::Rectangle, bc_x: None, bc_y: None },
            Scenario::CircuitCheck => Geometry { lx: 2, ly: 2, edges: EdgeStyle::Torus, bc_x: None, bc_y: None },
            _ => zigzag(24, 20),
        }
    }

    fn uses_lattice(self) -> bool {
        !matches!(self, Scenario::Chern | Scenario::OracleSuite)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| CliError::Config(format!("unknown scenario '{s}'; see `nhcse list-scenarios`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    pub lx: usize,
    pub ly: usize,
    pub edges: EdgeStyle,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bc_x: Option<Boundary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bc_y: Option<Boundary>,
}

impl Geometry {
    pub fn boundaries(&self) -> (Boundary, Boundary) {
        use Boundary::*;
        match self.edges {
            EdgeStyle::Torus => (Periodic, Periodic),
            EdgeStyle::Zigzag => (Periodic, Open),
            EdgeStyle::Armchair => (Open, Periodic),
            EdgeStyle::Rectangle => (Open, Open),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Model {
    #[serde(default = "one")]
    pub t1: f64,
    #[serde(default = "default_t2")]
    pub t2: f64,
    #[serde(default = "default_phi")]
    pub phi: f64,
}

fn one() -> f64 {
    1.0
}

fn default_t2() -> f64 {
    0.2
}

fn default_phi() -> f64 {
    FRAC_PI_2
}

impl Default for Model {
    fn default() -> Self {
        Self { t1: 1.0, t2: 0.2, phi: FRAC_PI_2 }
    }
}

impl Model {
    pub fn params(&self) -> HaldaneParams {
        HaldaneParams { t1: self.t1, t2: self.t2, phi: self.phi }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Classify {
    pub gap_window: f64,
    pub weight_threshold: f64,
    pub depth: usize,
    pub cluster_tol: f64,
}

impl Default for Classify {
    fn default() -> Self {
        let o = ClassifyOptions::default();
        Self { gap_window: o.gap_window, weight_threshold: o.weight_threshold, depth: o.depth, cluster_tol: o.cluster_tol }
    }
}

impl Classify {
    pub fn options(&self) -> ClassifyOptions {
        ClassifyOptions {
            gap_window: self.gap_window,
            weight_threshold: self.weight_threshold,
            depth: self.depth,
            cluster_tol: self.cluster_tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Fit {
    /// Cells skipped on each side of every wall.
    pub exclusion: f64,
    pub harmonics: usize,
    pub k_samples: usize,
    pub zeta_rule: ZetaRule,
    pub chern_grid: usize,
    pub oracle_cases: usize,
}

impl Default for Fit {
    fn default() -> Self {
        Self { exclusion: 2.0, harmonics: 2, k_samples: 90, zeta_rule: ZetaRule::FirstHarmonic, chern_grid: 24, oracle_cases: 200 }
    }
}

/// The config document as written by the user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<Geometry>,
    #[serde(default)]
    pub model: Model,
    /// Overrides the scenario's dissipation profile.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileSpec>,
    /// Strength fed to the scenario's default profile.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Widths of the strip scenario.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub widths: Option<Vec<usize>>,
    #[serde(default)]
    pub classify: Classify,
    #[serde(default)]
    pub fit: Fit,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Netlist file replacing the generated network in `circuit-check`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub netlist: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub svg: bool,
}

impl ScenarioConfig {
    pub fn new(scenario: Scenario) -> Self {
        Self {
            scenario,
            geometry: None,
            model: Model::default(),
            profile: None,
            gamma: None,
            widths: None,
            classify: Classify::default(),
            fit: Fit::default(),
            output: None,
            netlist: None,
            seed: 0,
            svg: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry.unwrap_or_else(|| self.scenario.default_geometry())
    }

    pub fn gamma(&self) -> f64 {
        self.gamma.unwrap_or_else(|| self.scenario.default_gamma())
    }

    pub fn widths(&self) -> Vec<usize> {
        match (&self.widths, self.scenario) {
            (Some(w), _) => w.clone(),
            (None, Scenario::Fig3strip) => vec![16, 40],
            (None, _) => vec![self.geometry().ly],
        }
    }

    /// Dissipation profile of lattice scenarios for the given strip length.
    pub fn profile_for(&self, lx: usize) -> ProfileSpec {
        if let Some(p) = &self.profile {
            return p.clone();
        }
        let g = self.gamma();
        let walls = [0.0, (lx / 2) as f64];
        let lower = EdgeSide::Lower;
        match self.scenario {
            Scenario::Fig2a | Scenario::Fig2cd => ProfileSpec::BulkGddw { gamma_left: -g, gamma_right: g, walls },
            Scenario::Fig2b => ProfileSpec::BulkGddw { gamma_left: -g, gamma_right: 0.0, walls },
            Scenario::Fig3ab => ProfileSpec::EdgeUniform { edge: lower, gamma: -g },
            Scenario::Fig3cd | Scenario::Fig3strip => {
                ProfileSpec::EdgeGddw { edge: lower, gamma_left: -g, gamma_right: g, walls }
            }
            Scenario::Fig4 => ProfileSpec::Staggered { gamma: g },
            Scenario::CircuitCheck => ProfileSpec::BulkUniform { gamma: g },
            Scenario::Chern | Scenario::OracleSuite | Scenario::Custom => ProfileSpec::None,
        }
    }

    /// Sets a sweepable parameter.
    pub fn set_param(&mut self, name: &str, value: f64) -> Result<(), CliError> {
        let as_size = |v: f64| -> Result<usize, CliError> {
            if v >= 1.0 && v.fract() == 0.0 && v <= 4096.0 {
                Ok(v as usize)
            } else {
                Err(CliError::Config(format!("{name} must be a positive integer, got {v}")))
            }
        };
        match name {
            "gamma" => self.gamma = Some(value),
            "t1" => self.model.t1 = value,
            "t2" => self.model.t2 = value,
            "phi" => self.model.phi = value,
            "lx" | "ly" => {
                let mut g = self.geometry();
                if name == "lx" {
                    g.lx = as_size(value)?;
                } else {
                    g.ly = as_size(value)?;
                }
                self.geometry = Some(g);
            }
            "seed" => {
                if value < 0.0 || value.fract() != 0.0 {
                    return Err(CliError::Config(format!("seed must be a non-negative integer, got {value}")));
                }
                self.seed = value as u64;
            }
            "exclusion" => self.fit.exclusion = value,
            "gap_window" => self.classify.gap_window = value,
            _ => {
                return Err(CliError::Config(format!(
                    "unknown parameter '{name}'; sweepable: {}",
                    SWEEPABLE.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Checks every parameter before any computation starts.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        let m = &self.model;
        if !(m.t1.is_finite() && m.t1 > 0.0) {
            return bad(format!("t1 must be positive, got {}", m.t1));
        }
        if !(m.t2.is_finite() && m.t2 >= 0.0) {
            return bad(format!("t2 must be non-negative, got {}", m.t2));
        }
        if !m.phi.is_finite() {
            return bad("phi must be finite".into());
        }
        if !self.gamma().is_finite() {
            return bad("gamma must be finite".into());
        }
        if self.scenario == Scenario::CircuitCheck && (m.phi.abs() - FRAC_PI_2).abs() > 1e-12 {
            return bad(format!("the circuit realizes phi = +-pi/2 only, got {}", m.phi));
        }
        if self.scenario.uses_lattice() {
            let g = self.geometry();
            let (bx, by) = g.boundaries();
            if g.bc_x.is_some_and(|b| b != bx) || g.bc_y.is_some_and(|b| b != by) {
                return bad(format!("boundary conditions do not match {:?} edges", g.edges));
            }
            for &ly in &self.widths() {
                if g.lx == 0 || ly == 0 {
                    return bad("lx and ly must be positive".into());
                }
                if by == Boundary::Periodic && ly % 2 == 1 {
                    return bad(format!("a periodic y axis needs an even ly, got {ly}"));
                }
                if g.lx * ly > 4096 {
                    return bad(format!("{} x {ly} cells exceeds the dense-solver limit of 4096 cells", g.lx));
                }
            }
            let needs_zigzag = matches!(
                self.scenario,
                Scenario::Fig2a | Scenario::Fig2b | Scenario::Fig2cd | Scenario::Fig3ab | Scenario::Fig3cd | Scenario::Fig3strip
            );
            if needs_zigzag && g.edges != EdgeStyle::Zigzag {
                return bad(format!("{} runs on a zigzag cylinder", self.scenario));
            }
            if self.scenario == Scenario::Fig4 && g.edges != EdgeStyle::Rectangle {
                return bad("fig4 runs on a rectangle".into());
            }
            if self.scenario == Scenario::Fig4 && !matches!(self.profile, None | Some(ProfileSpec::Staggered { .. })) {
                return bad("fig4 takes a staggered profile only".into());
            }
            if self.scenario == Scenario::Custom && self.profile.is_none() {
                return bad("custom scenario needs a profile".into());
            }
        }
        let c = &self.classify;
        if !(c.gap_window > 0.0 && (0.0..=1.0).contains(&c.weight_threshold) && c.depth > 0 && c.cluster_tol >= 0.0) {
            return bad("classify options out of range".into());
        }
        let f = &self.fit;
        if !(f.exclusion >= 0.0 && f.harmonics >= 1 && f.k_samples >= 2 * f.harmonics + 2 && f.chern_grid >= 2) {
            return bad("fit options out of range".into());
        }
        Ok(())
    }
}

pub const SWEEPABLE: [&str; 9] = ["gamma", "t1", "t2", "phi", "lx", "ly", "seed", "exclusion", "gap_window"];
