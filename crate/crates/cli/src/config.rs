//! Scenario files: one TOML document per scenario.
//!
//! ```toml
//! schema_version = 1
//! name = "play1d"
//! seed = 7
//!
//! [problem]
//! t_end = 1.0
//! x0 = [0.0]
//! family = { kind = "fixed", set = { kind = "box", lo = [-1.0], hi = [1.0] } }
//! u = { kind = "sine", amplitude = [2.0], frequency = 3.0, sampling = 10000 }
//!
//! [[experiments]]
//! kind = "solve"
//! ```

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    pub seed: u64,
    #[serde(default)]
    pub description: String,
    pub problem: ProblemSpec,
    #[serde(default)]
    pub experiments: Vec<Experiment>,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub dir: Option<String>,
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { dir: None, formats: default_formats() }
    }
}

fn default_formats() -> Vec<String> {
    vec!["csv".into(), "svg".into()]
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    #[serde(default = "one")]
    pub t_end: f64,
    pub x0: Vec<f64>,
    #[serde(default)]
    pub r: Option<f64>,
    #[serde(default)]
    pub m: Option<f64>,
    pub family: FamilySpec,
    pub u: InputSpec,
    #[serde(default)]
    pub w: Option<InputSpec>,
    #[serde(default)]
    pub mesh: Option<MeshSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MeshSpec {
    pub eps0: f64,
    #[serde(default = "half")]
    pub ratio: f64,
    pub levels: usize,
}

fn half() -> f64 {
    0.5
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InteriorSpec {
    pub rho: f64,
    pub big_r: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SetSpec {
    #[serde(flatten)]
    pub shape: SetShape,
    #[serde(default)]
    pub interior: Option<InteriorSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetShape {
    Ball { center: Vec<f64>, radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Halfspace { normal: Vec<f64>, offset: f64 },
    BallComplement { center: Vec<f64>, radius: f64 },
    Cusp { r: f64 },
    TwoBalls { c1: Vec<f64>, c2: Vec<f64>, radius: f64 },
    Crescent { c1: Vec<f64>, r1: f64, c2: Vec<f64>, r2: f64 },
    Intersection { parts: Vec<SetSpec> },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Fixed { set: SetSpec },
    Translation { set: SetSpec },
    Rotation { set: SetSpec, center: Vec<f64> },
    ScaledBall { center: Vec<f64>, r_min: f64, r_max: f64, #[serde(default)] interior: Option<InteriorSpec> },
}

impl FamilySpec {
    pub fn kind(&self) -> &'static str {
        match self {
            FamilySpec::Fixed { .. } => "fixed",
            FamilySpec::Translation { .. } => "translation",
            FamilySpec::Rotation { .. } => "rotation",
            FamilySpec::ScaledBall { .. } => "scaled_ball",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct JumpSpec {
    pub t: f64,
    pub size: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct InputSpec {
    #[serde(flatten)]
    pub shape: InputShape,
    /// Replace the input by its exact samples on `sampling` uniform plateaus.
    #[serde(default)]
    pub sampling: Option<usize>,
    #[serde(default)]
    pub jumps: Vec<JumpSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InputShape {
    Constant { value: Vec<f64> },
    Linear { from: Vec<f64>, to: Vec<f64> },
    Sine {
        amplitude: Vec<f64>,
        frequency: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        offset: Option<Vec<f64>>,
    },
    Polyline { times: Vec<f64>, points: Vec<Vec<f64>> },
    /// `cycles` repetitions of `0 -> a d_1 -> 0 -> a d_2 -> 0 ...`.
    Oscillation { amplitude: f64, directions: Vec<Vec<f64>>, cycles: usize },
    Steps { times: Vec<f64>, values: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    #[serde(default)]
    pub du: Option<Vec<f64>>,
    #[serde(default)]
    pub dw: Option<Vec<f64>>,
    #[serde(default)]
    pub dx0: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    /// Finest-mesh solution with the per-step contract checks.
    Solve,
    /// Cauchy table over the mesh schedule.
    Refinement,
    Residuals {
        #[serde(default = "sixteen")]
        points_per_step: usize,
        #[serde(default = "eight")]
        test_functions: usize,
        #[serde(default = "one")]
        radius: f64,
    },
    VariationAudit {
        #[serde(default)]
        windows: Option<Vec<[usize; 2]>>,
        #[serde(default)]
        rho: Option<f64>,
        #[serde(default)]
        big_r: Option<f64>,
        #[serde(default)]
        min_input_variation: Option<f64>,
    },
    ContinuousDependence { perturbations: Vec<PerturbationSpec> },
    AcResidual {
        #[serde(default = "sixteen")]
        test_points: usize,
        #[serde(default = "one")]
        radius: f64,
        #[serde(default = "fifty")]
        block: usize,
    },
    Holder {
        #[serde(default = "fifty")]
        window: usize,
    },
    /// Checks the behaviour expected when the interior condition fails:
    /// the output copies the input, `ξ_j = u_j`.
    NegativeControl,
    PlayOracle { lower: f64, upper: f64 },
    Uniqueness,
    Lint {
        #[serde(default = "default_big_r")]
        big_r: Vec<f64>,
        #[serde(default = "default_fractions")]
        fractions: Vec<f64>,
        #[serde(default = "sixteen")]
        samples: usize,
    },
}

fn sixteen() -> usize {
    16
}
fn eight() -> usize {
    8
}
fn fifty() -> usize {
    50
}
pub fn default_big_r() -> Vec<f64> {
    vec![3.0, 4.0, 6.0]
}
pub fn default_fractions() -> Vec<f64> {
    vec![0.25, 0.5, 0.9]
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Solve => "solve",
            Experiment::Refinement => "refinement",
            Experiment::Residuals { .. } => "residuals",
            Experiment::VariationAudit { .. } => "variation_audit",
            Experiment::ContinuousDependence { .. } => "continuous_dependence",
            Experiment::AcResidual { .. } => "ac_residual",
            Experiment::Holder { .. } => "holder",
            Experiment::NegativeControl => "negative_control",
            Experiment::PlayOracle { .. } => "play_oracle",
            Experiment::Uniqueness => "uniqueness",
            Experiment::Lint { .. } => "lint",
        }
    }
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| anyhow::anyhow!("parse error: {e}"))?;
        if s.schema_version != SCHEMA_VERSION {
            bail!("unsupported schema_version {} (expected {SCHEMA_VERSION})", s.schema_version);
        }
        if s.name.is_empty() || !s.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            bail!("name must be a non-empty identifier, got {:?}", s.name);
        }
        for f in &s.output.formats {
            if f != "csv" && f != "svg" {
                bail!("unknown output format {f:?} (expected csv or svg)");
            }
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    /// Canonical text used for the config hash.
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("scenario serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
schema_version = 1
name = "t"
seed = 1
[problem]
x0 = [0.0]
family = { kind = "fixed", set = { kind = "box", lo = [-1.0], hi = [1.0] } }
u = { kind = "linear", from = [0.0], to = [1.0] }
"#;

    #[test]
    fn minimal_parses() {
        let s = Scenario::parse(MINIMAL).unwrap();
        assert!(s.experiments.is_empty());
        assert_eq!(s.output.formats, vec!["csv", "svg"]);
    }

    #[test]
    fn unknown_field_reports_location() {
        let bad = MINIMAL.replace("seed = 1", "seed = 1\nsede = 2");
        let msg = format!("{:#}", Scenario::parse(&bad).unwrap_err());
        assert!(msg.contains("sede"), "{msg}");
        assert!(msg.contains("line"), "{msg}");
    }

    #[test]
    fn wrong_version() {
        let bad = MINIMAL.replace("schema_version = 1", "schema_version = 9");
        assert!(Scenario::parse(&bad).is_err());
    }

    #[test]
    fn experiments_parse() {
        let text = format!(
            "{MINIMAL}\n[[experiments]]\nkind = \"solve\"\n[[experiments]]\nkind = \"residuals\"\npoints_per_step = 4\n"
        );
        let s = Scenario::parse(&text).unwrap();
        assert_eq!(s.experiments.len(), 2);
        assert_eq!(s.experiments[1].kind(), "residuals");
    }
}
