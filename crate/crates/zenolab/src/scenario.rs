//! Declarative scenario configs.
//!
//! A scenario is one JSON document `{kind, parameters, output_path}`. The
//! parameter map is checked against the schema of its kind only when the
//! scenario runs, so unknown keys and missing required keys surface as
//! validation failures naming the key. See `CONFIG.md` for the schemas.

use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::io::MatrixDoc;
use crate::runner::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Survival,
    ZenoProduct,
    Subspaces,
    Kicks,
    Continuous,
    HybridEquivalence,
    Spatial,
    TranslationDemo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub kind: Kind,
    #[serde(default)]
    pub parameters: Map<String, Value>,
    pub output_path: PathBuf,
}

impl Scenario {
    pub fn new<P: Serialize>(kind: Kind, parameters: &P, output_path: impl Into<PathBuf>) -> Self {
        let parameters = match serde_json::to_value(parameters).expect("serializable parameters") {
            Value::Object(map) => map,
            _ => panic!("parameters must serialize to a JSON object"),
        };
        Scenario {
            kind,
            parameters,
            output_path: output_path.into(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, RunError> {
        serde_json::from_str(text).map_err(|e| RunError::validation("ConfigSchema", e.to_string()))
    }

    pub fn to_json(&self) -> String {
        crate::io::to_json_string(self)
    }

    pub fn params<P: DeserializeOwned>(&self) -> Result<P, RunError> {
        serde_json::from_value(Value::Object(self.parameters.clone()))
            .map_err(|e| RunError::validation("ConfigSchema", format!("parameters: {e}")))
    }
}

/// The Hamiltonian of a scenario: a built-in model or an explicit matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SystemSpec {
    Rabi {
        omega: f64,
    },
    ThreeLevel {
        omega1: f64,
        omega2: f64,
    },
    FourLevel {
        omega1: f64,
        omega2: f64,
    },
    Friedrichs {
        omega0: f64,
        coupling: f64,
        bandwidth: f64,
        levels: usize,
    },
    Custom {
        hamiltonian: MatrixDoc,
    },
}

/// A pure state: a computational basis vector or explicit amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Basis { basis: usize },
    Vector(MatrixDoc),
}

/// An initial density matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialSpec {
    Basis { basis: usize },
    Density { density: MatrixDoc },
    Vector(MatrixDoc),
}

/// A projector: the span of some basis vectors, or an explicit matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProjectorSpec {
    Basis { basis: Vec<usize> },
    Matrix(MatrixDoc),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum KickDoc {
    /// `P_1 + exp(-i lambda H_c)` on the four-level system.
    Itano {
        lambda: f64,
    },
    Custom {
        unitary: MatrixDoc,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CouplingDoc {
    /// `|c><M| + |M><c|` on the four-level system.
    Ketterle,
    Custom {
        h_c: MatrixDoc,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDoc {
    pub points: usize,
    pub length: f64,
    #[serde(default = "one")]
    pub mass: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<Vec<f64>>,
}

/// A window given either by its wall positions `[a, b]` or by the half-open
/// grid index range `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WindowDoc {
    Interval { a: f64, b: f64 },
    Indices { lo: usize, hi: usize },
}

fn one() -> f64 {
    1.0
}

fn default_samples() -> usize {
    201
}

fn default_quadrature() -> usize {
    zenolab_core::spatial::DEFAULT_QUADRATURE_NODES
}

fn default_stride() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurvivalParams {
    pub system: SystemSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSpec>,
    /// Total time of the measured evolution.
    pub t: f64,
    /// Number of measurements in `[0, t]`.
    pub n: u32,
    /// End of the sampled survival curves; defaults to `t`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Interval grid for `gamma_eff`; defaults to `(0, t_max]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_range: Option<[f64; 2]>,
    #[serde(default = "default_samples")]
    pub tau_samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_window: Option<[f64; 2]>,
    /// Reference rate for the transition time; defaults to the fitted rate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bracket: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZenoProductParams {
    pub system: SystemSpec,
    pub projector: ProjectorSpec,
    pub t: f64,
    pub n_list: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubspacesParams {
    pub system: SystemSpec,
    /// Defaults to the model's own partition where it has one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<ProjectorSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho0: Option<InitialSpec>,
    pub t: f64,
    /// Measurements in `[0, t]` for the recorded time series.
    pub n: u32,
    /// Record every `stride`-th measurement.
    #[serde(default = "default_stride")]
    pub stride: usize,
    /// Measurement counts for the leakage sweep at time `t`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub n_sweep: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KicksParams {
    pub system: SystemSpec,
    pub kick: KickDoc,
    pub t: f64,
    pub n_list: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSpec>,
    /// Largest allowed distance from the closed-form large-`N` evolution,
    /// checked at the largest `N` (built-in four-level scheme only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuousParams {
    pub system: SystemSpec,
    pub coupling: CouplingDoc,
    pub t: f64,
    pub k_list: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HybridParams {
    pub system: SystemSpec,
    pub coupling: CouplingDoc,
    pub tau0: f64,
    pub t: f64,
    /// Paired with `tau_list` row by row.
    pub k_list: Vec<f64>,
    pub tau_list: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpatialParams {
    pub grid: GridDoc,
    pub window: WindowDoc,
    pub t: f64,
    pub n_list: Vec<u32>,
    /// Dirichlet mode used as the initial state.
    #[serde(default)]
    pub mode: usize,
    /// Horizon of the time-averaged defect; defaults to `t`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_avg: Option<f64>,
    #[serde(default = "default_quadrature")]
    pub quadrature_nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranslationParams {
    pub grid: GridDoc,
    pub window: WindowDoc,
    pub t: f64,
    pub s: f64,
    /// Lattice steps between samples of the survival curve.
    #[serde(default = "default_stride")]
    pub stride: usize,
}
