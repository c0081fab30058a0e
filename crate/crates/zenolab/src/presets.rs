//! Built-in scenarios reproducing the worked examples.

use std::f64::consts::PI;

use serde::Serialize;
use zenolab_core::models::FriedrichsChain;

use crate::scenario::*;

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    build: fn() -> (Kind, serde_json::Value),
}

impl Preset {
    /// The preset as a scenario writing to `out/<name>`.
    pub fn scenario(&self) -> Scenario {
        let (kind, params) = (self.build)();
        Scenario::new(kind, &params, format!("out/{}", self.name))
    }
}

fn value<P: Serialize>(kind: Kind, params: P) -> (Kind, serde_json::Value) {
    (kind, serde_json::to_value(params).expect("serializable parameters"))
}

fn four_level() -> SystemSpec {
    SystemSpec::FourLevel {
        omega1: 1.0,
        omega2: 1.0,
    }
}

pub const PRESETS: [Preset; 8] = [
    Preset {
        name: "two-level-rabi",
        description: "Rabi oscillation H = sigma_1 with N = 5 measurements in t = 1",
        build: || {
            value(
                Kind::Survival,
                SurvivalParams {
                    system: SystemSpec::Rabi { omega: 1.0 },
                    state: None,
                    t: 1.0,
                    n: 5,
                    t_max: Some(PI),
                    samples: 201,
                    tau_range: None,
                    tau_samples: 200,
                    fit_window: None,
                    gamma: None,
                    bracket: None,
                },
            )
        },
    },
    Preset {
        name: "three-level-projective",
        description: "three-level ladder measured on {a, b} vs {c}: sector conservation and leakage",
        build: || {
            value(
                Kind::Subspaces,
                SubspacesParams {
                    system: SystemSpec::ThreeLevel {
                        omega1: 1.0,
                        omega2: 1.0,
                    },
                    partition: None,
                    rho0: None,
                    t: 1.0,
                    n: 1000,
                    stride: 10,
                    n_sweep: vec![250, 500, 1000, 2000],
                },
            )
        },
    },
    Preset {
        name: "itano-4level",
        description: "four-level system with pi/2 kicks on the c-M transition, N up to 400",
        build: || {
            value(
                Kind::Kicks,
                KicksParams {
                    system: four_level(),
                    kick: KickDoc::Itano { lambda: PI / 2.0 },
                    t: 1.0,
                    n_list: vec![50, 100, 200, 400],
                    state: None,
                    reference_tol: Some(3e-2),
                },
            )
        },
    },
    Preset {
        name: "ketterle-4level",
        description: "four-level system with continuous c-M coupling, K up to 200",
        build: || {
            value(
                Kind::Continuous,
                ContinuousParams {
                    system: four_level(),
                    coupling: CouplingDoc::Ketterle,
                    t: 1.0,
                    k_list: vec![25.0, 50.0, 100.0, 200.0],
                    state: None,
                    reference_tol: Some(3e-2),
                },
            )
        },
    },
    Preset {
        name: "friedrichs-ize",
        description: "level coupled to a flat 40-level band: Zeno region, golden-rule decay, transition search",
        build: || {
            let chain = FriedrichsChain::default();
            let (lo, hi) = chain.exponential_window();
            value(
                Kind::Survival,
                SurvivalParams {
                    system: SystemSpec::Friedrichs {
                        omega0: chain.omega0,
                        coupling: chain.coupling,
                        bandwidth: chain.bandwidth,
                        levels: chain.levels,
                    },
                    state: None,
                    t: 5.0,
                    n: 10,
                    t_max: Some(hi.ceil()),
                    samples: 1001,
                    tau_range: Some([0.01, hi.floor()]),
                    tau_samples: 400,
                    fit_window: Some([lo, hi.floor()]),
                    gamma: None,
                    bracket: Some([0.01, hi.floor()]),
                },
            )
        },
    },
    Preset {
        name: "dirichlet-box",
        description: "free particle on 512 sites, window [0.5, 1.5] measured N times: hard-wall limit",
        build: || {
            value(
                Kind::Spatial,
                SpatialParams {
                    grid: GridDoc {
                        points: 512,
                        length: 2.0,
                        mass: 1.0,
                        potential: None,
                    },
                    window: WindowDoc::Interval { a: 0.5, b: 1.5 },
                    t: 0.2,
                    n_list: vec![250, 500, 1000, 2000],
                    mode: 0,
                    t_avg: None,
                    quadrature_nodes: zenolab_core::spatial::DEFAULT_QUADRATURE_NODES,
                },
            )
        },
    },
    Preset {
        name: "translation-semigroup",
        description: "momentum generator projected on a window: N-independent, non-unitary semigroup",
        build: || {
            value(
                Kind::TranslationDemo,
                TranslationParams {
                    grid: GridDoc {
                        points: 512,
                        length: 2.0,
                        mass: 1.0,
                        potential: None,
                    },
                    window: WindowDoc::Indices { lo: 128, hi: 384 },
                    t: 0.25,
                    s: 0.25,
                    stride: 8,
                },
            )
        },
    },
    Preset {
        name: "hybrid-equivalence",
        description: "pulse train interpolating kicks and continuous coupling on the four-level system",
        build: || {
            value(
                Kind::HybridEquivalence,
                HybridParams {
                    system: four_level(),
                    coupling: CouplingDoc::Ketterle,
                    tau0: 1.0,
                    t: 1.0,
                    k_list: vec![32.0, 64.0, 128.0],
                    tau_list: vec![1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0],
                },
            )
        },
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}
