use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use zenolab::presets::{self, PRESETS};
use zenolab::scenario::{KickDoc, KicksParams, SurvivalParams, SystemSpec};
use zenolab::{execute, Kind, Scenario};
use zenolab_core::Complex64;

fn zenolab(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zenolab"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn header(csv: &str) -> &str {
    csv.lines().next().unwrap_or_default()
}

/// `(row, col, re, im)` rows back into a dense matrix.
fn read_matrix(path: &Path) -> (usize, Vec<Complex64>) {
    let text = fs::read_to_string(path).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    let n = (rows.len() as f64).sqrt() as usize;
    let mut m = vec![Complex64::new(0.0, 0.0); n * n];
    for r in rows {
        m[r[0] as usize * n + r[1] as usize] = Complex64::new(r[2], r[3]);
    }
    (n, m)
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Upper block rotating by `omega1 t`, lower block by `phi`, in the basis
/// `(a, b, c, M)`.
fn two_block(omega1_t: f64, phi: f64) -> Vec<Complex64> {
    let (c1, s1, c2, s2) = (omega1_t.cos(), omega1_t.sin(), phi.cos(), phi.sin());
    let z = Complex64::new(0.0, 0.0);
    let re = |x: f64| Complex64::new(x, 0.0);
    let im = |x: f64| Complex64::new(0.0, -x);
    vec![
        re(c1),
        im(s1),
        z,
        z, //
        im(s1),
        re(c1),
        z,
        z, //
        z,
        z,
        re(c2),
        im(s2), //
        z,
        z,
        im(s2),
        re(c2),
    ]
}

#[test]
fn list_has_exactly_the_eight_presets() {
    let dir = tempfile::tempdir().unwrap();
    let out = zenolab(&["list-presets"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = text.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(
        names,
        [
            "two-level-rabi",
            "three-level-projective",
            "itano-4level",
            "ketterle-4level",
            "friedrichs-ize",
            "dirichlet-box",
            "translation-semigroup",
            "hybrid-equivalence",
        ]
    );
    assert!(
        text.lines().all(|l| l.split_whitespace().count() > 2),
        "every preset has a description"
    );
}

#[test]
fn preset_configs_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for preset in &PRESETS {
        let scenario = preset.scenario();
        let path = dir.path().join(format!("{}.json", preset.name));
        fs::write(&path, scenario.to_json()).unwrap();
        let loaded = Scenario::from_json(&fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(loaded, scenario, "{}", preset.name);
        fs::write(&path, loaded.to_json()).unwrap();
        let reloaded = Scenario::from_json(&fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(reloaded.parameters, scenario.parameters, "{}", preset.name);
    }
}

#[test]
fn rabi_preset_defaults() {
    let scenario = presets::find("two-level-rabi").unwrap().scenario();
    assert_eq!(scenario.kind, Kind::Survival);
    let p: SurvivalParams = scenario.params().unwrap();
    assert_eq!(p.system, SystemSpec::Rabi { omega: 1.0 });
    assert_eq!((p.t, p.n), (1.0, 5));
    let outcome = execute(&scenario).unwrap();
    // p(t/N)^N = cos^10(1/5).
    assert!(outcome.summary.contains(&format!("{:.10}", (0.2f64).cos().powi(10))));
}

#[test]
fn every_preset_runs_with_documented_schemas() {
    let schemas: &[(&str, &[(&str, &str)])] = &[
        (
            "two-level-rabi",
            &[
                ("survival", "t,p"),
                ("measured", "t,p"),
                ("decay_rate", "tau,gamma_eff"),
            ],
        ),
        (
            "three-level-projective",
            &[
                ("sectors", "t,p_1,p_2,purity"),
                ("limit", "t,p_1,p_2,purity"),
                ("leakage", "N,leakage"),
            ],
        ),
        (
            "itano-4level",
            &[
                ("kicks", "N,defect_max,defect_opnorm,survival,reference_defect"),
                ("evolution", "row,col,re,im"),
            ],
        ),
        (
            "ketterle-4level",
            &[
                ("continuous", "K,defect_max,defect_opnorm,survival,reference_defect"),
                ("zeno_hamiltonian", "row,col,re,im"),
            ],
        ),
        (
            "friedrichs-ize",
            &[("survival", "t,p"), ("decay_rate", "tau,gamma_eff")],
        ),
        (
            "dirichlet-box",
            &[
                ("spatial", "N,fidelity,survival,time_avg_defect"),
                ("wavefunction", "x,re_psi,im_psi,abs2"),
            ],
        ),
        (
            "translation-semigroup",
            &[
                ("translation", "t,s,semigroup_defect,survival,n_compared,n_dependence"),
                ("survival", "t,p"),
            ],
        ),
        (
            "hybrid-equivalence",
            &[(
                "interchange",
                "K,tau,offdiag_norm_order_KT,offdiag_norm_order_TK,defect_vs_HZ",
            )],
        ),
    ];
    for (name, tables) in schemas {
        let outcome = execute(&presets::find(name).unwrap().scenario()).unwrap_or_else(|e| panic!("{name}: {e}"));
        for (table, want) in *tables {
            let t = outcome.table(table).unwrap_or_else(|| panic!("{name} lacks {table}"));
            assert_eq!(t.header().join(","), *want, "{name}/{table}");
            assert!(!t.rows().is_empty());
        }
    }
}

#[test]
fn itano_preset_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let out = zenolab(&["preset", "itano-4level", "--out", "itano"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    // N lambda = 200 pi: the kicked block returns to the identity.
    let (n, u) = read_matrix(&dir.path().join("itano/evolution.csv"));
    assert_eq!(n, 4);
    let dev = max_diff(&u, &two_block(1.0, 400.0 * PI / 2.0));
    assert!(dev <= 3e-2, "kicked evolution off by {dev}");
    let (_, hz) = read_matrix(&dir.path().join("itano/zeno_hamiltonian.csv"));
    let mut want = vec![Complex64::new(0.0, 0.0); 16];
    want[1] = Complex64::new(1.0, 0.0);
    want[4] = Complex64::new(1.0, 0.0);
    assert!(max_diff(&hz, &want) < 1e-12);
    let summary = fs::read_to_string(dir.path().join("itano/summary.txt")).unwrap();
    assert!(summary.starts_with("scenario: kicks\n"));
}

#[test]
fn ketterle_preset_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let out = zenolab(&["preset", "ketterle-4level", "--out", "ketterle"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let (_, u) = read_matrix(&dir.path().join("ketterle/evolution.csv"));
    let dev = max_diff(&u, &two_block(1.0, 200.0));
    assert!(dev <= 3e-2, "continuous evolution off by {dev}");
    let csv = fs::read_to_string(dir.path().join("ketterle/continuous.csv")).unwrap();
    let defects: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert!(
        defects.windows(2).all(|w| w[1] < w[0]),
        "defect shrinks with K: {defects:?}"
    );
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn malformed_configs_exit_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("syntax.json", "{\"kind\": \"survival\", ".to_string(), "ConfigSchema"),
        (
            "kind.json",
            r#"{"kind": "teleport", "parameters": {}, "output_path": "out"}"#.to_string(),
            "ConfigSchema",
        ),
        (
            "unknown_key.json",
            r#"{"kind": "survival", "parameters": {"system": {"model": "rabi", "omega": 1}, "t": 1, "n": 5, "colour": 3}, "output_path": "out"}"#
                .to_string(),
            "ConfigSchema",
        ),
        (
            "missing_key.json",
            r#"{"kind": "survival", "parameters": {"system": {"model": "rabi", "omega": 1}, "t": 1}, "output_path": "out"}"#
                .to_string(),
            "ConfigSchema",
        ),
        (
            "non_hermitian.json",
            r#"{"kind": "survival", "parameters": {"system": {"model": "custom", "hamiltonian": {"dim": 2, "re": [0, 1, 0, 0], "im": [0, 0, 0, 0]}}, "t": 1, "n": 5}, "output_path": "out"}"#
                .to_string(),
            "NonHermitianInput",
        ),
        (
            "unnormalized.json",
            r#"{"kind": "survival", "parameters": {"system": {"model": "rabi", "omega": 1}, "state": {"dim": 2, "re": [1, 1], "im": [0, 0]}, "t": 1, "n": 5}, "output_path": "out"}"#
                .to_string(),
            "NotNormalized",
        ),
        (
            "resonant.json",
            r#"{"kind": "hybrid-equivalence", "parameters": {"system": {"model": "four-level", "omega1": 1, "omega2": 1}, "coupling": {"type": "ketterle"}, "tau0": 6.283185307179586, "t": 1, "k_list": [32], "tau_list": [0.03125]}, "output_path": "out"}"#
                .to_string(),
            "ResonantPulseArea",
        ),
    ];
    for (file, body, invariant) in cases {
        let config = write_config(dir.path(), file, &body);
        let out = zenolab(&["run", &config], dir.path());
        assert_eq!(out.status.code(), Some(2), "{file}: {}", stderr(&out));
        assert!(
            stderr(&out).contains(&format!("[{invariant}]")),
            "{file}: {}",
            stderr(&out)
        );
        assert!(!dir.path().join("out").exists(), "{file} left output behind");
    }
    let out = zenolab(&["run", "missing.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = zenolab(&["preset", "no-such-preset"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invariant_breach_exits_3_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let params = KicksParams {
        system: SystemSpec::FourLevel {
            omega1: 1.0,
            omega2: 1.0,
        },
        kick: KickDoc::Itano { lambda: PI / 2.0 },
        t: 1.0,
        n_list: vec![10],
        state: None,
        reference_tol: Some(1e-12),
    };
    let scenario = Scenario::new(Kind::Kicks, &params, "out");
    let config = write_config(dir.path(), "strict.json", &scenario.to_json());
    let out = zenolab(&["run", &config], dir.path());
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("[ReferenceAgreement]"));
    assert!(!dir.path().join("out").exists());
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    for name in [
        "three-level-projective",
        "friedrichs-ize",
        "hybrid-equivalence",
        "itano-4level",
    ] {
        let config = write_config(
            dir.path(),
            &format!("{name}.json"),
            &presets::find(name).unwrap().scenario().to_json(),
        );
        let mut runs = Vec::new();
        for threads in ["1", "4"] {
            let target = format!("{name}-{threads}");
            let out = Command::new(env!("CARGO_BIN_EXE_zenolab"))
                .args(["run", &config, "--out", &target])
                .env("RAYON_NUM_THREADS", threads)
                .current_dir(dir.path())
                .output()
                .unwrap();
            assert!(out.status.success(), "{}", stderr(&out));
            runs.push(snapshot(&dir.path().join(target)));
        }
        assert!(runs[0].len() >= 3);
        assert_eq!(runs[0], runs[1], "{name}");
    }
}

#[test]
fn run_honours_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = Scenario {
        output_path: "results/rabi".into(),
        ..presets::find("two-level-rabi").unwrap().scenario()
    };
    let config = write_config(dir.path(), "rabi.json", &scenario.to_json());
    let out = zenolab(&["run", &config], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("results/rabi/survival.csv")).unwrap();
    assert_eq!(header(&csv), "t,p");
    let first: Vec<f64> = csv
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(first[0], 0.0);
    assert!((first[1] - 1.0).abs() < 1e-14);
}

#[test]
fn print_config_matches_preset() {
    let dir = tempfile::tempdir().unwrap();
    let out = zenolab(&["preset", "dirichlet-box", "--print-config"], dir.path());
    assert!(out.status.success());
    let printed = Scenario::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(printed, presets::find("dirichlet-box").unwrap().scenario());
}

#[test]
fn seeded_check_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = zenolab(&["check", "--seed", "42", "--cases", "20"], dir.path());
    let b = zenolab(&["check", "--seed", "42", "--cases", "20"], dir.path());
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8_lossy(&a.stdout).lines().count(), 7);
}
