//! Scenario execution.
//!
//! A run first resolves and validates every input, then computes all tables
//! in memory and only then touches the output directory, so a failing
//! scenario leaves nothing behind. Sweeps fan out over rayon and are
//! collected in sweep-key order.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;
use zenolab_core::control::{
    centralizer_project, check_pulse_area, continuous_evolution, coupling_frame_limit, kick_zeno_hamiltonian,
    kicked_evolution, CouplingSpec, InterchangeSetup, KickSpec, DEFAULT_GROUPING_TOL,
};
use zenolab_core::linops::{norm, propagator};
use zenolab_core::models::{self, FriedrichsChain};
use zenolab_core::spatial::{dirichlet_mode, fidelity, Grid1D, SpatialSystem, TranslationDemo, Window};
use zenolab_core::subspaces::{
    evolve_with_measurements, offdiagonal_block_norm, purity, sector_probabilities, zeno_limit_channel,
    MeasurementChannel, ZenoPartition,
};
use zenolab_core::survival::{estimate_asymptotic_rate, SurvivalModel};
use zenolab_core::zeno_limit::ZenoProduct;
use zenolab_core::{DensityMatrix, Operator, StateVector, Symmetry, ZenoError};

use crate::format::Table;
use crate::scenario::*;

/// Numerical results allowed to exceed their exact bounds by this much.
pub const CHECK_TOL: f64 = 1e-9;
/// Sector weights conserved by the limit channel within this tolerance.
pub const CONSERVATION_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("validation failed [{invariant}]: {detail}")]
    Validation { invariant: String, detail: String },
    #[error("numerical invariant violated [{invariant}]: {detail}")]
    Invariant { invariant: String, detail: String },
    #[error("cannot write {}: {source}", path.display())]
    Output { path: PathBuf, source: std::io::Error },
}

impl RunError {
    pub fn validation(invariant: &str, detail: impl Into<String>) -> Self {
        RunError::Validation {
            invariant: invariant.into(),
            detail: detail.into(),
        }
    }

    pub fn invariant(invariant: &str, detail: impl Into<String>) -> Self {
        RunError::Invariant {
            invariant: invariant.into(),
            detail: detail.into(),
        }
    }

    /// 2 for bad input, 3 for a numerical invariant breach, 1 for IO.
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Validation { .. } => 2,
            RunError::Invariant { .. } => 3,
            RunError::Output { .. } => 1,
        }
    }

    pub fn invariant_name(&self) -> &str {
        match self {
            RunError::Validation { invariant, .. } | RunError::Invariant { invariant, .. } => invariant,
            RunError::Output { .. } => "WritableOutput",
        }
    }
}

impl From<ZenoError> for RunError {
    fn from(err: ZenoError) -> Self {
        let name = err.invariant();
        match err {
            ZenoError::VanishingSurvival { .. }
            | ZenoError::SpectralDecompositionFailed { .. }
            | ZenoError::NoConvergence => RunError::invariant(name, err.to_string()),
            _ => RunError::validation(name, err.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, RunError>;

/// Everything a scenario produces, held in memory until written.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub kind: Kind,
    pub tables: Vec<(String, Table)>,
    pub summary: String,
}

impl Outcome {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    /// Writes `<name>.csv` for each table and `summary.txt` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| RunError::Output { path, source }
        };
        fs::create_dir_all(dir).map_err(io(dir))?;
        for (name, table) in &self.tables {
            let path = dir.join(format!("{name}.csv"));
            fs::write(&path, table.to_csv()).map_err(io(&path))?;
        }
        let path = dir.join("summary.txt");
        fs::write(&path, &self.summary).map_err(io(&path))
    }
}

/// Computes a scenario without writing anything.
pub fn execute(scenario: &Scenario) -> Result<Outcome> {
    let mut out = Report::new(scenario.kind);
    match scenario.kind {
        Kind::Survival => survival(&scenario.params()?, &mut out)?,
        Kind::ZenoProduct => zeno_product(&scenario.params()?, &mut out)?,
        Kind::Subspaces => subspaces(&scenario.params()?, &mut out)?,
        Kind::Kicks => kicks(&scenario.params()?, &mut out)?,
        Kind::Continuous => continuous(&scenario.params()?, &mut out)?,
        Kind::HybridEquivalence => hybrid(&scenario.params()?, &mut out)?,
        Kind::Spatial => spatial(&scenario.params()?, &mut out)?,
        Kind::TranslationDemo => translation(&scenario.params()?, &mut out)?,
    }
    Ok(out.finish())
}

/// Computes a scenario and writes its artifacts to `out_dir`, or to the
/// scenario's own `output_path`.
pub fn run(scenario: &Scenario, out_dir: Option<&Path>) -> Result<(Outcome, PathBuf)> {
    let outcome = execute(scenario)?;
    let dir = out_dir
        .map(Path::to_path_buf)
        .unwrap_or_else(|| scenario.output_path.clone());
    outcome.write(&dir)?;
    Ok((outcome, dir))
}

/// Reads a config file and runs it.
pub fn run_file(path: &Path, out_dir: Option<&Path>) -> Result<(Outcome, PathBuf)> {
    let text = fs::read_to_string(path)
        .map_err(|e| RunError::validation("ReadableConfig", format!("{}: {e}", path.display())))?;
    run(&Scenario::from_json(&text)?, out_dir)
}

struct Report {
    kind: Kind,
    tables: Vec<(String, Table)>,
    lines: String,
}

impl Report {
    fn new(kind: Kind) -> Self {
        let mut lines = String::new();
        let name = serde_json::to_value(kind).expect("kind serializes");
        let _ = writeln!(lines, "scenario: {}", name.as_str().unwrap_or_default());
        Report {
            kind,
            tables: Vec::new(),
            lines,
        }
    }

    fn line(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.lines, "{key}: {value}");
    }

    fn table(&mut self, name: &str, table: Table) {
        self.tables.push((name.into(), table));
    }

    fn finish(self) -> Outcome {
        Outcome {
            kind: self.kind,
            tables: self.tables,
            summary: self.lines,
        }
    }
}

fn positive(name: &str, x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(RunError::validation(
            "InvalidParameter",
            format!("`{name}` must be positive and finite, got {x}"),
        ))
    }
}

fn nonempty<T>(name: &str, list: &[T]) -> Result<()> {
    if list.is_empty() {
        Err(RunError::validation(
            "InvalidParameter",
            format!("`{name}` must not be empty"),
        ))
    } else {
        Ok(())
    }
}

fn ensure_within(invariant: &str, value: f64, tol: f64, what: &str) -> Result<()> {
    if value <= tol {
        Ok(())
    } else {
        Err(RunError::invariant(
            invariant,
            format!("{what} = {value:e} exceeds {tol:e}"),
        ))
    }
}

fn linspace(lo: f64, hi: f64, samples: usize) -> Result<Vec<f64>> {
    if samples < 2 {
        return Err(RunError::validation(
            "InvalidParameter",
            "at least 2 samples are required",
        ));
    }
    let step = (hi - lo) / (samples - 1) as f64;
    Ok((0..samples)
        .map(|k| if k + 1 == samples { hi } else { lo + step * k as f64 })
        .collect())
}

fn sorted<T: PartialOrd + Copy>(list: &[T]) -> Vec<T> {
    let mut v = list.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite sweep keys"));
    v
}

struct System {
    h: Operator,
    default_state: StateVector,
    default_partition: Option<ZenoPartition>,
    /// `(omega1, omega2)` of the built-in four-level ladder.
    four_level: Option<(f64, f64)>,
    friedrichs: Option<FriedrichsChain>,
}

fn finite(name: &str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(RunError::validation(
            "InvalidParameter",
            format!("`{name}` must be finite, got {x}"),
        ))
    }
}

fn build_system(spec: &SystemSpec) -> Result<System> {
    let plain = |h: Operator| System {
        default_state: StateVector::basis(h.dim(), 0),
        h,
        default_partition: None,
        four_level: None,
        friedrichs: None,
    };
    Ok(match *spec {
        SystemSpec::Rabi { omega } => plain(models::rabi_hamiltonian(finite("omega", omega)?)),
        SystemSpec::ThreeLevel { omega1, omega2 } => System {
            default_partition: Some(models::three_level_partition()),
            ..plain(models::three_level_hamiltonian(
                finite("omega1", omega1)?,
                finite("omega2", omega2)?,
            ))
        },
        SystemSpec::FourLevel { omega1, omega2 } => System {
            default_partition: Some(models::four_level_partition()),
            four_level: Some((finite("omega1", omega1)?, finite("omega2", omega2)?)),
            ..plain(models::four_level_hamiltonian(omega1, omega2))
        },
        SystemSpec::Friedrichs {
            omega0,
            coupling,
            bandwidth,
            levels,
        } => {
            let chain = FriedrichsChain {
                omega0,
                coupling,
                bandwidth,
                levels,
            };
            System {
                default_state: chain.initial_state(),
                friedrichs: Some(chain),
                ..plain(chain.hamiltonian()?)
            }
        }
        SystemSpec::Custom { ref hamiltonian } => plain(hamiltonian.to_operator(Symmetry::Hermitian)?),
    })
}

fn basis_state(dim: usize, k: usize) -> Result<StateVector> {
    if k < dim {
        Ok(StateVector::basis(dim, k))
    } else {
        Err(RunError::validation(
            "BasisIndex",
            format!("basis index {k} out of range for dimension {dim}"),
        ))
    }
}

fn resolve_state(spec: Option<&StateSpec>, sys: &System) -> Result<StateVector> {
    let psi = match spec {
        None => sys.default_state.clone(),
        Some(StateSpec::Basis { basis }) => basis_state(sys.h.dim(), *basis)?,
        Some(StateSpec::Vector(doc)) => doc.to_state()?,
    };
    check_dim(psi.dim(), sys.h.dim())?;
    Ok(psi)
}

fn resolve_density(spec: Option<&InitialSpec>, sys: &System) -> Result<DensityMatrix> {
    let rho = match spec {
        None => DensityMatrix::pure(&sys.default_state),
        Some(InitialSpec::Basis { basis }) => DensityMatrix::pure(&basis_state(sys.h.dim(), *basis)?),
        Some(InitialSpec::Density { density }) => density.to_density()?,
        Some(InitialSpec::Vector(doc)) => DensityMatrix::pure(&doc.to_state()?),
    };
    check_dim(rho.dim(), sys.h.dim())?;
    Ok(rho)
}

fn check_dim(found: usize, expected: usize) -> Result<()> {
    if found == expected {
        Ok(())
    } else {
        Err(ZenoError::DimensionMismatch { expected, found }.into())
    }
}

fn resolve_projector(spec: &ProjectorSpec, dim: usize) -> Result<Operator> {
    match spec {
        ProjectorSpec::Basis { basis } => {
            let mut diag = vec![0.0; dim];
            for &k in basis {
                if k >= dim || diag[k] != 0.0 {
                    return Err(RunError::validation(
                        "BasisIndex",
                        format!("projector basis {basis:?} must list distinct indices below {dim}"),
                    ));
                }
                diag[k] = 1.0;
            }
            Ok(Operator::diagonal(&diag).with_symmetry(Symmetry::Projector)?)
        }
        ProjectorSpec::Matrix(doc) => {
            let p = doc.to_operator(Symmetry::Projector)?;
            check_dim(p.dim(), dim)?;
            Ok(p)
        }
    }
}

fn survival(p: &SurvivalParams, out: &mut Report) -> Result<()> {
    let sys = build_system(&p.system)?;
    let psi = resolve_state(p.state.as_ref(), &sys)?;
    let t = positive("t", p.t)?;
    if p.n == 0 {
        return Err(ZenoError::InvalidParameter { name: "n", value: 0.0 }.into());
    }
    let t_max = positive("t_max", p.t_max.unwrap_or(t))?;
    let [tau_lo, tau_hi] = p.tau_range.unwrap_or([t_max / p.tau_samples.max(1) as f64, t_max]);
    positive("tau_range[0]", tau_lo)?;
    if !(tau_hi > tau_lo && tau_hi.is_finite()) {
        return Err(ZenoError::InvalidBracket { lo: tau_lo, hi: tau_hi }.into());
    }
    if p.bracket.is_some() && p.gamma.is_none() && p.fit_window.is_none() {
        return Err(RunError::validation(
            "MissingKey",
            "`bracket` needs `gamma` or `fit_window`",
        ));
    }
    if let Some(g) = p.gamma {
        positive("gamma", g)?;
    }
    let times = linspace(0.0, t_max, p.samples)?;
    let taus = linspace(tau_lo, tau_hi, p.tau_samples)?;

    let model = SurvivalModel::new(&sys.h, &psi)?;
    let curve = model.curve(&times)?;
    let worst = curve
        .probabilities()
        .iter()
        .map(|&q| (q - 1.0).max(-q))
        .fold(0.0, f64::max);
    ensure_within("ProbabilityRange", worst, CHECK_TOL, "excursion of p(t) outside [0, 1]")?;

    let tau = t / p.n as f64;
    let p_tau = model.probability(tau);
    let mut free = Table::new(["t", "p"]);
    let mut measured = Table::new(["t", "p"]);
    for (&s, &q) in times.iter().zip(curve.probabilities()) {
        free.push(vec![s, q]);
        // Measurements at tau, 2 tau, ... continue past t.
        let k = ((s / tau) * (1.0 + 1e-12)).floor();
        measured.push(vec![s, p_tau.powf(k) * model.probability(s - k * tau)]);
    }

    let fit = p
        .fit_window
        .map(|[lo, hi]| estimate_asymptotic_rate(&curve, (lo, hi)))
        .transpose()?;
    let gamma_ref = p.gamma.or(fit.map(|(g, _)| g));
    let profile = model.decay_rate_profile(&taus, gamma_ref)?;
    let mut rates = Table::new(["tau", "gamma_eff"]);
    for (&s, &g) in profile.taus.iter().zip(&profile.gamma_eff) {
        rates.push(vec![s, g]);
    }

    out.line("dimension", sys.h.dim());
    out.line("mean energy", format!("{:.10}", model.mean_energy()));
    out.line("energy variance", format!("{:.10}", model.energy_variance()));
    out.line("Zeno time", format!("{:.10}", model.zeno_time()));
    out.line("p(t)", format!("{:.10}", model.probability(t)));
    out.line(
        &format!("p after N = {} measurements in t = {t}", p.n),
        format!("{:.10}", model.after_measurements(p.n, t)?),
    );
    out.line(
        "gamma_eff(t/N)",
        format!("{:.10}", model.effective_decay_rate_or_inf(tau)),
    );
    if let Some(chain) = sys.friedrichs {
        out.line("golden-rule rate", format!("{:.10}", chain.golden_rule_rate()));
        let (lo, hi) = chain.exponential_window();
        out.line("exponential window", format!("[{lo:.6}, {hi:.6}]"));
    }
    if let Some((g, z)) = fit {
        out.line("fitted asymptotic rate", format!("{g:.10}"));
        out.line("fitted intercept Z", format!("{z:.10}"));
    }
    if let (Some([lo, hi]), Some(g)) = (p.bracket, gamma_ref) {
        match model.transition_time(g, (lo, hi))? {
            Some(ts) => out.line("transition time", format!("{ts:.10}")),
            None => out.line(
                "transition time",
                format!("none in [{lo}, {hi}]: gamma_eff - gamma keeps its sign"),
            ),
        }
    }
    out.table("survival", free);
    out.table("measured", measured);
    out.table("decay_rate", rates);
    Ok(())
}

fn zeno_product(p: &ZenoProductParams, out: &mut Report) -> Result<()> {
    let sys = build_system(&p.system)?;
    let proj = resolve_projector(&p.projector, sys.h.dim())?;
    let t = positive("t", p.t)?;
    nonempty("n_list", &p.n_list)?;
    if p.n_list.contains(&0) {
        return Err(ZenoError::InvalidParameter { name: "N", value: 0.0 }.into());
    }
    let zp = ZenoProduct::new(&sys.h, &proj)?;
    let isometry = (&zp.zeno_unitary(t).adjoint() * &zp.zeno_unitary(t)).max_abs_diff(&proj);
    ensure_within("ZenoUnitarity", isometry, CHECK_TOL, "|U_Z^+ U_Z - P|")?;

    let results = sorted(&p.n_list)
        .par_iter()
        .map(|&n| zp.result(n, t))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let mut table = Table::new(["N", "defect_max", "defect_opnorm", "survival"]);
    for r in &results {
        ensure_within("Contraction", r.survival - 1.0, CHECK_TOL, "excess survival")?;
        table.push(vec![r.n as f64, r.defect, r.defect_opnorm, r.survival]);
    }
    out.line("dimension", sys.h.dim());
    out.line("rank of P", format!("{:.0}", proj.trace().re));
    out.line(
        "semigroup defect of P U P at (t/2, t/2)",
        format!("{:.3e}", zp.semigroup_defect(t / 2.0, t / 2.0)),
    );
    if let [.., a, b] = results.as_slice() {
        out.line(
            &format!("defect ratio N = {} -> {}", a.n, b.n),
            format!("{:.6}", b.defect_opnorm / a.defect_opnorm),
        );
    }
    out.table("convergence", table);
    Ok(())
}

fn subspaces(p: &SubspacesParams, out: &mut Report) -> Result<()> {
    let sys = build_system(&p.system)?;
    let dim = sys.h.dim();
    let part = match (&p.partition, &sys.default_partition) {
        (Some(specs), _) => {
            let ops = specs
                .iter()
                .map(|s| resolve_projector(s, dim))
                .collect::<Result<Vec<_>>>()?;
            ZenoPartition::new(ops)?
        }
        (None, Some(part)) => part.clone(),
        (None, None) => {
            return Err(RunError::validation(
                "MissingKey",
                "`partition` is required for this model",
            ))
        }
    };
    let rho0 = resolve_density(p.rho0.as_ref(), &sys)?;
    let t = positive("t", p.t)?;
    if p.n == 0 || p.stride == 0 {
        return Err(RunError::validation(
            "InvalidParameter",
            "`n` and `stride` must be positive",
        ));
    }
    if p.n_sweep.contains(&0) {
        return Err(ZenoError::InvalidParameter { name: "N", value: 0.0 }.into());
    }
    let p0 = sector_probabilities(&rho0, &part)?;
    let coherence = offdiagonal_block_norm(rho0.op(), &part)?;

    let header: Vec<String> = std::iter::once("t".to_string())
        .chain((1..=part.len()).map(|k| format!("p_{k}")))
        .chain(std::iter::once("purity".to_string()))
        .collect();
    let row = |time: f64, rho: &DensityMatrix| -> Result<Vec<f64>> {
        ensure_within(
            "TracePreservation",
            (rho.trace() - 1.0).abs(),
            CHECK_TOL,
            "|Tr rho - 1|",
        )?;
        ensure_within(
            "Positivity",
            -rho.op().min_eigenvalue(),
            CHECK_TOL,
            "-min eigenvalue of rho",
        )?;
        let mut r = vec![time];
        r.extend(sector_probabilities(rho, &part)?);
        r.push(purity(rho));
        Ok(r)
    };

    let tau = t / p.n as f64;
    let channel = MeasurementChannel::new(&sys.h, &part, tau)?;
    let mut steps: Vec<u32> = (0..=p.n).step_by(p.stride).collect();
    if steps.last() != Some(&p.n) {
        steps.push(p.n);
    }
    let mut series = Table::new(header.clone());
    let mut rho = rho0.clone();
    let mut done = 0;
    for &k in &steps {
        while done < k {
            rho = channel.apply(&rho);
            done += 1;
        }
        series.push(row(if k == p.n { t } else { k as f64 * tau }, &rho)?);
    }
    let first_projection = purity(&channel.apply(&rho0));

    let limit_rows = steps
        .par_iter()
        .map(|&k| {
            let time = if k == p.n { t } else { k as f64 * tau };
            let rho = zeno_limit_channel(&rho0, &sys.h, &part, time)?;
            let moved = sector_probabilities(&rho, &part)?
                .iter()
                .zip(&p0)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            ensure_within(
                "SectorConservation",
                moved,
                CONSERVATION_TOL,
                "sector weight moved by the limit channel",
            )?;
            row(time, &rho)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut limit = Table::new(header);
    limit_rows.into_iter().for_each(|r| limit.push(r));

    let final_probs = &series.rows().last().expect("at least one row")[1..=part.len()];
    let leakage_now = final_probs
        .iter()
        .zip(&p0)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    out.line("dimension", dim);
    out.line("sector ranks", format!("{:?}", part.ranks()));
    out.line("initial sector probabilities", format!("{p0:.10?}"));
    out.line(
        &format!("max leakage at t with N = {}", p.n),
        format!("{leakage_now:.6e}"),
    );
    if coherence > 1e-12 {
        out.line(
            "notice",
            format!(
                "rho0 has cross-sector coherence {coherence:.3e}; the first projection lowers the purity from {:.10} to {first_projection:.10}",
                purity(&rho0)
            ),
        );
    }
    if !p.n_sweep.is_empty() {
        let leaks = sorted(&p.n_sweep)
            .par_iter()
            .map(|&n| {
                let rho = evolve_with_measurements(&rho0, &sys.h, &part, n, t)?;
                let leak = sector_probabilities(&rho, &part)?
                    .iter()
                    .zip(&p0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                Ok(vec![n as f64, leak])
            })
            .collect::<Result<Vec<_>>>()?;
        let ratios: Vec<String> = leaks.windows(2).map(|w| format!("{:.4}", w[1][1] / w[0][1])).collect();
        out.line("leakage ratios per sweep step", ratios.join(", "));
        let mut table = Table::new(["N", "leakage"]);
        leaks.into_iter().for_each(|r| table.push(r));
        out.table("leakage", table);
    }
    out.table("sectors", series);
    out.table("limit", limit);
    Ok(())
}

fn matrix_table(op: &Operator) -> Table {
    let mut table = Table::new(["row", "col", "re", "im"]);
    let n = op.dim();
    for (idx, z) in op.data().iter().enumerate() {
        table.push(vec![(idx / n) as f64, (idx % n) as f64, z.re, z.im]);
    }
    table
}

fn survival_of(u: &Operator, psi: &StateVector) -> f64 {
    u.expectation(psi.amplitudes(), psi.amplitudes()).norm_sqr()
}

/// Rows of a kick or coupling sweep, before the optional reference column.
struct ControlRow {
    key: f64,
    u: Operator,
    defect_max: f64,
    defect_opnorm: f64,
    survival: f64,
    reference: Option<f64>,
}

fn control_report(
    out: &mut Report,
    name: &str,
    key: &str,
    rows: Vec<ControlRow>,
    hz: &Operator,
    reference_tol: Option<f64>,
) -> Result<()> {
    let has_reference = rows.iter().all(|r| r.reference.is_some());
    if reference_tol.is_some() && !has_reference {
        return Err(RunError::validation(
            "ReferenceAvailable",
            "`reference_tol` needs the built-in four-level scheme",
        ));
    }
    let mut header = vec![key, "defect_max", "defect_opnorm", "survival"];
    if has_reference {
        header.push("reference_defect");
    }
    let mut table = Table::new(header);
    for r in &rows {
        ensure_within("Unitarity", r.u.unitary_defect(), CHECK_TOL, "|U^+ U - I|")?;
        let mut v = vec![r.key, r.defect_max, r.defect_opnorm, r.survival];
        v.extend(r.reference.filter(|_| has_reference));
        table.push(v);
    }
    let last = rows.last().expect("non-empty sweep");
    if let (Some(tol), Some(dev)) = (reference_tol, last.reference) {
        ensure_within(
            "ReferenceAgreement",
            dev,
            tol,
            "distance from the closed-form evolution",
        )?;
    }
    out.line(
        &format!("defect vs exp(-i H_Z t) at {key} = {}", last.key),
        format!("{:.6e}", last.defect_opnorm),
    );
    if let Some(dev) = last.reference {
        out.line(
            &format!("distance from closed form at {key} = {}", last.key),
            format!("{dev:.6e}"),
        );
    }
    out.table(name, table);
    out.table("evolution", matrix_table(&last.u));
    out.table("zeno_hamiltonian", matrix_table(hz));
    Ok(())
}

fn kicks(p: &KicksParams, out: &mut Report) -> Result<()> {
    let sys = build_system(&p.system)?;
    let psi = resolve_state(p.state.as_ref(), &sys)?;
    let t = positive("t", p.t)?;
    nonempty("n_list", &p.n_list)?;
    if p.n_list.contains(&0) || p.n_list.iter().any(|&n| n > u32::MAX as u64) {
        return Err(RunError::validation(
            "InvalidParameter",
            "every N must lie in 1..=2^32-1",
        ));
    }
    let (u_kick, lambda) = match &p.kick {
        KickDoc::Itano { lambda } => {
            check_dim(4, sys.h.dim())?;
            (models::itano_kick(finite("lambda", *lambda)?), Some(*lambda))
        }
        KickDoc::Custom { unitary } => (unitary.to_operator(Symmetry::Unitary)?, None),
    };
    check_dim(u_kick.dim(), sys.h.dim())?;
    let kick = KickSpec::new(&u_kick, DEFAULT_GROUPING_TOL)?;
    let hz = kick_zeno_hamiltonian(&sys.h, &kick)?;
    let uz = propagator(&hz, t)?;
    let omega1 = sys.four_level.map(|(w1, _)| w1);

    let rows = sorted(&p.n_list)
        .par_iter()
        .map(|&n| {
            let u = kicked_evolution(&sys.h, &kick, n, t)?;
            let diff = &(&kick.frame(n as i64) * &u) - &uz;
            let reference = match (omega1, lambda) {
                (Some(w1), Some(l)) => Some(u.max_abs_diff(&models::itano_reference(w1, l, n as u32, t))),
                _ => None,
            };
            Ok(ControlRow {
                key: n as f64,
                defect_max: diff.max_abs(),
                defect_opnorm: diff.op_norm(),
                survival: survival_of(&u, &psi),
                reference,
                u,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.line("dimension", sys.h.dim());
    out.line("kick eigenphases", format!("{:.10?}", kick.phases()));
    out.line("sector ranks", format!("{:?}", kick.partition().ranks()));
    control_report(out, "kicks", "N", rows, &hz, p.reference_tol)
}

fn continuous(p: &ContinuousParams, out: &mut Report) -> Result<()> {
    let sys = build_system(&p.system)?;
    let psi = resolve_state(p.state.as_ref(), &sys)?;
    let t = positive("t", p.t)?;
    nonempty("k_list", &p.k_list)?;
    for &k in &p.k_list {
        positive("K", k)?;
    }
    let (h_c, builtin) = resolve_coupling(&p.coupling, &sys)?;
    let coupling = CouplingSpec::new(&h_c, DEFAULT_GROUPING_TOL)?;
    let hz = centralizer_project(&sys.h, coupling.partition())?;
    let uz = propagator(&hz, t)?;
    let omega1 = sys.four_level.map(|(w1, _)| w1).filter(|_| builtin);

    let rows = sorted(&p.k_list)
        .par_iter()
        .map(|&k| {
            let u = continuous_evolution(&sys.h, &coupling, k, t)?;
            let diff = &coupling_frame_limit(&sys.h, &coupling, k, t)? - &uz;
            Ok(ControlRow {
                key: k,
                defect_max: diff.max_abs(),
                defect_opnorm: diff.op_norm(),
                survival: survival_of(&u, &psi),
                reference: omega1.map(|w1| u.max_abs_diff(&models::ketterle_reference(w1, k, t))),
                u,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.line("dimension", sys.h.dim());
    out.line("coupling eigenvalues", format!("{:.10?}", coupling.eigenvalues()));
    out.line("sector ranks", format!("{:?}", coupling.partition().ranks()));
    control_report(out, "continuous", "K", rows, &hz, p.reference_tol)
}

fn resolve_coupling(doc: &CouplingDoc, sys: &System) -> Result<(Operator, bool)> {
    let (h_c, builtin) = match doc {
        CouplingDoc::Ketterle => {
            check_dim(4, sys.h.dim())?;
            (models::ketterle_coupling(), true)
        }
        CouplingDoc::Custom { h_c } => (h_c.to_operator(Symmetry::Hermitian)?, false),
    };
    check_dim(h_c.dim(), sys.h.dim())?;
    Ok((h_c, builtin))
}

fn hybrid(p: &HybridParams, out: &mut Report) -> Result<()> {
    let sys = build_system(&p.system)?;
    let t = positive("t", p.t)?;
    let tau0 = positive("tau0", p.tau0)?;
    nonempty("k_list", &p.k_list)?;
    if p.k_list.len() != p.tau_list.len() {
        return Err(RunError::validation(
            "InvalidParameter",
            "`k_list` and `tau_list` must have equal length",
        ));
    }
    for (&k, &tau) in p.k_list.iter().zip(&p.tau_list) {
        positive("K", k)?;
        positive("tau", tau)?;
    }
    let (h_c, _) = resolve_coupling(&p.coupling, &sys)?;
    let coupling = CouplingSpec::new(&h_c, DEFAULT_GROUPING_TOL)?;
    check_pulse_area(&coupling, tau0)?;
    let setup = InterchangeSetup::new(&sys.h, &coupling, tau0, t)?;

    let mut pairs: Vec<(f64, f64)> = p.k_list.iter().copied().zip(p.tau_list.iter().copied()).collect();
    pairs.sort_by(|a, b| a.partial_cmp(b).expect("finite sweep keys"));
    let rows = pairs
        .par_iter()
        .map(|&(k, tau)| setup.row(k, tau))
        .collect::<std::result::Result<Vec<_>, _>>()?;

    let mut table = Table::new([
        "K",
        "tau",
        "offdiag_norm_order_KT",
        "offdiag_norm_order_TK",
        "defect_vs_HZ",
    ]);
    let mut detail = Table::new([
        "K",
        "tau",
        "defect_order_KT",
        "defect_order_TK",
        "offdiag_hybrid",
        "hybrid_periods",
    ]);
    for r in &rows {
        table.push(vec![r.k, r.tau, r.offdiag_order_kt, r.offdiag_order_tk, r.defect_vs_hz]);
        detail.push(vec![
            r.k,
            r.tau,
            r.defect_order_kt,
            r.defect_order_tk,
            r.offdiag_hybrid,
            r.hybrid_periods as f64,
        ]);
    }
    out.line("dimension", sys.h.dim());
    out.line("pulse area tau0", tau0);
    if let Some(r) = rows.last() {
        out.line(
            &format!("K = {}, tau = {}", r.k, r.tau),
            format!(
                "offdiag KT {:.3e}, TK {:.3e}, hybrid {:.3e}; defect vs H_Z {:.3e} over {} periods",
                r.offdiag_order_kt, r.offdiag_order_tk, r.offdiag_hybrid, r.defect_vs_hz, r.hybrid_periods
            ),
        );
    }
    out.table("interchange", table);
    out.table("interchange_detail", detail);
    Ok(())
}

fn build_grid(doc: &GridDoc) -> Result<Grid1D> {
    let potential = doc.potential.clone().unwrap_or_else(|| vec![0.0; doc.points]);
    Ok(Grid1D::new(doc.points, doc.length, doc.mass, potential)?)
}

fn build_window(doc: &WindowDoc, grid: &Grid1D) -> Result<Window> {
    Ok(match *doc {
        WindowDoc::Interval { a, b } => Window::from_interval(grid, a, b)?,
        WindowDoc::Indices { lo, hi } => {
            if hi > grid.n_points() {
                return Err(ZenoError::InvalidGrid("window extends past the grid").into());
            }
            Window::new(lo, hi)?
        }
    })
}

fn spatial(p: &SpatialParams, out: &mut Report) -> Result<()> {
    let grid = build_grid(&p.grid)?;
    let w = build_window(&p.window, &grid)?;
    let t = positive("t", p.t)?;
    let t_avg = positive("t_avg", p.t_avg.unwrap_or(t))?;
    nonempty("n_list", &p.n_list)?;
    if p.n_list.contains(&0) {
        return Err(ZenoError::InvalidParameter { name: "N", value: 0.0 }.into());
    }
    if p.quadrature_nodes < 2 {
        return Err(RunError::validation(
            "InvalidParameter",
            "`quadrature_nodes` must be at least 2",
        ));
    }
    let psi0 = dirichlet_mode(&grid, &w, p.mode)?;
    let sys = SpatialSystem::new(&grid)?;
    let reference = sys.dirichlet_evolve(&w, t, &psi0)?;

    let ns = sorted(&p.n_list);
    let results = ns
        .par_iter()
        .map(|&n| {
            let psi = sys.zeno_product(&w, n, t, &psi0)?;
            let tad = sys.time_averaged_defect(&w, n, t_avg, &psi0, p.quadrature_nodes)?;
            Ok((n, psi, tad))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut table = Table::new(["N", "fidelity", "survival", "time_avg_defect"]);
    for (n, psi, tad) in &results {
        let surv = norm(psi).powi(2);
        ensure_within(
            "NormGrowth",
            surv - 1.0,
            CHECK_TOL,
            "excess norm of the projected evolution",
        )?;
        table.push(vec![*n as f64, fidelity(&reference, psi), surv, *tad]);
    }
    let (n_last, psi_last, _) = results.last().expect("non-empty sweep");
    let mut wave = Table::new(["x", "re_psi", "im_psi", "abs2"]);
    for (j, z) in psi_last.iter().enumerate() {
        wave.push(vec![grid.position(j), z.re, z.im, z.norm_sqr()]);
    }
    out.line("grid points", grid.n_points());
    out.line("window indices", format!("[{}, {})", w.lo(), w.hi()));
    out.line("wall separation", format!("{:.10}", w.wall_separation(&grid)));
    out.line("initial Dirichlet mode", p.mode);
    out.line(
        &format!("fidelity at N = {n_last}"),
        format!("{:.10}", fidelity(&reference, psi_last)),
    );
    out.table("spatial", table);
    out.table("wavefunction", wave);
    Ok(())
}

fn translation(p: &TranslationParams, out: &mut Report) -> Result<()> {
    let grid = build_grid(&p.grid)?;
    let w = build_window(&p.window, &grid)?;
    if p.stride == 0 {
        return Err(RunError::validation("InvalidParameter", "`stride` must be positive"));
    }
    let demo = TranslationDemo::new(&grid, &w)?;
    let report = demo.report(finite("t", p.t)?, finite("s", p.s)?)?;
    if !report.n_independent {
        return Err(RunError::invariant(
            "NIndependence",
            format!(
                "projected translation depends on N: |V_N - V_1| = {:e}",
                report.n_dependence
            ),
        ));
    }
    let steps: Vec<usize> = (0..=w.len()).step_by(p.stride).collect();
    let curve = steps
        .par_iter()
        .map(|&j| {
            let time = j as f64 * grid.dx();
            Ok(vec![time, demo.survival(time)?])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(["t", "s", "semigroup_defect", "survival", "n_compared", "n_dependence"]);
    table.push(vec![
        report.t,
        report.s,
        report.semigroup_defect,
        report.survival,
        report.n_compared as f64,
        report.n_dependence,
    ]);
    let mut surv = Table::new(["t", "p"]);
    curve.into_iter().for_each(|r| surv.push(r));
    out.line("grid points", grid.n_points());
    out.line("window indices", format!("[{}, {})", w.lo(), w.hi()));
    out.line(
        "semigroup defect |V(t)V(s) - V(t+s)|",
        format!("{:.10}", report.semigroup_defect),
    );
    out.line(
        "survival of the uniform window state at t",
        format!("{:.10}", report.survival),
    );
    out.line(
        &format!("N-dependence over N = 1, {}", report.n_compared),
        format!("{:.3e}", report.n_dependence),
    );
    out.table("translation", table);
    out.table("survival", surv);
    Ok(())
}
