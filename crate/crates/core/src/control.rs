//! Unitary routes to the Zeno subspaces: frequent kicks `U_kick`, strong
//! continuous coupling `K H_c`, and a pulse train interpolating between the
//! two. In the frame that removes the fast phases, both converge to
//! `exp(-i H_Z t)` with `H_Z = sum_n P_n H P_n`, `P_n` the spectral
//! projections of the kick or of `H_c`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Result, ZenoError};
use crate::linops::{hermitian_eig, norm, propagator, Operator, SpectralDecomposition, Symmetry};
use crate::math::{atan2, PI};
use crate::subspaces::{global_zeno_hamiltonian, offdiagonal_block_norm, ZenoPartition};

/// Default clustering tolerance for eigenphases and coupling eigenvalues.
pub const DEFAULT_GROUPING_TOL: f64 = 1e-8;
/// Accepted mismatch when a spectral form is resummed.
pub const RECONSTRUCTION_TOL: f64 = 1e-9;
/// Pulse areas whose phase differences come this close to `2 pi k` are
/// rejected as resonant.
pub const RESONANCE_TOL: f64 = 1e-6;

// Mixing coefficients for the Hermitian combination used to diagonalize a
// unitary. A coincidence of `cos x + c sin x` across distinct phases forces a
// retry with the next value.
const MIXING: [f64; 4] = [
    0.618_033_988_749_894_8,
    1.324_717_957_244_746,
    -0.414_213_562_373_095,
    core::f64::consts::E,
];

fn wrap_phase(x: f64) -> f64 {
    let mut y = x % (2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    } else if y <= -PI {
        y += 2.0 * PI;
    }
    y
}

/// `exp(i s A)` for `A = sum_n a_n P_n`.
fn spectral_phase(values: &[f64], part: &ZenoPartition, s: f64) -> Operator {
    let mut out = Operator::zeros(part.dim());
    for (&a, p) in values.iter().zip(part.projectors()) {
        out = &out + &p.scale(Complex64::from_polar(1.0, s * a));
    }
    out.assume(Symmetry::Unitary)
}

fn check_reconstruction(target: &Operator, rebuilt: &Operator) -> Result<()> {
    let residual = target.max_abs_diff(rebuilt);
    if residual > RECONSTRUCTION_TOL {
        Err(ZenoError::SpectralDecompositionFailed { residual })
    } else {
        Ok(())
    }
}

/// A kick `U_kick = sum_n exp(-i lambda_n) P_n` with phases in `(-pi, pi]`.
#[derive(Debug, Clone)]
pub struct KickSpec {
    u_kick: Operator,
    phases: Vec<f64>,
    partition: ZenoPartition,
    grouping_tol: f64,
}

impl KickSpec {
    /// Diagonalizes `u_kick` and clusters its eigenphases.
    pub fn new(u_kick: &Operator, grouping_tol: f64) -> Result<Self> {
        let defect = u_kick.unitary_defect();
        if defect > crate::linops::INVARIANT_TOL {
            return Err(ZenoError::NonUnitaryInput { defect });
        }
        if !(0.0..PI).contains(&grouping_tol) {
            return Err(ZenoError::InvalidParameter {
                name: "grouping_tol",
                value: grouping_tol,
            });
        }
        let mut worst = f64::INFINITY;
        for c in MIXING {
            let (spec, mus) = match unitary_eig(u_kick, c) {
                Ok(found) => found,
                Err(ZenoError::SpectralDecompositionFailed { residual }) => {
                    worst = worst.min(residual);
                    continue;
                }
                Err(e) => return Err(e),
            };
            let phases: Vec<f64> = mus.iter().map(|mu| wrap_phase(-atan2(mu.im, mu.re))).collect();
            let groups = cluster_phases(&phases, grouping_tol);
            let group_phases = groups
                .iter()
                .map(|g| {
                    let mu: Complex64 = g.iter().map(|&k| mus[k]).sum();
                    wrap_phase(-atan2(mu.im, mu.re))
                })
                .collect();
            let partition = ZenoPartition::from_eigenbasis(&spec, &groups)?;
            return KickSpec::assemble(u_kick, group_phases, partition, grouping_tol);
        }
        Err(ZenoError::SpectralDecompositionFailed { residual: worst })
    }

    /// Explicit phases and projectors, validated against `u_kick`.
    pub fn from_groups(u_kick: &Operator, groups: Vec<(f64, Operator)>, grouping_tol: f64) -> Result<Self> {
        let (phases, projectors): (Vec<f64>, Vec<Operator>) =
            groups.into_iter().map(|(l, p)| (wrap_phase(l), p)).unzip();
        let partition = ZenoPartition::new(projectors)?;
        KickSpec::assemble(u_kick, phases, partition, grouping_tol)
    }

    fn assemble(u_kick: &Operator, phases: Vec<f64>, partition: ZenoPartition, grouping_tol: f64) -> Result<Self> {
        u_kick.check_dim(partition.dim())?;
        for (a, &la) in phases.iter().enumerate() {
            for &lb in &phases[a + 1..] {
                let gap = wrap_phase(la - lb).abs();
                if gap <= grouping_tol {
                    return Err(ZenoError::InvalidPartition {
                        reason: "kick eigenphases of distinct sectors coincide",
                        defect: gap,
                    });
                }
            }
        }
        let spec = KickSpec {
            u_kick: u_kick.clone().assume(Symmetry::Unitary),
            phases,
            partition,
            grouping_tol,
        };
        check_reconstruction(&spec.u_kick, &spec.frame(-1))?;
        Ok(spec)
    }

    pub fn u_kick(&self) -> &Operator {
        &self.u_kick
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn partition(&self) -> &ZenoPartition {
        &self.partition
    }

    pub fn grouping_tol(&self) -> f64 {
        self.grouping_tol
    }

    /// `(U_kick^+)^n = sum_n exp(i n lambda_n) P_n`, negative `n` allowed.
    pub fn frame(&self, n: i64) -> Operator {
        spectral_phase(&self.phases, &self.partition, n as f64)
    }
}

/// Eigenvectors of a unitary from a Hermitian combination, with
/// `mu_k = <v_k|U|v_k>`.
fn unitary_eig(u: &Operator, c: f64) -> Result<(SpectralDecomposition, Vec<Complex64>)> {
    let ud = u.adjoint();
    let re = (u + &ud).scale_real(0.5);
    let im = (u - &ud).scale(Complex64::new(0.0, -0.5));
    let x = (&re + &im.scale_real(c)).hermitian_part();
    let spec = hermitian_eig(&x)?;
    let mut mus = Vec::with_capacity(u.dim());
    let mut residual: f64 = 0.0;
    for k in 0..u.dim() {
        let v = spec.eigenvector(k);
        let uv = u.apply(v);
        let mu: Complex64 = v.iter().zip(&uv).map(|(a, b)| a.conj() * b).sum();
        let r: Vec<Complex64> = uv.iter().zip(v).map(|(a, b)| a - mu * b).collect();
        residual = residual.max(norm(&r));
        mus.push(mu);
    }
    if residual > RECONSTRUCTION_TOL {
        return Err(ZenoError::SpectralDecompositionFailed { residual });
    }
    Ok((spec, mus))
}

/// Clusters phases on the circle; neighbours at most `tol` apart share a
/// cluster, including across the `±pi` cut.
fn cluster_phases(phases: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..phases.len()).collect();
    order.sort_by(|&a, &b| phases[a].total_cmp(&phases[b]));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for k in order {
        match groups.last_mut() {
            Some(g) if phases[k] - last <= tol => g.push(k),
            _ => groups.push(alloc::vec![k]),
        }
        last = phases[k];
    }
    if groups.len() > 1 {
        let first = phases[groups[0][0]];
        if first + 2.0 * PI - last <= tol {
            let head = groups.remove(0);
            groups.last_mut().unwrap().extend(head);
        }
    }
    groups
}

/// A coupling `H_c = sum_n eta_n P_n`.
#[derive(Debug, Clone)]
pub struct CouplingSpec {
    h_c: Operator,
    eta: Vec<f64>,
    partition: ZenoPartition,
    grouping_tol: f64,
}

impl CouplingSpec {
    /// Diagonalizes `h_c` and clusters its eigenvalues.
    pub fn new(h_c: &Operator, grouping_tol: f64) -> Result<Self> {
        if !(grouping_tol >= 0.0) {
            return Err(ZenoError::InvalidParameter {
                name: "grouping_tol",
                value: grouping_tol,
            });
        }
        let (partition, eta) = ZenoPartition::from_hermitian(h_c, grouping_tol)?;
        CouplingSpec::assemble(h_c, eta, partition, grouping_tol)
    }

    /// Explicit eigenvalues and projectors, validated against `h_c`.
    pub fn from_groups(h_c: &Operator, groups: Vec<(f64, Operator)>, grouping_tol: f64) -> Result<Self> {
        let defect = h_c.hermitian_defect();
        if defect > crate::linops::INVARIANT_TOL {
            return Err(ZenoError::NonHermitianInput { defect });
        }
        let (eta, projectors): (Vec<f64>, Vec<Operator>) = groups.into_iter().unzip();
        CouplingSpec::assemble(h_c, eta, ZenoPartition::new(projectors)?, grouping_tol)
    }

    fn assemble(h_c: &Operator, eta: Vec<f64>, partition: ZenoPartition, grouping_tol: f64) -> Result<Self> {
        h_c.check_dim(partition.dim())?;
        let mut rebuilt = Operator::zeros(partition.dim());
        for (&e, p) in eta.iter().zip(partition.projectors()) {
            rebuilt = &rebuilt + &p.scale_real(e);
        }
        check_reconstruction(h_c, &rebuilt)?;
        Ok(CouplingSpec {
            h_c: h_c.hermitian_part(),
            eta,
            partition,
            grouping_tol,
        })
    }

    pub fn h_c(&self) -> &Operator {
        &self.h_c
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eta
    }

    pub fn partition(&self) -> &ZenoPartition {
        &self.partition
    }

    pub fn grouping_tol(&self) -> f64 {
        self.grouping_tol
    }

    /// `exp(i s H_c)`.
    pub fn frame(&self, s: f64) -> Operator {
        spectral_phase(&self.eta, &self.partition, s)
    }

    /// The kick `exp(-i tau0 H_c)` delivered by one pulse of area `tau0`.
    pub fn pulse_kick(&self, tau0: f64) -> Result<KickSpec> {
        let groups = self
            .eta
            .iter()
            .zip(self.partition.projectors())
            .map(|(&e, p)| (tau0 * e, p.clone()))
            .collect();
        KickSpec::from_groups(&self.frame(-tau0), groups, self.grouping_tol)
    }
}

/// Rejects pulse areas `tau0` for which some phase difference
/// `tau0 (eta_n - eta_m)` lies within [`RESONANCE_TOL`] of a multiple of
/// `2 pi`. Such pulses leave distinct sectors with equal kick phases.
pub fn check_pulse_area(coupling: &CouplingSpec, tau0: f64) -> Result<()> {
    let eta = coupling.eigenvalues();
    for (a, &ea) in eta.iter().enumerate() {
        for &eb in &eta[a + 1..] {
            let phase = tau0 * (ea - eb);
            let off = phase - 2.0 * PI * libm::round(phase / (2.0 * PI));
            if off.abs() <= RESONANCE_TOL {
                return Err(ZenoError::ResonantPulseArea { tau0, phase });
            }
        }
    }
    Ok(())
}

/// Shape `g` of a single pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PulseShape {
    /// Indicator of `[-1/2, 1/2)`.
    #[default]
    Rectangular,
}

impl PulseShape {
    pub fn g(&self, x: f64) -> f64 {
        match self {
            PulseShape::Rectangular => {
                if (-0.5..0.5).contains(&x) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// `max_x |sum_n g(x - n) - 1|` over the samples.
    pub fn partition_of_unity_defect(&self, samples: &[f64]) -> f64 {
        samples
            .iter()
            .map(|&x| {
                let base = libm::floor(x) as i64;
                let sum: f64 = (base - 2..=base + 2).map(|n| self.g(x - n as f64)).sum();
                (sum - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Pulses of strength `K` and duration `tau0 / K` separated by idle
/// intervals `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseTrain {
    tau: f64,
    tau0: f64,
    k: f64,
    shape: PulseShape,
}

impl PulseTrain {
    pub fn new(tau: f64, tau0: f64, k: f64) -> Result<Self> {
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(ZenoError::InvalidParameter {
                name: "tau",
                value: tau,
            });
        }
        if !(tau0 > 0.0 && tau0.is_finite()) {
            return Err(ZenoError::InvalidParameter {
                name: "tau0",
                value: tau0,
            });
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(ZenoError::InvalidParameter { name: "K", value: k });
        }
        Ok(PulseTrain {
            tau,
            tau0,
            k,
            shape: PulseShape::Rectangular,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn tau0(&self) -> f64 {
        self.tau0
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn shape(&self) -> PulseShape {
        self.shape
    }

    pub fn pulse_duration(&self) -> f64 {
        self.tau0 / self.k
    }

    /// `tau + tau0 / K`.
    pub fn period(&self) -> f64 {
        self.tau + self.pulse_duration()
    }

    /// Number of whole periods in `t`.
    pub fn periods_in(&self, t: f64) -> Result<u64> {
        let period = self.period();
        let m = libm::round(t / period);
        if !(m >= 0.0) || (t - m * period).abs() > 1e-9 * t.abs().max(1.0) {
            return Err(ZenoError::NonCommensurateTime { t, period });
        }
        Ok(m as u64)
    }
}

fn check_pair(h: &Operator, dim: usize) -> Result<()> {
    h.check_dim(dim)?;
    let defect = h.hermitian_defect();
    if defect > crate::linops::INVARIANT_TOL {
        return Err(ZenoError::NonHermitianInput { defect });
    }
    Ok(())
}

fn positive_count(n: u64) -> Result<usize> {
    if n == 0 {
        Err(ZenoError::InvalidParameter { name: "N", value: 0.0 })
    } else {
        Ok(n as usize)
    }
}

/// `[U_kick U(t/N)]^N`.
pub fn kicked_evolution(h: &Operator, kick: &KickSpec, n: u64, t: f64) -> Result<Operator> {
    check_pair(h, kick.partition().dim())?;
    let n = positive_count(n)?;
    let step = kick.u_kick() * &propagator(h, t / n as f64)?;
    Ok(step.pow(n).assume(Symmetry::Unitary))
}

/// `(U_kick^+)^N [U_kick U(t/N)]^N`.
pub fn kick_frame_limit(h: &Operator, kick: &KickSpec, n: u64, t: f64) -> Result<Operator> {
    let evolved = kicked_evolution(h, kick, n, t)?;
    Ok((&kick.frame(n as i64) * &evolved).assume(Symmetry::Unitary))
}

/// `sum_n P_n H P_n` over the kick's eigenphase sectors.
pub fn kick_zeno_hamiltonian(h: &Operator, kick: &KickSpec) -> Result<Operator> {
    global_zeno_hamiltonian(h, kick.partition())
}

/// `exp(-i (H + K H_c) t)`.
pub fn continuous_evolution(h: &Operator, coupling: &CouplingSpec, k: f64, t: f64) -> Result<Operator> {
    check_pair(h, coupling.partition().dim())?;
    let total = (h + &coupling.h_c().scale_real(k)).hermitian_part();
    propagator(&total, t)
}

/// `exp(i K H_c t) exp(-i (H + K H_c) t)`.
pub fn coupling_frame_limit(h: &Operator, coupling: &CouplingSpec, k: f64, t: f64) -> Result<Operator> {
    let evolved = continuous_evolution(h, coupling, k, t)?;
    Ok((&coupling.frame(k * t) * &evolved).assume(Symmetry::Unitary))
}

/// `X -> sum_n P_n X P_n`, the projection onto the commutant of the
/// partition.
pub fn centralizer_project(x: &Operator, part: &ZenoPartition) -> Result<Operator> {
    x.check_dim(part.dim())?;
    let out = part.block_diagonal(x);
    Ok(if x.symmetry() == Symmetry::General {
        out
    } else {
        out.hermitian_part()
    })
}

/// Alternates idle evolution `exp(-i H tau)` with a pulse
/// `exp(-i (H + K H_c) tau0 / K)`, one of each per period, over the whole
/// number of periods in `t`.
pub fn hybrid_evolution(h: &Operator, coupling: &CouplingSpec, pulses: &PulseTrain, t: f64) -> Result<Operator> {
    check_pair(h, coupling.partition().dim())?;
    let m = pulses.periods_in(t)?;
    let pulse = continuous_evolution(h, coupling, pulses.k(), pulses.pulse_duration())?;
    let period = if pulses.tau() == 0.0 {
        pulse
    } else {
        &pulse * &propagator(h, pulses.tau())?
    };
    Ok(period.pow(m as usize).assume(Symmetry::Unitary))
}

/// One `(K, tau)` entry of [`limit_interchange_report`].
///
/// `order_kt` is the continuous limit `tau -> 0` taken exactly at coupling
/// `K` (coupling frame); `order_tk` is the kick limit `K -> inf` taken
/// exactly at idle time `tau` (kick frame, `N = t / tau` kicks
/// `exp(-i tau0 H_c)`). The hybrid entries use the pulse train at `(K, tau)`
/// itself, over the whole number of periods nearest to `t`, in the frame
/// `exp(i m tau0 H_c)` after `m` pulses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterchangeRow {
    pub k: f64,
    pub tau: f64,
    pub offdiag_order_kt: f64,
    pub offdiag_order_tk: f64,
    pub defect_order_kt: f64,
    pub defect_order_tk: f64,
    pub offdiag_hybrid: f64,
    pub defect_vs_hz: f64,
    pub hybrid_periods: u64,
}

/// Shared data for evaluating interchange rows independently.
#[derive(Debug, Clone)]
pub struct InterchangeSetup {
    h: Operator,
    coupling: CouplingSpec,
    tau0: f64,
    t: f64,
    h_z: Operator,
}

impl InterchangeSetup {
    pub fn new(h: &Operator, coupling: &CouplingSpec, tau0: f64, t: f64) -> Result<Self> {
        check_pair(h, coupling.partition().dim())?;
        if !(tau0 > 0.0 && tau0.is_finite()) {
            return Err(ZenoError::InvalidParameter {
                name: "tau0",
                value: tau0,
            });
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(ZenoError::InvalidParameter { name: "t", value: t });
        }
        check_pulse_area(coupling, tau0)?;
        Ok(InterchangeSetup {
            h_z: global_zeno_hamiltonian(h, coupling.partition())?,
            h: h.hermitian_part(),
            coupling: coupling.clone(),
            tau0,
            t,
        })
    }

    pub fn zeno_hamiltonian(&self) -> &Operator {
        &self.h_z
    }

    fn defect(&self, u: &Operator, t: f64) -> Result<f64> {
        Ok((u - &propagator(&self.h_z, t)?).op_norm())
    }

    /// Off-diagonal norm and defect of the coupling frame at `K`.
    pub fn order_kt(&self, k: f64) -> Result<(f64, f64)> {
        let v = coupling_frame_limit(&self.h, &self.coupling, k, self.t)?;
        Ok((
            offdiagonal_block_norm(&v, self.coupling.partition())?,
            self.defect(&v, self.t)?,
        ))
    }

    /// Off-diagonal norm and defect of the kick frame at idle time `tau`.
    pub fn order_tk(&self, tau: f64) -> Result<(f64, f64)> {
        let n = libm::round(self.t / tau);
        if !(n >= 1.0) || (self.t - n * tau).abs() > 1e-9 * self.t {
            return Err(ZenoError::NonCommensurateTime { t: self.t, period: tau });
        }
        let kick = self.coupling.pulse_kick(self.tau0)?;
        let v = kick_frame_limit(&self.h, &kick, n as u64, self.t)?;
        Ok((
            offdiagonal_block_norm(&v, self.coupling.partition())?,
            self.defect(&v, self.t)?,
        ))
    }

    /// Off-diagonal norm, defect and period count of the framed pulse train.
    pub fn hybrid(&self, k: f64, tau: f64) -> Result<(f64, f64, u64)> {
        let train = PulseTrain::new(tau, self.tau0, k)?;
        let m = libm::round(self.t / train.period()).max(1.0);
        let span = m * train.period();
        let u = hybrid_evolution(&self.h, &self.coupling, &train, span)?;
        let v = &self.coupling.frame(m * self.tau0) * &u;
        Ok((
            offdiagonal_block_norm(&v, self.coupling.partition())?,
            self.defect(&v, span)?,
            m as u64,
        ))
    }

    pub fn row(&self, k: f64, tau: f64) -> Result<InterchangeRow> {
        let (offdiag_order_kt, defect_order_kt) = self.order_kt(k)?;
        let (offdiag_order_tk, defect_order_tk) = self.order_tk(tau)?;
        let (offdiag_hybrid, defect_vs_hz, hybrid_periods) = self.hybrid(k, tau)?;
        Ok(InterchangeRow {
            k,
            tau,
            offdiag_order_kt,
            offdiag_order_tk,
            defect_order_kt,
            defect_order_tk,
            offdiag_hybrid,
            defect_vs_hz,
            hybrid_periods,
        })
    }
}

/// Rows for every `(K, tau)` pair, `K` outer, in list order. Every `tau`
/// must divide `t` into a whole number of kicks.
pub fn limit_interchange_report(
    h: &Operator,
    coupling: &CouplingSpec,
    tau0: f64,
    t: f64,
    k_list: &[f64],
    tau_list: &[f64],
) -> Result<Vec<InterchangeRow>> {
    if k_list.is_empty() || tau_list.is_empty() {
        return Err(ZenoError::MalformedData("K and tau lists must be non-empty"));
    }
    let setup = InterchangeSetup::new(h, coupling, tau0, t)?;
    let kt: Vec<(f64, f64)> = k_list.iter().map(|&k| setup.order_kt(k)).collect::<Result<_>>()?;
    let tk: Vec<(f64, f64)> = tau_list.iter().map(|&tau| setup.order_tk(tau)).collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(k_list.len() * tau_list.len());
    for (&k, &(offdiag_order_kt, defect_order_kt)) in k_list.iter().zip(&kt) {
        for (&tau, &(offdiag_order_tk, defect_order_tk)) in tau_list.iter().zip(&tk) {
            let (offdiag_hybrid, defect_vs_hz, hybrid_periods) = setup.hybrid(k, tau)?;
            rows.push(InterchangeRow {
                k,
                tau,
                offdiag_order_kt,
                offdiag_order_tk,
                defect_order_kt,
                defect_order_tk,
                offdiag_hybrid,
                defect_vs_hz,
                hybrid_periods,
            });
        }
    }
    Ok(rows)
}
