//! Built-in model systems: the two-level Rabi flopper, the three- and
//! four-level ladders with their kick and coupling schemes, and a finite
//! Friedrichs chain with a quasi-exponential decay window.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Result, ZenoError};
use crate::linops::{Operator, StateVector, Symmetry};
use crate::math::{cos, sin, PI};
use crate::subspaces::ZenoPartition;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn symmetric_real(dim: usize, couplings: &[(usize, usize, f64)]) -> Operator {
    let mut h = Operator::zeros(dim);
    for &(i, j, v) in couplings {
        h[(i, j)] += Complex64::new(v, 0.0);
        h[(j, i)] += Complex64::new(v, 0.0);
    }
    h.assume(Symmetry::Hermitian)
}

/// `H = Omega sigma_1`.
pub fn rabi_hamiltonian(omega: f64) -> Operator {
    symmetric_real(2, &[(0, 1, omega)])
}

/// `|a><b| Omega_1 + |b><c| Omega_2 + h.c.` on `span{a, b, c}`.
pub fn three_level_hamiltonian(omega1: f64, omega2: f64) -> Operator {
    symmetric_real(3, &[(0, 1, omega1), (1, 2, omega2)])
}

/// `P_1 = |a><a| + |b><b|`, `P_2 = |c><c|`.
pub fn three_level_partition() -> ZenoPartition {
    ZenoPartition::new(alloc::vec![
        Operator::diagonal(&[1.0, 1.0, 0.0]),
        Operator::diagonal(&[0.0, 0.0, 1.0]),
    ])
    .expect("coordinate projectors form a partition")
}

/// The three-level ladder with an extra, uncoupled level `|M>`.
pub fn four_level_hamiltonian(omega1: f64, omega2: f64) -> Operator {
    symmetric_real(4, &[(0, 1, omega1), (1, 2, omega2)])
}

/// `H_c = |c><M| + |M><c|`.
pub fn ketterle_coupling() -> Operator {
    symmetric_real(4, &[(2, 3, 1.0)])
}

/// `U_kick = P_1 + exp(-i lambda H_c)`.
pub fn itano_kick(lambda: f64) -> Operator {
    let (c, s) = (cos(lambda), sin(lambda));
    let mut u = Operator::identity(4);
    u[(2, 2)] = Complex64::new(c, 0.0);
    u[(3, 3)] = Complex64::new(c, 0.0);
    u[(2, 3)] = -I * s;
    u[(3, 2)] = -I * s;
    u.assume(Symmetry::Unitary)
}

/// `(P_1, P_+, P_-)` with `P_± = (|c> ± |M>)(<c| ± <M|)/2`.
pub fn four_level_partition() -> ZenoPartition {
    let half = |sign: f64| {
        let mut p = Operator::zeros(4);
        p[(2, 2)] = Complex64::new(0.5, 0.0);
        p[(3, 3)] = Complex64::new(0.5, 0.0);
        p[(2, 3)] = Complex64::new(0.5 * sign, 0.0);
        p[(3, 2)] = Complex64::new(0.5 * sign, 0.0);
        p
    };
    ZenoPartition::new(alloc::vec![
        Operator::diagonal(&[1.0, 1.0, 0.0, 0.0]),
        half(1.0),
        half(-1.0)
    ])
    .expect("four-level sectors form a partition")
}

/// `Omega_1 (|a><b| + |b><a|)`, the Zeno Hamiltonian shared by the kick and
/// coupling schemes on the four-level system.
pub fn four_level_zeno_hamiltonian(omega1: f64) -> Operator {
    symmetric_real(4, &[(0, 1, omega1)])
}

/// Block matrix `diag(R(Omega_1 t), R(phi))` with
/// `R(x) = [[cos x, -i sin x], [-i sin x, cos x]]`.
pub fn two_block_rotation(omega1_t: f64, phi: f64) -> Operator {
    let mut u = Operator::zeros(4);
    for (offset, x) in [(0, omega1_t), (2, phi)] {
        u[(offset, offset)] = Complex64::new(cos(x), 0.0);
        u[(offset + 1, offset + 1)] = Complex64::new(cos(x), 0.0);
        u[(offset, offset + 1)] = -I * sin(x);
        u[(offset + 1, offset)] = -I * sin(x);
    }
    u.assume(Symmetry::Unitary)
}

/// Large-`N` form of the kicked four-level evolution, lower block rotating by
/// `N lambda`.
pub fn itano_reference(omega1: f64, lambda: f64, n: u32, t: f64) -> Operator {
    two_block_rotation(omega1 * t, n as f64 * lambda)
}

/// Large-`K` form of the continuously coupled four-level evolution, lower
/// block rotating by `K t`.
pub fn ketterle_reference(omega1: f64, k: f64, t: f64) -> Operator {
    two_block_rotation(omega1 * t, k * t)
}

/// A discrete level `|0>` at `omega0` coupled with strength `g` to `M`
/// equally spaced band levels filling `[-W/2, W/2]`.
///
/// Between the Zeno region and the recurrence time `2 pi / delta`
/// (`delta` the level spacing) the survival of `|0>` decays nearly
/// exponentially with the golden-rule rate `2 pi g^2 / delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FriedrichsChain {
    pub omega0: f64,
    pub coupling: f64,
    pub bandwidth: f64,
    pub levels: usize,
}

impl Default for FriedrichsChain {
    fn default() -> Self {
        FriedrichsChain {
            omega0: 0.0,
            coupling: 0.03,
            bandwidth: 4.0,
            levels: 40,
        }
    }
}

impl FriedrichsChain {
    pub fn validate(&self) -> Result<()> {
        if self.levels < 2 {
            return Err(ZenoError::InvalidParameter {
                name: "levels",
                value: self.levels as f64,
            });
        }
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return Err(ZenoError::InvalidParameter {
                name: "bandwidth",
                value: self.bandwidth,
            });
        }
        if !self.coupling.is_finite() {
            return Err(ZenoError::InvalidParameter {
                name: "coupling",
                value: self.coupling,
            });
        }
        if !self.omega0.is_finite() {
            return Err(ZenoError::InvalidParameter {
                name: "omega0",
                value: self.omega0,
            });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.levels + 1
    }

    pub fn level_spacing(&self) -> f64 {
        self.bandwidth / (self.levels - 1) as f64
    }

    pub fn band_energies(&self) -> Vec<f64> {
        let delta = self.level_spacing();
        (0..self.levels)
            .map(|k| -0.5 * self.bandwidth + k as f64 * delta)
            .collect()
    }

    /// Index 0 is the discrete level; indices `1..=M` the band.
    pub fn hamiltonian(&self) -> Result<Operator> {
        self.validate()?;
        let n = self.dim();
        let mut h = Operator::zeros(n);
        h[(0, 0)] = Complex64::new(self.omega0, 0.0);
        for (k, e) in self.band_energies().into_iter().enumerate() {
            h[(k + 1, k + 1)] = Complex64::new(e, 0.0);
            h[(0, k + 1)] = Complex64::new(self.coupling, 0.0);
            h[(k + 1, 0)] = Complex64::new(self.coupling, 0.0);
        }
        Ok(h.assume(Symmetry::Hermitian))
    }

    pub fn initial_state(&self) -> StateVector {
        StateVector::basis(self.dim(), 0)
    }

    /// `2 pi g^2 rho` with the band's density of states `rho = 1/delta`.
    pub fn golden_rule_rate(&self) -> f64 {
        2.0 * PI * self.coupling * self.coupling / self.level_spacing()
    }

    /// `2 pi / delta`, where the discrete band first rephases.
    pub fn recurrence_time(&self) -> f64 {
        2.0 * PI / self.level_spacing()
    }

    /// Interval inside which the decay is close to exponential: from a few
    /// inverse bandwidths up to half the recurrence time.
    pub fn exponential_window(&self) -> (f64, f64) {
        (20.0 / self.bandwidth, 0.5 * self.recurrence_time())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::propagator;

    #[test]
    fn four_level_partition_matches_coupling_spectrum() {
        let part = four_level_partition();
        let hc = ketterle_coupling();
        let p = part.projectors();
        let rebuilt = &p[1] - &p[2];
        assert_eq!(rebuilt.max_abs_diff(&hc), 0.0);
        let kick = itano_kick(0.9);
        let lambda_form = propagator(&hc, 0.9).unwrap();
        let direct = &p[0] + &lambda_form.sandwich(&(&p[1] + &p[2]));
        assert!(direct.max_abs_diff(&kick) < 1e-15);
    }

    #[test]
    fn references_are_unitary() {
        assert!(itano_reference(1.0, PI / 2.0, 400, 1.0).unitary_defect() < 1e-14);
        assert!(ketterle_reference(1.0, 200.0, 1.0).unitary_defect() < 1e-14);
    }

    #[test]
    fn block_rotation_is_exponential() {
        let mut gen = four_level_zeno_hamiltonian(0.8);
        gen[(2, 3)] = Complex64::new(1.7, 0.0);
        gen[(3, 2)] = Complex64::new(1.7, 0.0);
        let u = propagator(&gen.assume(Symmetry::Hermitian), 1.0).unwrap();
        assert!(u.max_abs_diff(&two_block_rotation(0.8, 1.7)) < 1e-14);
    }

    #[test]
    fn friedrichs_defaults() {
        let chain = FriedrichsChain::default();
        let h = chain.hamiltonian().unwrap();
        assert_eq!(h.dim(), 41);
        let band = chain.band_energies();
        assert_eq!(band[0], -2.0);
        assert!((band[39] - 2.0).abs() < 1e-14);
        let gamma = 2.0 * PI * 0.03 * 0.03 * 39.0 / 4.0;
        assert!((chain.golden_rule_rate() - gamma).abs() < 1e-15);
        assert!(FriedrichsChain { levels: 1, ..chain }.hamiltonian().is_err());
    }

    #[test]
    fn friedrichs_decay_follows_golden_rule_from_below() {
        use crate::survival::{estimate_asymptotic_rate, SurvivalModel};
        let chain = FriedrichsChain::default();
        let model = SurvivalModel::new(&chain.hamiltonian().unwrap(), &chain.initial_state()).unwrap();
        let (lo, hi) = chain.exponential_window();
        let times: Vec<f64> = (0..=200).map(|k| lo + (hi - lo) * k as f64 / 200.0).collect();
        let (gamma, z) = estimate_asymptotic_rate(&model.curve(&times).unwrap(), (lo, hi)).unwrap();
        assert!((gamma / chain.golden_rule_rate() - 1.0).abs() < 0.15);
        // Flat band: Re Sigma'(0) = 4 g^2 rho / W > 0, so the pole residue
        // exceeds one and gamma_eff approaches gamma from below.
        let rho = 1.0 / chain.level_spacing();
        let residue = 1.0 / (1.0 - 4.0 * chain.coupling * chain.coupling * rho / chain.bandwidth);
        assert!((z / (residue * residue) - 1.0).abs() < 1e-2);
        assert_eq!(model.transition_time(gamma, (0.01, hi)).unwrap(), None);
    }
}
