//! Single-state Zeno analytics.
//!
//! For a state `psi` evolving under `H` the survival amplitude is
//! `A(t) = <psi|e^{-iHt}|psi>` and `p(t) = |A(t)|^2`. Measuring `N` times at
//! intervals `tau = t/N` gives `p(tau)^N = exp(-gamma_eff(tau) t)` with the
//! effective decay rate `gamma_eff(tau) = -ln p(tau) / tau`. A measurement
//! interval `tau*` with `gamma_eff(tau*) = gamma` separates Zeno
//! (`tau < tau*`) from inverse-Zeno behaviour.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Result, ZenoError};
use crate::linops::{complement, hermitian_eig, Operator, StateVector, Symmetry};
use crate::math::{exp, log, sqrt};

/// Variances at or below this value give an infinite Zeno time.
pub const VARIANCE_FLOOR: f64 = 1e-14;
/// Survival probabilities at or below this value are treated as zero.
pub const SURVIVAL_FLOOR: f64 = 1e-300;
/// Iteration cap for the transition-time bisection.
pub const BISECTION_MAX_ITER: usize = 200;
/// Relative residual accepted by the transition-time bisection.
pub const BISECTION_REL_TOL: f64 = 1e-8;

/// Sampled survival probability `p(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalCurve {
    times: Vec<f64>,
    probabilities: Vec<f64>,
    hamiltonian_dim: usize,
}

impl SurvivalCurve {
    pub fn new(times: Vec<f64>, probabilities: Vec<f64>, hamiltonian_dim: usize) -> Result<Self> {
        if times.len() != probabilities.len() {
            return Err(ZenoError::DimensionMismatch {
                expected: times.len(),
                found: probabilities.len(),
            });
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(ZenoError::MalformedData("survival times must be strictly increasing"));
        }
        if probabilities.iter().any(|&p| !(-1e-12..=1.0 + 1e-12).contains(&p)) {
            return Err(ZenoError::MalformedData("survival probabilities must lie in [0, 1]"));
        }
        Ok(SurvivalCurve {
            times,
            probabilities,
            hamiltonian_dim,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn hamiltonian_dim(&self) -> usize {
        self.hamiltonian_dim
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// `gamma_eff(tau)` sampled on a grid of measurement intervals.
///
/// Intervals where `p(tau)` vanishes are recorded as `f64::INFINITY`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayRateProfile {
    pub taus: Vec<f64>,
    pub gamma_eff: Vec<f64>,
    pub gamma_asymptotic: Option<f64>,
}

/// Survival analytics of one state under one Hamiltonian, sharing a single
/// spectral decomposition across all time values.
#[derive(Debug, Clone)]
pub struct SurvivalModel {
    energies: Vec<f64>,
    weights: Vec<f64>,
    mean_energy: f64,
    variance: f64,
    dim: usize,
}

impl SurvivalModel {
    pub fn new(h: &Operator, psi: &StateVector) -> Result<Self> {
        h.check_dim(psi.dim())?;
        let spec = hermitian_eig(h)?;
        let weights = spec
            .to_eigenbasis(psi.amplitudes())
            .iter()
            .map(|c| c.norm_sqr())
            .collect();

        let h_psi = h.apply(psi.amplitudes());
        let mean_energy = psi
            .amplitudes()
            .iter()
            .zip(&h_psi)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .re;
        let variance = h_psi
            .iter()
            .zip(psi.amplitudes())
            .map(|(hp, p)| (hp - p * mean_energy).norm_sqr())
            .sum();
        Ok(SurvivalModel {
            energies: spec.eigenvalues().to_vec(),
            weights,
            mean_energy,
            variance,
            dim: h.dim(),
        })
    }

    /// `<psi|e^{-iHt}|psi>`.
    pub fn amplitude(&self, t: f64) -> Complex64 {
        self.energies
            .iter()
            .zip(&self.weights)
            .map(|(&e, &w)| Complex64::cis(-e * t) * w)
            .sum()
    }

    pub fn probability(&self, t: f64) -> f64 {
        self.amplitude(t).norm_sqr()
    }

    /// `<psi|H|psi>`.
    pub fn mean_energy(&self) -> f64 {
        self.mean_energy
    }

    /// `<psi|H^2|psi> - <psi|H|psi>^2`.
    pub fn energy_variance(&self) -> f64 {
        self.variance
    }

    /// `1/sqrt(variance)`, infinite for (numerically) stationary states.
    pub fn zeno_time(&self) -> f64 {
        if self.variance <= VARIANCE_FLOOR {
            f64::INFINITY
        } else {
            1.0 / sqrt(self.variance)
        }
    }

    /// `p(t/N)^N`.
    pub fn after_measurements(&self, n: u32, t: f64) -> Result<f64> {
        if n == 0 {
            return Err(ZenoError::InvalidParameter { name: "N", value: 0.0 });
        }
        Ok(libm::pow(self.probability(t / n as f64), n as f64))
    }

    /// `-ln p(tau) / tau`.
    pub fn effective_decay_rate(&self, tau: f64) -> Result<f64> {
        if !(tau > 0.0) {
            return Err(ZenoError::InvalidParameter {
                name: "tau",
                value: tau,
            });
        }
        let p = self.probability(tau);
        if p <= SURVIVAL_FLOOR {
            return Err(ZenoError::VanishingSurvival { tau });
        }
        Ok(rate_from_probability(p, tau))
    }

    /// `gamma_eff` with `+inf` standing in for vanishing survival.
    pub fn effective_decay_rate_or_inf(&self, tau: f64) -> f64 {
        let p = self.probability(tau);
        if p <= SURVIVAL_FLOOR {
            f64::INFINITY
        } else {
            rate_from_probability(p, tau)
        }
    }

    pub fn curve(&self, times: &[f64]) -> Result<SurvivalCurve> {
        let probabilities = times.iter().map(|&t| self.probability(t).min(1.0)).collect();
        SurvivalCurve::new(times.to_vec(), probabilities, self.dim)
    }

    pub fn decay_rate_profile(&self, taus: &[f64], gamma_asymptotic: Option<f64>) -> Result<DecayRateProfile> {
        if taus.iter().any(|&t| !(t > 0.0)) || taus.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(ZenoError::MalformedData(
                "decay-rate taus must be positive and ascending",
            ));
        }
        Ok(DecayRateProfile {
            taus: taus.to_vec(),
            gamma_eff: taus.iter().map(|&t| self.effective_decay_rate_or_inf(t)).collect(),
            gamma_asymptotic,
        })
    }

    /// Transition time for this state, see [`find_transition_time_with`].
    pub fn transition_time(&self, gamma: f64, bracket: (f64, f64)) -> Result<Option<f64>> {
        find_transition_time_with(|tau| self.probability(tau), gamma, bracket)
    }
}

fn rate_from_probability(p: f64, tau: f64) -> f64 {
    // p = 1 gives -0.0 otherwise.
    -log(p) / tau + 0.0
}

/// `<psi|e^{-iHt}|psi>`.
pub fn survival_amplitude(h: &Operator, psi: &StateVector, t: f64) -> Result<Complex64> {
    Ok(SurvivalModel::new(h, psi)?.amplitude(t))
}

/// Zeno time `(<H^2> - <H>^2)^{-1/2}`; infinite when the variance is below
/// [`VARIANCE_FLOOR`].
pub fn zeno_time(h: &Operator, psi: &StateVector) -> Result<f64> {
    h.check_dim(psi.dim())?;
    let h_psi = h.apply(psi.amplitudes());
    let mean: Complex64 = psi.amplitudes().iter().zip(&h_psi).map(|(a, b)| a.conj() * b).sum();
    let variance: f64 = h_psi
        .iter()
        .zip(psi.amplitudes())
        .map(|(hp, p)| (hp - p * mean.re).norm_sqr())
        .sum();
    Ok(if variance <= VARIANCE_FLOOR {
        f64::INFINITY
    } else {
        1.0 / sqrt(variance)
    })
}

/// Free/interaction split with respect to `P`: `H0 = PHP + QHQ`,
/// `Hint = PHQ + QHP`, `Q = I - P`.
pub fn split_hamiltonian(h: &Operator, p: &Operator) -> Result<(Operator, Operator)> {
    h.check_dim(p.dim())?;
    let q = complement(p);
    let php = h.sandwich(p);
    let qhq = h.sandwich(&q);
    let phq = &(p * h) * &q;
    let qhp = &(&q * h) * p;
    let free = (&php + &qhq).hermitian_part();
    let interaction = (&phq + &qhp).hermitian_part();
    Ok((
        free.assume(Symmetry::Hermitian),
        interaction.assume(Symmetry::Hermitian),
    ))
}

/// `p(t/N)^N`: survival after `N` equally spaced measurements in `[0, t]`.
pub fn survival_after_measurements(h: &Operator, psi: &StateVector, n: u32, t: f64) -> Result<f64> {
    SurvivalModel::new(h, psi)?.after_measurements(n, t)
}

/// `-ln p(tau) / tau`.
pub fn effective_decay_rate(h: &Operator, psi: &StateVector, tau: f64) -> Result<f64> {
    SurvivalModel::new(h, psi)?.effective_decay_rate(tau)
}

/// Least-squares fit of `ln p(t) = ln Z - gamma t` on the samples with
/// `t_lo <= t <= t_hi`. Returns `(gamma, Z)`.
pub fn estimate_asymptotic_rate(curve: &SurvivalCurve, fit_window: (f64, f64)) -> Result<(f64, f64)> {
    let (lo, hi) = fit_window;
    let (first, last) = match (curve.times.first(), curve.times.last()) {
        (Some(&f), Some(&l)) => (f, l),
        _ => return Err(ZenoError::WindowTooNarrow { samples: 0 }),
    };
    if !(lo < hi) || lo < first || hi > last {
        return Err(ZenoError::InvalidBracket { lo, hi });
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &p) in curve.times.iter().zip(&curve.probabilities) {
        if t < lo || t > hi {
            continue;
        }
        if p <= 0.0 {
            return Err(ZenoError::VanishingSurvival { tau: t });
        }
        xs.push(t);
        ys.push(log(p));
    }
    if xs.len() < 8 {
        return Err(ZenoError::WindowTooNarrow { samples: xs.len() });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    Ok((-slope + 0.0, exp(intercept)))
}

/// Transition time `tau*` with `gamma_eff(tau*) = gamma` for the state `psi`.
pub fn find_transition_time(h: &Operator, psi: &StateVector, gamma: f64, bracket: (f64, f64)) -> Result<Option<f64>> {
    SurvivalModel::new(h, psi)?.transition_time(gamma, bracket)
}

/// Bisection for `-ln p(tau)/tau = gamma` on `bracket`, for any survival
/// function `p`.
///
/// Returns `Ok(None)` when `gamma_eff - gamma` does not change sign between
/// the bracket ends. Vanishing survival counts as `gamma_eff = +inf`.
/// The iteration stops once the residual is within
/// [`BISECTION_REL_TOL`]`* gamma` or after [`BISECTION_MAX_ITER`] halvings; in
/// the latter case (a jump of `gamma_eff` through `gamma`) the collapsed
/// bracket midpoint is returned.
pub fn find_transition_time_with(p: impl Fn(f64) -> f64, gamma: f64, bracket: (f64, f64)) -> Result<Option<f64>> {
    let (mut lo, mut hi) = bracket;
    if !(gamma > 0.0) {
        return Err(ZenoError::InvalidParameter {
            name: "gamma",
            value: gamma,
        });
    }
    if !(lo > 0.0) || !(hi > lo) || !hi.is_finite() {
        return Err(ZenoError::InvalidBracket { lo, hi });
    }
    let residual = |tau: f64| {
        let prob = p(tau);
        if prob <= SURVIVAL_FLOOR {
            f64::INFINITY
        } else {
            rate_from_probability(prob, tau) - gamma
        }
    };
    let tol = BISECTION_REL_TOL * gamma;
    let f_lo = residual(lo);
    let f_hi = residual(hi);
    if f_lo.abs() <= tol {
        return Ok(Some(lo));
    }
    if f_hi.abs() <= tol {
        return Ok(Some(hi));
    }
    if (f_lo > 0.0) == (f_hi > 0.0) {
        return Ok(None);
    }
    let lo_positive = f_lo > 0.0;
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..BISECTION_MAX_ITER {
        mid = 0.5 * (lo + hi);
        let f_mid = residual(mid);
        if f_mid.abs() <= tol {
            return Ok(Some(mid));
        }
        if (f_mid > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(mid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::cos;
    use crate::models;
    use alloc::vec;

    #[test]
    fn rabi_amplitude_is_cosine() {
        let h = models::rabi_hamiltonian(0.7);
        let plus = StateVector::basis(2, 0);
        for &t in &[0.0, 0.3, 1.0, 4.2] {
            let a = survival_amplitude(&h, &plus, t).unwrap();
            assert!((a - Complex64::new(cos(0.7 * t), 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn stationary_state_only_picks_up_a_phase() {
        let h = Operator::diagonal(&[0.8, -0.3, 2.0]);
        let psi = StateVector::basis(3, 0);
        let a = survival_amplitude(&h, &psi, 1.7).unwrap();
        assert!((a - Complex64::cis(-0.8 * 1.7)).norm() < 1e-14);
        assert_eq!(zeno_time(&h, &psi).unwrap(), f64::INFINITY);
    }

    #[test]
    fn zeno_times() {
        let h = models::rabi_hamiltonian(2.0);
        assert!((zeno_time(&h, &StateVector::basis(2, 0)).unwrap() - 0.5).abs() < 1e-15);
        let h3 = models::three_level_hamiltonian(1.5, 0.4);
        assert!((zeno_time(&h3, &StateVector::basis(3, 0)).unwrap() - 1.0 / 1.5).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let h = models::rabi_hamiltonian(1.0);
        let psi = StateVector::basis(3, 0);
        assert!(matches!(
            survival_amplitude(&h, &psi, 1.0),
            Err(ZenoError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn split_of_rabi_and_three_level() {
        let h = models::rabi_hamiltonian(1.0);
        let p = Operator::diagonal(&[1.0, 0.0]);
        let (free, int) = split_hamiltonian(&h, &p).unwrap();
        assert_eq!(free.max_abs(), 0.0);
        assert_eq!(int.max_abs_diff(&h), 0.0);

        let h3 = models::three_level_hamiltonian(1.0, 2.0);
        let part = models::three_level_partition();
        let (free, int) = split_hamiltonian(&h3, &part.projectors()[0]).unwrap();
        let mut expect = Operator::zeros(3);
        expect[(1, 2)] = Complex64::new(2.0, 0.0);
        expect[(2, 1)] = Complex64::new(2.0, 0.0);
        assert_eq!(int.max_abs_diff(&expect), 0.0);
        assert_eq!((&free + &int).max_abs_diff(&h3), 0.0);

        let commuting = Operator::diagonal(&[1.0, 2.0, 3.0]);
        let (_, int) = split_hamiltonian(&commuting, &part.projectors()[0]).unwrap();
        assert_eq!(int.max_abs(), 0.0);
    }

    #[test]
    fn measured_rabi_survival() {
        let h = models::rabi_hamiltonian(1.0);
        let plus = StateVector::basis(2, 0);
        let p5 = survival_after_measurements(&h, &plus, 5, 1.0).unwrap();
        assert!((p5 - libm::pow(cos(0.2), 10.0)).abs() < 1e-13);
        assert!((p5 - 0.8176).abs() < 1e-4);
        let p1 = survival_after_measurements(&h, &plus, 1, 1.0).unwrap();
        assert!((p1 - cos(1.0) * cos(1.0)).abs() < 1e-15);
        assert!(survival_after_measurements(&h, &plus, 0, 1.0).is_err());
    }

    #[test]
    fn effective_rates() {
        let h = models::rabi_hamiltonian(1.0);
        let plus = StateVector::basis(2, 0);
        let g = effective_decay_rate(&h, &plus, 0.1).unwrap();
        assert!((g - (-2.0 * log(cos(0.1)) / 0.1)).abs() < 1e-13);
        assert!((g - 0.100167).abs() < 1e-5);

        let commuting = Operator::diagonal(&[1.0, 2.0]);
        assert_eq!(effective_decay_rate(&commuting, &plus, 0.3).unwrap(), 0.0);

        let near_node = effective_decay_rate(&h, &plus, core::f64::consts::FRAC_PI_2).unwrap();
        assert!(near_node > 40.0);
    }

    #[test]
    fn exponential_fit_is_exact() {
        let times: Vec<f64> = (0..40).map(|k| k as f64 * 0.25).collect();
        let probs = times.iter().map(|t| exp(-0.5 * t)).collect();
        let curve = SurvivalCurve::new(times, probs, 1).unwrap();
        let (gamma, z) = estimate_asymptotic_rate(&curve, (1.0, 8.0)).unwrap();
        assert!((gamma - 0.5).abs() < 1e-9);
        assert!((z - 1.0).abs() < 1e-9);

        let flat = SurvivalCurve::new((0..20).map(f64::from).collect(), vec![1.0; 20], 1).unwrap();
        assert_eq!(estimate_asymptotic_rate(&flat, (0.0, 19.0)).unwrap(), (0.0, 1.0));
        assert!(matches!(
            estimate_asymptotic_rate(&flat, (2.0, 6.0)),
            Err(ZenoError::WindowTooNarrow { samples: 5 })
        ));
        assert!(matches!(
            estimate_asymptotic_rate(&flat, (2.0, 60.0)),
            Err(ZenoError::InvalidBracket { .. })
        ));
    }

    #[test]
    fn gaussian_survival_transition() {
        let tau = find_transition_time_with(|t| exp(-t * t), 1.0, (0.1, 5.0))
            .unwrap()
            .unwrap();
        assert!((tau - 1.0).abs() < 1e-8);
    }

    #[test]
    fn no_transition_for_periodic_rabi() {
        let h = models::rabi_hamiltonian(1.0);
        let plus = StateVector::basis(2, 0);
        // gamma_eff(tau) = -2 ln cos(tau)/tau stays below ~0.65 on [0.05, 1.0].
        let found = find_transition_time(&h, &plus, 5.0, (0.05, 1.0)).unwrap();
        assert_eq!(found, None);
        assert!(matches!(
            find_transition_time(&h, &plus, 1.0, (1.0, 0.5)),
            Err(ZenoError::InvalidBracket { .. })
        ));
    }

    #[test]
    fn curve_validation() {
        assert!(SurvivalCurve::new(vec![0.0, 0.0], vec![1.0, 1.0], 2).is_err());
        assert!(SurvivalCurve::new(vec![0.0, 1.0], vec![1.0, 1.5], 2).is_err());
        assert!(SurvivalCurve::new(vec![0.0, 1.0], vec![1.0], 2).is_err());
    }
}
