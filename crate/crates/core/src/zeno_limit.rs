//! The Zeno product formula `V_N(t) = [P e^{-iHt/N} P]^N` and its limit
//! `U_Z(t) = P exp(-i PHP t)`.
//!
//! On finite matrices the defect `|V_N - U_Z|` is observed to decay as
//! `O(1/N)`; this is an empirical property of the implementation and is
//! checked as such in the test suite, not a stated theorem.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Result, ZenoError};
use crate::linops::{hermitian_eig, psd_sqrt, Operator, SpectralDecomposition, INVARIANT_TOL};

/// Above this many factors the running product is re-sandwiched with `P`
/// every [`REPROJECT_EVERY`] multiplications.
pub const REPROJECT_ABOVE: u32 = 100_000;
pub const REPROJECT_EVERY: u32 = 1024;

/// Checks the projector invariant irrespective of the tag.
pub(crate) fn require_projector(p: &Operator) -> Result<()> {
    let defect = p.hermitian_defect();
    if defect > INVARIANT_TOL {
        return Err(ZenoError::NonHermitianInput { defect });
    }
    let defect = p.projector_defect();
    if defect > INVARIANT_TOL {
        return Err(ZenoError::NotAProjector { defect });
    }
    Ok(())
}

/// One point of a convergence profile.
#[derive(Debug, Clone)]
pub struct ZenoProductResult {
    pub n: u32,
    pub v_n: Operator,
    pub u_z: Operator,
    /// Entrywise max-modulus distance `|V_N - U_Z|`.
    pub defect: f64,
    /// Operator-norm distance `||V_N - U_Z||`.
    pub defect_opnorm: f64,
    /// `Tr[V_N rho_P V_N^+]` for the maximally mixed state `rho_P = P / Tr P`
    /// of the Zeno subspace.
    pub survival: f64,
}

/// Zeno products for a fixed `(H, P)`, sharing one decomposition of `H`
/// across all `(N, t)`.
#[derive(Debug, Clone)]
pub struct ZenoProduct {
    h: Operator,
    h_spec: SpectralDecomposition,
    p: Operator,
    zeno_spec: SpectralDecomposition,
}

impl ZenoProduct {
    pub fn new(h: &Operator, p: &Operator) -> Result<Self> {
        h.check_dim(p.dim())?;
        require_projector(p)?;
        let h_spec = hermitian_eig(h)?;
        let zeno_spec = hermitian_eig(&zeno_hamiltonian(h, p)?)?;
        Ok(ZenoProduct {
            h: h.clone(),
            h_spec,
            p: p.clone(),
            zeno_spec,
        })
    }

    pub fn projector(&self) -> &Operator {
        &self.p
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.h
    }

    /// `P U(tau) P`.
    pub fn step(&self, tau: f64) -> Operator {
        self.h_spec.propagator(tau).sandwich(&self.p)
    }

    /// `[P U(t/N) P]^N` by `N` explicit multiplications.
    pub fn product(&self, n: u32, t: f64) -> Result<Operator> {
        if n == 0 {
            return Err(ZenoError::InvalidParameter { name: "N", value: 0.0 });
        }
        let step = self.step(t / n as f64);
        let mut acc = step.clone();
        for k in 1..n {
            acc = &acc * &step;
            if n > REPROJECT_ABOVE && k % REPROJECT_EVERY == 0 {
                acc = acc.sandwich(&self.p);
            }
        }
        Ok(acc)
    }

    /// `P exp(-i PHP t)`.
    pub fn zeno_unitary(&self, t: f64) -> Operator {
        &self.p * &self.zeno_spec.propagator(t)
    }

    pub fn result(&self, n: u32, t: f64) -> Result<ZenoProductResult> {
        let v_n = self.product(n, t)?;
        let u_z = self.zeno_unitary(t);
        let diff = &v_n - &u_z;
        let rank = self.p.trace().re;
        let survival = if rank > 0.5 {
            v_n.data().iter().map(|z| z.norm_sqr()).sum::<f64>() / rank
        } else {
            0.0
        };
        Ok(ZenoProductResult {
            n,
            defect: diff.max_abs(),
            defect_opnorm: diff.op_norm(),
            survival,
            v_n,
            u_z,
        })
    }

    /// `|(P U(t) P)(P U(s) P) - P U(t+s) P|`, entrywise max modulus.
    pub fn semigroup_defect(&self, t: f64, s: f64) -> f64 {
        let lhs = &self.step(t) * &self.step(s);
        lhs.max_abs_diff(&self.step(t + s))
    }
}

/// `[P U(t/N) P]^N`.
pub fn zeno_product(h: &Operator, p: &Operator, n: u32, t: f64) -> Result<Operator> {
    ZenoProduct::new(h, p)?.product(n, t)
}

/// Naive Zeno Hamiltonian `PHP`.
pub fn zeno_hamiltonian(h: &Operator, p: &Operator) -> Result<Operator> {
    h.check_dim(p.dim())?;
    let defect = h.hermitian_defect();
    if defect > INVARIANT_TOL {
        return Err(ZenoError::NonHermitianInput { defect });
    }
    Ok(h.sandwich(p).hermitian_part())
}

/// `P exp(-i PHP t)`.
pub fn zeno_unitary(h: &Operator, p: &Operator, t: f64) -> Result<Operator> {
    h.check_dim(p.dim())?;
    require_projector(p)?;
    let hz = zeno_hamiltonian(h, p)?;
    Ok(p * &hermitian_eig(&hz)?.propagator(t))
}

/// Form version of the Zeno Hamiltonian, `(H^{1/2} P)^+ (H^{1/2} P)`, for
/// positive semidefinite `H`.
pub fn zeno_hamiltonian_form(h: &Operator, p: &Operator) -> Result<Operator> {
    h.check_dim(p.dim())?;
    let root = psd_sqrt(h)?;
    let rp = &root * p;
    Ok((&rp.adjoint() * &rp).hermitian_part())
}

/// Zeno products for each `N` of an ascending list, sharing one
/// decomposition of `H`.
pub fn convergence_profile(h: &Operator, p: &Operator, t: f64, n_list: &[u32]) -> Result<Vec<ZenoProductResult>> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ZenoError::MalformedData(
            "N list must be non-empty and strictly ascending",
        ));
    }
    let engine = ZenoProduct::new(h, p)?;
    n_list.iter().map(|&n| engine.result(n, t)).collect()
}

/// `|(P U(t) P)(P U(s) P) - P U(t+s) P|`.
pub fn semigroup_defect(h: &Operator, p: &Operator, t: f64, s: f64) -> Result<f64> {
    Ok(ZenoProduct::new(h, p)?.semigroup_defect(t, s))
}

/// `exp(-i A t)` applied to the phase `<psi|H|psi>` of a rank-one projector,
/// used by tests as a closed form.
#[doc(hidden)]
pub fn rank_one_phase(h: &Operator, psi: &[Complex64], t: f64) -> Complex64 {
    Complex64::cis(-h.expectation(psi, psi).re * t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::{propagator, StateVector};
    use crate::math::{cos, sin};
    use crate::models;

    #[test]
    fn commuting_case_is_independent_of_n() {
        let h = Operator::diagonal(&[0.3, -1.0, 2.0]);
        let p = Operator::diagonal(&[1.0, 1.0, 0.0]);
        let expect = propagator(&h, 0.9).unwrap().sandwich(&p);
        for n in [1, 7, 100] {
            assert!(zeno_product(&h, &p, n, 0.9).unwrap().max_abs_diff(&expect) < 1e-13);
        }
    }

    #[test]
    fn rabi_product_entry() {
        let h = models::rabi_hamiltonian(1.0);
        let p = Operator::diagonal(&[1.0, 0.0]);
        let v = zeno_product(&h, &p, 5, 1.0).unwrap();
        assert!((v[(0, 0)] - Complex64::new(libm::pow(cos(0.2), 5.0), 0.0)).norm() < 1e-15);
        assert!((v[(0, 0)].norm_sqr() - 0.8176).abs() < 1e-4);
    }

    #[test]
    fn three_level_zeno_objects() {
        let (o1, o2) = (1.0, 1.0);
        let h = models::three_level_hamiltonian(o1, o2);
        let p1 = models::three_level_partition().projectors()[0].clone();
        let hz = zeno_hamiltonian(&h, &p1).unwrap();
        let mut expect = Operator::zeros(3);
        expect[(0, 1)] = Complex64::new(o1, 0.0);
        expect[(1, 0)] = Complex64::new(o1, 0.0);
        assert_eq!(hz.max_abs_diff(&expect), 0.0);

        let t = 0.8;
        let uz = zeno_unitary(&h, &p1, t).unwrap();
        let mut block = Operator::zeros(3);
        block[(0, 0)] = Complex64::new(cos(o1 * t), 0.0);
        block[(1, 1)] = Complex64::new(cos(o1 * t), 0.0);
        block[(0, 1)] = Complex64::new(0.0, -sin(o1 * t));
        block[(1, 0)] = Complex64::new(0.0, -sin(o1 * t));
        assert!(uz.max_abs_diff(&block) < 1e-14);
        // Unitary on range(P).
        assert!((&uz.adjoint() * &uz).max_abs_diff(&p1) < 1e-10);
        assert!(zeno_unitary(&h, &p1, 0.0).unwrap().max_abs_diff(&p1) < 1e-15);

        let v = zeno_product(&h, &p1, 10_000, 1.0).unwrap();
        assert!(v.max_abs_diff(&zeno_unitary(&h, &p1, 1.0).unwrap()) < 2e-3);
    }

    #[test]
    fn trivial_projectors() {
        let h = models::three_level_hamiltonian(0.4, 1.1);
        assert!(zeno_hamiltonian(&h, &Operator::identity(3)).unwrap().max_abs_diff(&h) < 1e-15);
        assert_eq!(zeno_hamiltonian(&h, &Operator::zeros(3)).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn rank_one_projector_gives_a_phase() {
        let h = Operator::diagonal(&[1.0, 4.0, -2.0]);
        let psi = StateVector::normalized(alloc::vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.5, 0.0)
        ])
        .unwrap();
        let p = psi.projector();
        let uz = zeno_unitary(&h, &p, 1.3).unwrap();
        let expect = p.scale(rank_one_phase(&h, psi.amplitudes(), 1.3));
        assert!(uz.max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn form_hamiltonian_examples() {
        let plus = StateVector::normalized(alloc::vec![Complex64::new(1.0, 0.0); 2]).unwrap();
        let p = plus.projector();
        let hz = zeno_hamiltonian_form(&Operator::diagonal(&[1.0, 4.0]), &p).unwrap();
        assert!(hz.max_abs_diff(&p.scale_real(2.5)) < 1e-14);
        let hz = zeno_hamiltonian_form(&Operator::identity(2), &p).unwrap();
        assert!(hz.max_abs_diff(&p) < 1e-14);
        assert!(matches!(
            zeno_hamiltonian_form(&Operator::diagonal(&[1.0, -1.0]), &p),
            Err(ZenoError::NegativeSpectrum { .. })
        ));
    }

    #[test]
    fn semigroup_defect_vanishes_when_commuting() {
        let h = Operator::diagonal(&[0.3, -1.0, 2.0]);
        let p = Operator::diagonal(&[0.0, 1.0, 1.0]);
        assert!(semigroup_defect(&h, &p, 0.4, 0.7).unwrap() < 1e-12);
        let h3 = models::three_level_hamiltonian(1.0, 1.0);
        let p1 = models::three_level_partition().projectors()[0].clone();
        assert!(semigroup_defect(&h3, &p1, 0.5, 0.5).unwrap() > 1e-3);
    }

    #[test]
    fn profile_requires_ascending_list() {
        let h = models::rabi_hamiltonian(1.0);
        let p = Operator::diagonal(&[1.0, 0.0]);
        assert!(convergence_profile(&h, &p, 1.0, &[]).is_err());
        assert!(convergence_profile(&h, &p, 1.0, &[4, 2]).is_err());
        let commuting = Operator::diagonal(&[1.0, 2.0]);
        for r in convergence_profile(&commuting, &p, 1.0, &[1, 10, 100]).unwrap() {
            assert!(r.defect <= 1e-10);
        }
    }

    #[test]
    fn rejects_non_projector() {
        let h = models::rabi_hamiltonian(1.0);
        let not_p = Operator::diagonal(&[1.0, 0.5]);
        assert!(matches!(
            zeno_product(&h, &not_p, 3, 1.0),
            Err(ZenoError::NotAProjector { .. })
        ));
    }
}
