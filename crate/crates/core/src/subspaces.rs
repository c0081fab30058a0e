//! Zeno subspaces of a partition `{P_n}` of the Hilbert space.
//!
//! A nonselective measurement acts as `rho -> sum_n P_n rho P_n`. Alternating
//! it with free evolution `N` times in `[0, t]` and letting `N` grow confines
//! the dynamics to the sectors `P_n H`, each evolving under `P_n H P_n`, with
//! sector probabilities frozen and inter-sector coherence destroyed.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Result, ZenoError};
use crate::linops::{hermitian_eig, DensityMatrix, Operator, SpectralDecomposition, Symmetry, INVARIANT_TOL};
use crate::zeno_limit::{require_projector, zeno_unitary};

/// Ordered resolution of the identity into mutually orthogonal projectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ZenoPartition {
    projectors: Vec<Operator>,
    dim: usize,
}

impl ZenoPartition {
    /// Validates each projector, pairwise orthogonality and completeness,
    /// all within `1e-10` entrywise.
    pub fn new(projectors: Vec<Operator>) -> Result<Self> {
        let dim = projectors
            .first()
            .ok_or(ZenoError::MalformedData("partition needs at least one projector"))?
            .dim();
        let mut projectors = projectors;
        for p in projectors.iter_mut() {
            p.check_dim(dim)?;
            require_projector(p)?;
            *p = p.clone().assume(Symmetry::Projector);
        }
        for (a, pa) in projectors.iter().enumerate() {
            for pb in &projectors[a + 1..] {
                let defect = (pa * pb).max_abs();
                if defect > INVARIANT_TOL {
                    return Err(ZenoError::InvalidPartition {
                        reason: "projectors are not mutually orthogonal",
                        defect,
                    });
                }
            }
        }
        let mut sum = Operator::zeros(dim);
        for p in &projectors {
            sum = &sum + p;
        }
        let defect = sum.max_abs_diff(&Operator::identity(dim));
        if defect > INVARIANT_TOL {
            return Err(ZenoError::InvalidPartition {
                reason: "projectors do not sum to the identity",
                defect,
            });
        }
        Ok(ZenoPartition { projectors, dim })
    }

    /// `{I}`.
    pub fn trivial(dim: usize) -> Self {
        ZenoPartition {
            projectors: alloc::vec![Operator::identity(dim)],
            dim,
        }
    }

    /// Projectors onto groups of eigenvectors, one projector per group of
    /// eigenvalue indices. Every index must appear in exactly one group;
    /// grouping ties together is the caller's responsibility.
    pub fn from_eigenbasis(spec: &SpectralDecomposition, groups: &[Vec<usize>]) -> Result<Self> {
        let n = spec.source_dim();
        let mut seen = alloc::vec![false; n];
        for &k in groups.iter().flatten() {
            if k >= n || seen[k] {
                return Err(ZenoError::InvalidPartition {
                    reason: "eigenvalue groups must cover every index exactly once",
                    defect: k as f64,
                });
            }
            seen[k] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(ZenoError::InvalidPartition {
                reason: "eigenvalue groups must cover every index exactly once",
                defect: 0.0,
            });
        }
        let projectors = groups
            .iter()
            .map(|group| {
                let mut p = Operator::zeros(n);
                for &k in group {
                    let v = spec.eigenvector(k);
                    for i in 0..n {
                        for j in 0..n {
                            p[(i, j)] += v[i] * v[j].conj();
                        }
                    }
                }
                p.hermitian_part()
            })
            .collect();
        ZenoPartition::new(projectors)
    }

    /// Spectral projectors of a Hermitian operator, grouping eigenvalues whose
    /// sorted neighbours differ by at most `tol`. Returns the partition and
    /// the mean eigenvalue of each group.
    pub fn from_hermitian(h: &Operator, tol: f64) -> Result<(Self, Vec<f64>)> {
        let spec = hermitian_eig(h)?;
        let groups = group_sorted(spec.eigenvalues(), tol);
        let means = groups
            .iter()
            .map(|g| g.iter().map(|&k| spec.eigenvalues()[k]).sum::<f64>() / g.len() as f64)
            .collect();
        Ok((ZenoPartition::from_eigenbasis(&spec, &groups)?, means))
    }

    pub fn projectors(&self) -> &[Operator] {
        &self.projectors
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    /// `Tr P_n` for each sector.
    pub fn ranks(&self) -> Vec<usize> {
        self.projectors
            .iter()
            .map(|p| libm::round(p.trace().re) as usize)
            .collect()
    }

    /// `X -> sum_n P_n X P_n`.
    pub fn block_diagonal(&self, x: &Operator) -> Operator {
        let mut out = Operator::zeros(self.dim);
        for p in &self.projectors {
            out = &out + &x.sandwich(p);
        }
        out
    }

    fn check(&self, dim: usize) -> Result<()> {
        if self.dim == dim {
            Ok(())
        } else {
            Err(ZenoError::DimensionMismatch {
                expected: self.dim,
                found: dim,
            })
        }
    }
}

/// Indices of `sorted` grouped by consecutive gaps of at most `tol`.
pub(crate) fn group_sorted(sorted: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (k, &value) in sorted.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if value - sorted[*g.last().unwrap()] <= tol => g.push(k),
            _ => groups.push(alloc::vec![k]),
        }
    }
    groups
}

/// `rho -> sum_n P_n rho P_n`.
pub fn nonselective_project(rho: &DensityMatrix, part: &ZenoPartition) -> Result<DensityMatrix> {
    part.check(rho.dim())?;
    Ok(DensityMatrix::from_channel_output(part.block_diagonal(rho.op())))
}

/// `N` rounds of free evolution for `t/N` followed by a nonselective
/// measurement.
#[derive(Debug, Clone)]
pub struct MeasurementChannel {
    step: Operator,
    step_adjoint: Operator,
    part: ZenoPartition,
}

impl MeasurementChannel {
    pub fn new(h: &Operator, part: &ZenoPartition, tau: f64) -> Result<Self> {
        part.check(h.dim())?;
        let step = hermitian_eig(h)?.propagator(tau);
        Ok(MeasurementChannel {
            step_adjoint: step.adjoint(),
            step,
            part: part.clone(),
        })
    }

    /// `P̂ (U rho U^+)`. No clipping or renormalization is applied.
    pub fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        let evolved = &(&self.step * rho.op()) * &self.step_adjoint;
        DensityMatrix::from_channel_output(self.part.block_diagonal(&evolved))
    }
}

/// `(P̂ Û_{t/N})^N rho_0`.
pub fn evolve_with_measurements(
    rho0: &DensityMatrix,
    h: &Operator,
    part: &ZenoPartition,
    n: u32,
    t: f64,
) -> Result<DensityMatrix> {
    part.check(rho0.dim())?;
    if n == 0 {
        return Err(ZenoError::InvalidParameter { name: "N", value: 0.0 });
    }
    let channel = MeasurementChannel::new(h, part, t / n as f64)?;
    let mut rho = rho0.clone();
    for _ in 0..n {
        rho = channel.apply(&rho);
    }
    Ok(rho)
}

/// Kraus operator `P_{n_N} U P_{n_{N-1}} U ... P_{n_1} U` of the
/// `N`-measurement channel for one outcome record (`U = e^{-iHt/N}`,
/// `N = sequence.len()`). Summing `V rho V^+` over all records reproduces
/// [`evolve_with_measurements`].
pub fn measurement_kraus_operator(h: &Operator, part: &ZenoPartition, sequence: &[usize], t: f64) -> Result<Operator> {
    part.check(h.dim())?;
    if sequence.is_empty() {
        return Err(ZenoError::InvalidParameter { name: "N", value: 0.0 });
    }
    if let Some(&bad) = sequence.iter().find(|&&k| k >= part.len()) {
        return Err(ZenoError::InvalidParameter {
            name: "sector",
            value: bad as f64,
        });
    }
    let u = hermitian_eig(h)?.propagator(t / sequence.len() as f64);
    let mut acc = Operator::identity(h.dim());
    for &k in sequence {
        acc = &(&part.projectors()[k] * &u) * &acc;
    }
    Ok(acc)
}

/// Limit `N -> inf` of [`evolve_with_measurements`]:
/// `sum_n U_n rho_0 U_n^+` with `U_n = P_n exp(-i P_n H P_n t)`.
///
/// A `rho_0` with inter-sector coherence is first projected with
/// [`nonselective_project`], which is what the first measurement does.
pub fn zeno_limit_channel(rho0: &DensityMatrix, h: &Operator, part: &ZenoPartition, t: f64) -> Result<DensityMatrix> {
    part.check(rho0.dim())?;
    part.check(h.dim())?;
    let projected = part.block_diagonal(rho0.op());
    let mut out = Operator::zeros(part.dim());
    for p in part.projectors() {
        let u = zeno_unitary(h, p, t)?;
        out = &out + &(&(&u * &projected) * &u.adjoint());
    }
    Ok(DensityMatrix::from_channel_output(out))
}

/// Global Zeno Hamiltonian `sum_n P_n H P_n`.
pub fn global_zeno_hamiltonian(h: &Operator, part: &ZenoPartition) -> Result<Operator> {
    part.check(h.dim())?;
    let defect = h.hermitian_defect();
    if defect > INVARIANT_TOL {
        return Err(ZenoError::NonHermitianInput { defect });
    }
    Ok(part.block_diagonal(h).hermitian_part())
}

/// `p_n = Tr[rho P_n]`.
pub fn sector_probabilities(rho: &DensityMatrix, part: &ZenoPartition) -> Result<Vec<f64>> {
    part.check(rho.dim())?;
    Ok(part.projectors().iter().map(|p| (rho.op() * p).trace().re).collect())
}

/// `max_{n != m} |P_n A P_m|`, entrywise max modulus.
pub fn offdiagonal_block_norm(a: &Operator, part: &ZenoPartition) -> Result<f64> {
    part.check(a.dim())?;
    let mut worst: f64 = 0.0;
    for (n, pn) in part.projectors().iter().enumerate() {
        let left = pn * a;
        for (m, pm) in part.projectors().iter().enumerate() {
            if n != m {
                worst = worst.max((&left * pm).max_abs());
            }
        }
    }
    Ok(worst)
}

/// `Tr rho^2`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    // Tr(rho^2) = sum_ij |rho_ij|^2 for Hermitian rho.
    rho.op().data().iter().map(Complex64::norm_sqr).sum()
}

/// Star product `A * B = A P B` of the projected algebra; `P` is its unit.
pub fn star_product(a: &Operator, b: &Operator, p: &Operator) -> Result<Operator> {
    a.check_dim(p.dim())?;
    b.check_dim(p.dim())?;
    Ok(&(a * p) * b)
}
