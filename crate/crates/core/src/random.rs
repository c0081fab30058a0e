//! Random operators and states for property checks.
//!
//! All generators draw from a caller-supplied [`rand::Rng`]; entries are
//! standard complex Gaussians built with the Box-Muller transform, so a
//! seeded generator reproduces the same draws bit for bit.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use crate::linops::{hermitian_eig, projector_from_columns, DensityMatrix, Operator, StateVector, Symmetry};
use crate::math::{cos, log, sin, sqrt, PI};
use crate::subspaces::ZenoPartition;

/// Complex number with independent standard normal real and imaginary parts.
pub fn gaussian(rng: &mut impl Rng) -> Complex64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    let r = sqrt(-2.0 * log(u1));
    Complex64::new(r * cos(2.0 * PI * u2), r * sin(2.0 * PI * u2))
}

/// `(G + G^+) / 2` for a complex Gaussian matrix `G`, rescaled so that the
/// entries have unit scale.
pub fn hermitian(rng: &mut impl Rng, dim: usize) -> Operator {
    let g = Operator::from_fn(dim, |_, _| gaussian(rng));
    g.hermitian_part().scale_real(1.0 / sqrt(dim as f64))
}

/// Uniformly distributed pure state.
pub fn state(rng: &mut impl Rng, dim: usize) -> StateVector {
    loop {
        let v: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
        if let Ok(psi) = StateVector::normalized(v) {
            return psi;
        }
    }
}

/// Unitary from the eigenvectors of a random Hermitian operator with random
/// phases.
pub fn unitary(rng: &mut impl Rng, dim: usize) -> Operator {
    let spec = hermitian_eig(&hermitian(rng, dim)).expect("hermitian by construction");
    let phases: Vec<f64> = (0..dim).map(|_| 2.0 * PI * rng.random::<f64>()).collect();
    let mut out = Operator::zeros(dim);
    for (k, &phi) in phases.iter().enumerate() {
        let v = spec.eigenvector(k);
        let w = Complex64::cis(phi);
        for i in 0..dim {
            for j in 0..dim {
                out[(i, j)] += v[i] * w * v[j].conj();
            }
        }
    }
    out.with_symmetry(Symmetry::Unitary).expect("unitary by construction")
}

/// Projector onto the span of `rank` random vectors.
pub fn projector(rng: &mut impl Rng, dim: usize, rank: usize) -> Operator {
    loop {
        let columns: Vec<StateVector> = (0..rank).map(|_| state(rng, dim)).collect();
        if let Ok(p) = projector_from_columns(&columns) {
            return p;
        }
    }
}

/// Partition into sectors of the given ranks, spanned by the eigenvectors
/// of a random Hermitian operator.
pub fn partition(rng: &mut impl Rng, ranks: &[usize]) -> ZenoPartition {
    let dim = ranks.iter().sum();
    let spec = hermitian_eig(&hermitian(rng, dim)).expect("hermitian by construction");
    let mut next = 0;
    let groups: Vec<Vec<usize>> = ranks
        .iter()
        .map(|&r| {
            let g = (next..next + r).collect();
            next += r;
            g
        })
        .collect();
    ZenoPartition::from_eigenbasis(&spec, &groups).expect("eigenvectors are orthonormal")
}

/// Full-rank density matrix `G G^+ / Tr(G G^+)`.
pub fn density_matrix(rng: &mut impl Rng, dim: usize) -> DensityMatrix {
    let g = Operator::from_fn(dim, |_, _| gaussian(rng));
    let gg = (&g * &g.adjoint()).hermitian_part();
    let tr = gg.trace().re;
    DensityMatrix::new(gg.scale_real(1.0 / tr).hermitian_part()).expect("positive by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_satisfy_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert!(hermitian(&mut rng, 5).hermitian_defect() == 0.0);
        assert!(unitary(&mut rng, 5).unitary_defect() < 1e-12);
        let p = projector(&mut rng, 5, 2);
        assert!((p.trace().re - 2.0).abs() < 1e-12);
        assert_eq!(partition(&mut rng, &[2, 1, 3]).ranks(), alloc::vec![2, 1, 3]);
        assert!((density_matrix(&mut rng, 4).trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn seeded_draws_repeat() {
        let a = hermitian(&mut ChaCha8Rng::seed_from_u64(11), 4);
        let b = hermitian(&mut ChaCha8Rng::seed_from_u64(11), 4);
        assert_eq!(a, b);
    }
}
