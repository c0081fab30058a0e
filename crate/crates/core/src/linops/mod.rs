//! Dense complex operator algebra.
//!
//! Propagators are always built from a Hermitian eigendecomposition, never
//! from a truncated series, so `exp(-iAt)` is unitary to roundoff and costs
//! one matrix assembly per time value once the decomposition exists.
//! Degenerate eigenvalues carry no canonical eigenvector choice; everything
//! downstream is phrased in terms of spectral projectors.

mod eig;
mod operator;
mod state;

use alloc::vec::Vec;

use num_complex::Complex64;

pub use eig::{hermitian_eig, symmetric_tridiagonal_eigenvalues, SpectralDecomposition};
pub use operator::{Operator, Symmetry, INVARIANT_TOL};
pub use state::{norm, DensityMatrix, StateVector, NORM_TOL};

use crate::error::{Result, ZenoError};
use crate::math::sqrt;

/// Eigenvalues above `-PSD_CLAMP` are treated as zero by [`psd_sqrt`].
pub const PSD_CLAMP: f64 = 1e-10;

/// `exp(-i A t)`.
pub fn propagator(a: &Operator, t: f64) -> Result<Operator> {
    Ok(hermitian_eig(a)?.propagator(t))
}

/// Principal square root of a positive semidefinite operator.
pub fn psd_sqrt(a: &Operator) -> Result<Operator> {
    let spec = hermitian_eig(a)?;
    if let Some(&lowest) = spec.eigenvalues().first() {
        if lowest < -PSD_CLAMP {
            return Err(ZenoError::NegativeSpectrum { eigenvalue: lowest });
        }
    }
    Ok(spec.map(|l| Complex64::new(sqrt(l.max(0.0)), 0.0)).hermitian_part())
}

/// Orthogonal projector onto the span of linearly independent vectors.
pub fn projector_from_columns(vectors: &[StateVector]) -> Result<Operator> {
    let first = vectors
        .first()
        .ok_or(ZenoError::MalformedData("projector needs at least one vector"))?;
    let dim = first.dim();
    for v in vectors {
        if v.dim() != dim {
            return Err(ZenoError::DimensionMismatch {
                expected: dim,
                found: v.dim(),
            });
        }
    }
    let k = vectors.len();
    let gram = Operator::from_fn(k, |a, b| vectors[a].inner(&vectors[b]));
    let gram_spec = hermitian_eig(&gram.hermitian_part())?;
    let min_gram_eigenvalue = gram_spec.eigenvalues()[0];
    if min_gram_eigenvalue < 1e-10 {
        return Err(ZenoError::RankDeficient { min_gram_eigenvalue });
    }

    // Modified Gram-Schmidt, two passes.
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(k);
    for v in vectors {
        let mut w = v.amplitudes().to_vec();
        for _ in 0..2 {
            for b in &basis {
                let overlap: Complex64 = b.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= overlap * bi;
                }
            }
        }
        let norm = sqrt(w.iter().map(|z| z.norm_sqr()).sum::<f64>());
        w.iter_mut().for_each(|z| *z /= norm);
        basis.push(w);
    }

    let mut p = Operator::zeros(dim);
    for b in &basis {
        for i in 0..dim {
            for j in 0..dim {
                p[(i, j)] += b[i] * b[j].conj();
            }
        }
    }
    p.hermitian_part().with_symmetry(Symmetry::Projector)
}

/// `I - P`.
pub fn complement(p: &Operator) -> Operator {
    (&Operator::identity(p.dim()) - p).assume(p.symmetry())
}
