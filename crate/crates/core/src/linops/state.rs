use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::operator::{Operator, Symmetry};
use crate::error::{Result, ZenoError};
use crate::math::sqrt;

/// Normalization tolerance for [`StateVector`] and the trace of [`DensityMatrix`].
pub const NORM_TOL: f64 = 1e-12;

/// Normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes that are already normalized within [`NORM_TOL`].
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(ZenoError::MalformedData("state vector must be non-empty"));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(ZenoError::MalformedData("state amplitudes must be finite"));
        }
        let norm = norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(ZenoError::NotNormalized { norm });
        }
        Ok(StateVector { amplitudes })
    }

    /// Rescales to unit norm; fails on the zero vector.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if !(n > 0.0) || !n.is_finite() {
            return Err(ZenoError::NotNormalized { norm: n });
        }
        amplitudes.iter_mut().for_each(|z| *z /= n);
        StateVector::new(amplitudes)
    }

    /// Computational basis vector `|k>`.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index out of range");
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[k] = Complex64::new(1.0, 0.0);
        StateVector { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|psi><psi|`, tagged projector.
    pub fn projector(&self) -> Operator {
        Operator::outer(&self.amplitudes, &self.amplitudes)
            .hermitian_part()
            .assume(Symmetry::Projector)
    }
}

/// Euclidean norm.
pub fn norm(v: &[Complex64]) -> f64 {
    sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>())
}

/// Positive, unit-trace Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: Operator,
}

impl DensityMatrix {
    /// Validates hermiticity, unit trace (within [`NORM_TOL`]) and a spectrum
    /// bounded below by `-1e-10`.
    pub fn new(op: Operator) -> Result<Self> {
        let op = op.with_symmetry(Symmetry::Hermitian)?;
        let trace = op.trace().re;
        let min_eigenvalue = op.min_eigenvalue();
        if (trace - 1.0).abs() > NORM_TOL || !(min_eigenvalue >= -1e-10) {
            return Err(ZenoError::InvalidDensityMatrix { trace, min_eigenvalue });
        }
        Ok(DensityMatrix { op })
    }

    pub fn pure(psi: &StateVector) -> Self {
        DensityMatrix {
            op: psi.projector().assume(Symmetry::Hermitian),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            op: Operator::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    /// Channel outputs: trace and positivity hold only up to the channel's
    /// accumulated roundoff, which callers check against their own tolerance.
    pub(crate) fn from_channel_output(op: Operator) -> Self {
        DensityMatrix {
            op: op.hermitian_part(),
        }
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn into_op(self) -> Operator {
        self.op
    }

    pub fn trace(&self) -> f64 {
        self.op.trace().re
    }

    /// Conjugation `U rho U^+` by a unitary.
    pub fn conjugate(&self, u: &Operator) -> Self {
        DensityMatrix::from_channel_output(&(u * &self.op) * &u.adjoint())
    }
}
