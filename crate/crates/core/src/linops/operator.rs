use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Result, ZenoError};

/// Entrywise tolerance for the hermitian, unitary and projector invariants.
pub const INVARIANT_TOL: f64 = 1e-10;

/// Declared algebraic class of an [`Operator`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symmetry {
    Hermitian,
    Unitary,
    Projector,
    General,
}

/// Dense square complex matrix, stored row-major, with a symmetry tag.
///
/// Tags are checked when they are requested through [`Operator::new`] or
/// [`Operator::with_symmetry`]; arithmetic results are tagged
/// [`Symmetry::General`]. The arithmetic operators panic on mismatched
/// dimensions, while the module-level operations report
/// [`ZenoError::DimensionMismatch`] before doing any arithmetic.
#[derive(Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    data: Vec<Complex64>,
    symmetry: Symmetry,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator({}x{}, {:?})", self.dim, self.dim, self.symmetry)?;
        for i in 0..self.dim {
            write!(f, "  [")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, " {:+.4e}{:+.4e}i", z.re, z.im)?;
            }
            writeln!(f, " ]")?;
        }
        Ok(())
    }
}

impl Operator {
    /// Builds an operator and validates the invariant of `symmetry`.
    pub fn new(dim: usize, data: Vec<Complex64>, symmetry: Symmetry) -> Result<Self> {
        if dim == 0 {
            return Err(ZenoError::MalformedData("operator dimension must be positive"));
        }
        if data.len() != dim * dim {
            return Err(ZenoError::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(ZenoError::MalformedData("operator entries must be finite"));
        }
        Operator {
            dim,
            data,
            symmetry: Symmetry::General,
        }
        .with_symmetry(symmetry)
    }

    /// Real matrix from rows; tagged general.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(ZenoError::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend(row.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        Operator::new(dim, data, Symmetry::General)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Operator {
            dim,
            data,
            symmetry: Symmetry::General,
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Operator::zeros(dim);
        for i in 0..dim {
            op[(i, i)] = Complex64::new(1.0, 0.0);
        }
        op.symmetry = Symmetry::Projector;
        op
    }

    pub fn zeros(dim: usize) -> Self {
        Operator {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
            symmetry: Symmetry::General,
        }
    }

    /// Real diagonal matrix, tagged hermitian.
    pub fn diagonal(values: &[f64]) -> Self {
        let mut op = Operator::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            op[(i, i)] = Complex64::new(v, 0.0);
        }
        op.symmetry = Symmetry::Hermitian;
        op
    }

    /// `|u><v|`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        assert_eq!(u.len(), v.len(), "outer product of vectors of different length");
        Operator::from_fn(u.len(), |i, j| u[i] * v[j].conj())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    /// Row-major entries.
    #[inline]
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    /// Re-tags the operator after checking the invariant of `symmetry`.
    pub fn with_symmetry(mut self, symmetry: Symmetry) -> Result<Self> {
        match symmetry {
            Symmetry::General => {}
            Symmetry::Hermitian => {
                let defect = self.hermitian_defect();
                if defect > INVARIANT_TOL {
                    return Err(ZenoError::NonHermitianInput { defect });
                }
            }
            Symmetry::Unitary => {
                let defect = self.unitary_defect();
                if defect > INVARIANT_TOL {
                    return Err(ZenoError::NonUnitaryInput { defect });
                }
            }
            Symmetry::Projector => {
                let defect = self.hermitian_defect();
                if defect > INVARIANT_TOL {
                    return Err(ZenoError::NonHermitianInput { defect });
                }
                let defect = self.projector_defect();
                if defect > INVARIANT_TOL {
                    return Err(ZenoError::NotAProjector { defect });
                }
            }
        }
        self.symmetry = symmetry;
        Ok(self)
    }

    /// Re-tags without validation; for results that hold by construction.
    pub(crate) fn assume(mut self, symmetry: Symmetry) -> Self {
        self.symmetry = symmetry;
        self
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim == dim {
            Ok(())
        } else {
            Err(ZenoError::DimensionMismatch {
                expected: dim,
                found: self.dim,
            })
        }
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Operator::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out.symmetry = self.symmetry;
        out
    }

    /// `(A + A^+)/2`, tagged hermitian.
    pub fn hermitian_part(&self) -> Self {
        let n = self.dim;
        let mut out = Operator::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = (self.data[i * n + j] + self.data[j * n + i].conj()) * 0.5;
            }
        }
        out.symmetry = Symmetry::Hermitian;
        out
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Operator {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * factor).collect(),
            symmetry: Symmetry::General,
        }
    }

    /// Multiplication by a real factor keeps the hermitian tag.
    pub fn scale_real(&self, factor: f64) -> Self {
        let symmetry = match self.symmetry {
            Symmetry::Hermitian | Symmetry::Projector => Symmetry::Hermitian,
            _ => Symmetry::General,
        };
        Operator {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * factor).collect(),
            symmetry,
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Entrywise max-modulus distance.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim, other.dim, "operator dimensions differ");
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim;
        let mut defect: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                defect = defect.max((self.data[i * n + j] - self.data[j * n + i].conj()).norm());
            }
        }
        defect
    }

    pub fn unitary_defect(&self) -> f64 {
        let gram = &self.adjoint() * self;
        gram.max_abs_diff(&Operator::identity(self.dim))
    }

    pub fn projector_defect(&self) -> f64 {
        (self * self).max_abs_diff(self)
    }

    /// `A B - B A`.
    pub fn commutator(&self, other: &Operator) -> Self {
        &(self * other) - &(other * self)
    }

    /// `P X P`.
    pub fn sandwich(&self, projector: &Operator) -> Self {
        &(projector * self) * projector
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "vector length differs from operator dimension");
        let n = self.dim;
        (0..n)
            .map(|i| self.data[i * n..(i + 1) * n].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `<u|A|v>`.
    pub fn expectation(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        let av = self.apply(v);
        u.iter().zip(&av).map(|(a, b)| a.conj() * b).sum()
    }

    /// `A^k` by binary exponentiation (`A^0 = I`).
    pub fn pow(&self, mut k: usize) -> Self {
        let mut acc = Operator::identity(self.dim).assume(Symmetry::General);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Operator 2-norm, the largest singular value, from the spectrum of `A^+ A`.
    pub fn op_norm(&self) -> f64 {
        let gram = (&self.adjoint() * self).hermitian_part();
        match super::hermitian_eig(&gram) {
            Ok(spec) => crate::math::sqrt(spec.eigenvalues().last().copied().unwrap_or(0.0).max(0.0)),
            Err(_) => f64::NAN,
        }
    }

    /// Smallest eigenvalue of the hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        match super::hermitian_eig(&self.hermitian_part()) {
            Ok(spec) => spec.eigenvalues()[0],
            Err(_) => f64::NAN,
        }
    }
}

impl Index<(usize, usize)> for Operator {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for Operator {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimensions differ");
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            let row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for (o, b) in row.iter_mut().zip(&rhs.data[k * n..(k + 1) * n]) {
                    *o += a * b;
                }
            }
        }
        Operator {
            dim: n,
            data: out,
            symmetry: Symmetry::General,
        }
    }
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimensions differ");
        let symmetry = match (self.symmetry, rhs.symmetry) {
            (Symmetry::Hermitian | Symmetry::Projector, Symmetry::Hermitian | Symmetry::Projector) => {
                Symmetry::Hermitian
            }
            _ => Symmetry::General,
        };
        Operator {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
            symmetry,
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimensions differ");
        let symmetry = match (self.symmetry, rhs.symmetry) {
            (Symmetry::Hermitian | Symmetry::Projector, Symmetry::Hermitian | Symmetry::Projector) => {
                Symmetry::Hermitian
            }
            _ => Symmetry::General,
        };
        Operator {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
            symmetry,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn tags_are_validated() {
        let sx = Operator::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        assert!(sx.clone().with_symmetry(Symmetry::Hermitian).is_ok());
        assert!(sx.clone().with_symmetry(Symmetry::Unitary).is_ok());
        assert!(matches!(
            sx.with_symmetry(Symmetry::Projector),
            Err(ZenoError::NotAProjector { .. })
        ));
        let skew = Operator::new(
            2,
            vec![c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)],
            Symmetry::Hermitian,
        );
        assert!(matches!(skew, Err(ZenoError::NonHermitianInput { .. })));
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(
            Operator::new(2, vec![c(1.0, 0.0); 3], Symmetry::General),
            Err(ZenoError::DimensionMismatch { expected: 4, found: 3 })
        ));
        assert!(Operator::new(0, vec![], Symmetry::General).is_err());
        assert!(Operator::new(1, vec![c(f64::NAN, 0.0)], Symmetry::General).is_err());
    }

    #[test]
    fn products_and_adjoints() {
        let a = Operator::from_fn(3, |i, j| c(i as f64, j as f64 - 1.0));
        let b = Operator::from_fn(3, |i, j| c((i * j) as f64, 0.5));
        let ab = &a * &b;
        let lhs = ab.adjoint();
        let rhs = &b.adjoint() * &a.adjoint();
        assert!(lhs.max_abs_diff(&rhs) < 1e-14);
        assert_eq!(
            Operator::identity(3).pow(0),
            Operator::identity(3).assume(Symmetry::General)
        );
        assert!((a.pow(3).max_abs_diff(&(&(&a * &a) * &a))) < 1e-12);
    }

    #[test]
    fn operator_norm_of_diagonal() {
        let d = Operator::diagonal(&[-3.0, 2.0, 0.5]);
        assert!((d.op_norm() - 3.0).abs() < 1e-12);
    }
}
