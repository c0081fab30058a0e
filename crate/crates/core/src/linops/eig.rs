//! Hermitian eigensolver: Householder reduction to a real symmetric
//! tridiagonal matrix followed by implicit QL iteration with Wilkinson-style
//! shifts.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::operator::{Operator, Symmetry, INVARIANT_TOL};
use crate::error::{Result, ZenoError};
use crate::math::sqrt;

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    /// Eigenvectors stored contiguously, `vectors[k * n..(k + 1) * n]` is the
    /// k-th eigenvector.
    vectors: Vec<Complex64>,
    source_dim: usize,
}

impl SpectralDecomposition {
    /// Assembles a decomposition from known eigenpairs.
    ///
    /// Eigenvalues are sorted ascending; the vectors must be orthonormal.
    pub fn from_eigenpairs(mut pairs: Vec<(f64, Vec<Complex64>)>) -> Result<Self> {
        let n = pairs.len();
        if n == 0 {
            return Err(ZenoError::MalformedData("empty spectral decomposition"));
        }
        if let Some(bad) = pairs.iter().find(|(_, v)| v.len() != n) {
            return Err(ZenoError::DimensionMismatch {
                expected: n,
                found: bad.1.len(),
            });
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let spec = SpectralDecomposition {
            eigenvalues: pairs.iter().map(|p| p.0).collect(),
            vectors: pairs.into_iter().flat_map(|p| p.1).collect(),
            source_dim: n,
        };
        let defect = spec.orthonormality_defect();
        if defect > INVARIANT_TOL {
            return Err(ZenoError::NonUnitaryInput { defect });
        }
        Ok(spec)
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    /// The k-th eigenvector (matching `eigenvalues()[k]`).
    pub fn eigenvector(&self, k: usize) -> &[Complex64] {
        let n = self.source_dim;
        &self.vectors[k * n..(k + 1) * n]
    }

    /// Matrix whose columns are the eigenvectors.
    pub fn eigenvector_matrix(&self) -> Operator {
        let n = self.source_dim;
        Operator::from_fn(n, |i, k| self.vectors[k * n + i]).assume(Symmetry::Unitary)
    }

    /// `max |V^+ V - I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.source_dim;
        let mut defect: f64 = 0.0;
        for a in 0..n {
            for b in a..n {
                let dot: Complex64 = self
                    .eigenvector(a)
                    .iter()
                    .zip(self.eigenvector(b))
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let target = if a == b { 1.0 } else { 0.0 };
                defect = defect.max((dot - target).norm());
            }
        }
        defect
    }

    /// `V f(Λ) V^+` for an arbitrary spectral function.
    pub fn map(&self, f: impl Fn(f64) -> Complex64) -> Operator {
        let n = self.source_dim;
        let weights: Vec<Complex64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = Operator::zeros(n);
        for (k, w) in weights.iter().enumerate() {
            if w.re == 0.0 && w.im == 0.0 {
                continue;
            }
            let v = self.eigenvector(k);
            for i in 0..n {
                let vi = v[i] * w;
                if vi.re == 0.0 && vi.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += vi * v[j].conj();
                }
            }
        }
        out
    }

    /// `V Λ V^+`.
    pub fn reconstruct(&self) -> Operator {
        self.map(|l| Complex64::new(l, 0.0)).hermitian_part()
    }

    /// `exp(-i A t)`.
    pub fn propagator(&self, t: f64) -> Operator {
        self.map(|l| Complex64::cis(-l * t)).assume(Symmetry::Unitary)
    }

    /// Coefficients `V^+ psi` in the eigenbasis.
    pub fn to_eigenbasis(&self, psi: &[Complex64]) -> Vec<Complex64> {
        (0..self.source_dim)
            .map(|k| self.eigenvector(k).iter().zip(psi).map(|(v, p)| v.conj() * p).sum())
            .collect()
    }

    /// `V c`: back from eigenbasis coefficients.
    pub fn from_eigenbasis(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let n = self.source_dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (k, c) in coeffs.iter().enumerate() {
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            for (o, v) in out.iter_mut().zip(self.eigenvector(k)) {
                *o += v * c;
            }
        }
        out
    }

    /// `f(A) psi` without forming `f(A)`.
    pub fn apply_function(&self, f: impl Fn(f64) -> Complex64, psi: &[Complex64]) -> Vec<Complex64> {
        let mut coeffs = self.to_eigenbasis(psi);
        for (c, &l) in coeffs.iter_mut().zip(&self.eigenvalues) {
            *c *= f(l);
        }
        self.from_eigenbasis(&coeffs)
    }
}

/// Spectral decomposition of a Hermitian operator.
///
/// The input must satisfy the hermitian invariant (any tag is accepted);
/// the result is deterministic for identical input bits.
pub fn hermitian_eig(a: &Operator) -> Result<SpectralDecomposition> {
    let defect = a.hermitian_defect();
    if defect > INVARIANT_TOL {
        return Err(ZenoError::NonHermitianInput { defect });
    }
    let n = a.dim();
    let work = a.hermitian_part();
    let (diag, offdiag, mut basis) = tridiagonalize(work.into_data(), n);
    let mut d = diag;
    let mut e = offdiag;
    implicit_ql(&mut d, &mut e, Some(&mut basis), n)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| d[x].total_cmp(&d[y]).then(x.cmp(&y)));
    let eigenvalues = order.iter().map(|&k| d[k]).collect();
    let mut vectors = Vec::with_capacity(n * n);
    for &k in &order {
        vectors.extend_from_slice(&basis[k * n..(k + 1) * n]);
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        vectors,
        source_dim: n,
    })
}

/// Eigenvalues (ascending) of the real symmetric tridiagonal matrix with
/// diagonal `diag` and off-diagonal `offdiag` (`offdiag.len() == diag.len() - 1`).
pub fn symmetric_tridiagonal_eigenvalues(diag: &[f64], offdiag: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 || offdiag.len() + 1 != n {
        return Err(ZenoError::DimensionMismatch {
            expected: n.saturating_sub(1),
            found: offdiag.len(),
        });
    }
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    implicit_ql(&mut d, &mut e, None, n)?;
    d.sort_by(|a, b| a.total_cmp(b));
    Ok(d)
}

/// Reduces the Hermitian matrix `a` (row-major) to `Z S Z^+` with `S` real
/// symmetric tridiagonal. Returns `(diag(S), offdiag(S) padded with a
/// trailing zero, Z^T row-major)`, i.e. the basis is returned transposed so
/// that its columns are contiguous.
fn tridiagonalize(mut a: Vec<Complex64>, n: usize) -> (Vec<f64>, Vec<f64>, Vec<Complex64>) {
    let zero = Complex64::new(0.0, 0.0);
    // q holds the accumulated Householder product transposed: qt[j*n + i] = Q[i][j].
    let mut qt = vec![zero; n * n];
    for i in 0..n {
        qt[i * n + i] = Complex64::new(1.0, 0.0);
    }
    let mut v = vec![zero; n];
    let mut p = vec![zero; n];
    let mut dots = vec![zero; n];

    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let x0 = a[(k + 1) * n + k];
        let tail: f64 = ((k + 2)..n).map(|i| a[i * n + k].norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let sigma = sqrt(x0.norm_sqr() + tail);
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -phase * sigma;

        let v = &mut v[..m];
        for (r, vr) in v.iter_mut().enumerate() {
            *vr = a[(k + 1 + r) * n + k];
        }
        v[0] -= alpha;
        let vnorm = sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>());
        for vr in v.iter_mut() {
            *vr /= vnorm;
        }

        // Trailing block B = a[k+1.., k+1..]: B <- H B H with H = I - 2 v v^+.
        let p = &mut p[..m];
        for (r, pr) in p.iter_mut().enumerate() {
            let row = &a[(k + 1 + r) * n + k + 1..(k + 1 + r) * n + n];
            *pr = row.iter().zip(v.iter()).map(|(b, vc)| b * vc).sum();
        }
        let kappa: f64 = v
            .iter()
            .zip(p.iter())
            .map(|(vr, pr)| vr.conj() * pr)
            .sum::<Complex64>()
            .re;
        for (pr, vr) in p.iter_mut().zip(v.iter()) {
            *pr -= vr * kappa;
        }
        for r in 0..m {
            let vr2 = v[r] * 2.0;
            let pr2 = p[r] * 2.0;
            let row = &mut a[(k + 1 + r) * n + k + 1..(k + 1 + r) * n + n];
            for (c, b) in row.iter_mut().enumerate() {
                *b -= vr2 * p[c].conj() + pr2 * v[c].conj();
            }
        }
        a[(k + 1) * n + k] = alpha;
        a[k * n + k + 1] = alpha.conj();
        for i in (k + 2)..n {
            a[i * n + k] = zero;
            a[k * n + i] = zero;
        }

        // Q <- Q H acts on columns k+1..n of Q, i.e. rows k+1..n of qt.
        dots.iter_mut().for_each(|z| *z = zero);
        for r in 0..m {
            let vr = v[r];
            for (dot, q) in dots.iter_mut().zip(&qt[(k + 1 + r) * n..(k + 2 + r) * n]) {
                *dot += q * vr;
            }
        }
        for r in 0..m {
            let vr2 = v[r].conj() * 2.0;
            for (q, dot) in qt[(k + 1 + r) * n..(k + 2 + r) * n].iter_mut().zip(&dots) {
                *q -= dot * vr2;
            }
        }
    }

    // Remove the phases of the complex off-diagonal with a diagonal unitary.
    let mut diag = Vec::with_capacity(n);
    let mut offdiag = vec![0.0; n];
    let mut phi = Complex64::new(1.0, 0.0);
    for i in 0..n {
        diag.push(a[i * n + i].re);
        if i > 0 {
            for z in qt[i * n..(i + 1) * n].iter_mut() {
                *z *= phi;
            }
        }
        if i + 1 < n {
            let sub = a[(i + 1) * n + i];
            let modulus = sub.norm();
            offdiag[i] = modulus;
            if modulus > 0.0 {
                phi *= sub / modulus;
            }
        }
    }
    (diag, offdiag, qt)
}

/// Implicit QL on a symmetric tridiagonal matrix; `e[i]` couples `i` and
/// `i + 1` and `e[n - 1]` is ignored. When `basis` is given (rows are basis
/// vectors), the rotations are accumulated into it.
fn implicit_ql(d: &mut [f64], e: &mut [f64], mut basis: Option<&mut Vec<Complex64>>, n: usize) -> Result<()> {
    const MAX_SWEEPS: usize = 60;
    let eps = f64::EPSILON;
    let mut shift_total = 0.0;
    let mut tst1: f64 = 0.0;
    if n > 0 {
        e[n - 1] = 0.0;
    }

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > MAX_SWEEPS {
                    return Err(ZenoError::NoConvergence);
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = libm::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                shift_total += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = libm::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(basis) = basis.as_deref_mut() {
                        let (lo, hi) = basis.split_at_mut((i + 1) * n);
                        let vi = &mut lo[i * n..];
                        let vi1 = &mut hi[..n];
                        for (x, y) in vi.iter_mut().zip(vi1.iter_mut()) {
                            let hy = *y;
                            *y = *x * s + hy * c;
                            *x = *x * c - hy * s;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += shift_total;
        e[l] = 0.0;
    }
    Ok(())
}
