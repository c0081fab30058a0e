//! Position measurements on a periodic 1D lattice.
//!
//! Repeatedly projecting onto a window `Omega` while the particle evolves
//! freely confines it as if `Omega` had rigid walls: the Zeno product
//! `[P exp(-iHt/N) P]^N` converges to the propagator of the Dirichlet
//! Hamiltonian on the window. The momentum generator, by contrast, only
//! translates, and its projected evolution `P exp(-ipt) P` is already a
//! non-unitary semigroup for every `N`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Result, ZenoError};
use crate::linops::{
    hermitian_eig, norm, symmetric_tridiagonal_eigenvalues, Operator, SpectralDecomposition, StateVector, Symmetry,
};
use crate::math::{sqrt, PI};

pub const MIN_GRID_POINTS: usize = 16;
pub const MIN_WINDOW_POINTS: usize = 4;
/// Quadrature nodes used by [`time_averaged_defect`].
pub const DEFAULT_QUADRATURE_NODES: usize = 17;
/// Amplitude allowed outside the window for an initial state.
pub const SUPPORT_TOL: f64 = 1e-12;
/// Lattice commensurability tolerance for translation times.
pub const LATTICE_TOL: f64 = 1e-9;

/// `n` equally spaced points `x_j = j dx` on a periodic box of length `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    n_points: usize,
    box_length: f64,
    mass: f64,
    potential: Vec<f64>,
}

impl Grid1D {
    pub fn new(n_points: usize, box_length: f64, mass: f64, potential: Vec<f64>) -> Result<Self> {
        if n_points < MIN_GRID_POINTS {
            return Err(ZenoError::InvalidGrid("at least 16 grid points are required"));
        }
        if !(box_length > 0.0 && box_length.is_finite()) {
            return Err(ZenoError::InvalidGrid("box length must be positive and finite"));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(ZenoError::InvalidGrid("mass must be positive and finite"));
        }
        if potential.len() != n_points {
            return Err(ZenoError::DimensionMismatch {
                expected: n_points,
                found: potential.len(),
            });
        }
        if potential.iter().any(|v| !v.is_finite()) {
            return Err(ZenoError::InvalidGrid("potential samples must be finite"));
        }
        Ok(Grid1D {
            n_points,
            box_length,
            mass,
            potential,
        })
    }

    /// `V = 0`.
    pub fn free(n_points: usize, box_length: f64, mass: f64) -> Result<Self> {
        Grid1D::new(n_points, box_length, mass, vec![0.0; n_points])
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn dx(&self) -> f64 {
        self.box_length / self.n_points as f64
    }

    pub fn position(&self, j: usize) -> f64 {
        j as f64 * self.dx()
    }

    /// `1 / (2 m dx^2)`, the hopping amplitude.
    fn hopping(&self) -> f64 {
        let dx = self.dx();
        0.5 / (self.mass * dx * dx)
    }
}

/// Half-open index range `[lo, hi)` of the measured region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    lo: usize,
    hi: usize,
}

impl Window {
    pub fn new(lo: usize, hi: usize) -> Result<Self> {
        if hi <= lo || hi - lo < MIN_WINDOW_POINTS {
            return Err(ZenoError::WindowTooSmall {
                width: hi.saturating_sub(lo),
            });
        }
        Ok(Window { lo, hi })
    }

    /// The open interval `(a, b)`: walls sit on the grid points nearest `a`
    /// and `b`, and the window holds the points strictly between them, so
    /// the box width seen by the Dirichlet operator is exactly the distance
    /// between the walls.
    pub fn from_interval(grid: &Grid1D, a: f64, b: f64) -> Result<Self> {
        let dx = grid.dx();
        if !(a >= 0.0 && b > a && b <= grid.box_length()) {
            return Err(ZenoError::InvalidGrid("window interval must lie inside the box"));
        }
        let lo = libm::round(a / dx) as usize + 1;
        let hi = libm::round(b / dx) as usize;
        let w = Window::new(lo, hi.max(lo))?;
        w.check(grid)?;
        Ok(w)
    }

    pub fn lo(&self) -> usize {
        self.lo
    }

    pub fn hi(&self) -> usize {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, j: usize) -> bool {
        (self.lo..self.hi).contains(&j)
    }

    /// Distance between the walls, `(len + 1) dx`.
    pub fn wall_separation(&self, grid: &Grid1D) -> f64 {
        (self.len() + 1) as f64 * grid.dx()
    }

    fn check(&self, grid: &Grid1D) -> Result<()> {
        if self.hi > grid.n_points() {
            return Err(ZenoError::InvalidGrid("window extends past the grid"));
        }
        Ok(())
    }

    /// Full-grid vector from window amplitudes.
    pub fn embed(&self, grid: &Grid1D, inner: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); grid.n_points()];
        out[self.lo..self.hi].copy_from_slice(inner);
        out
    }
}

/// `-Delta / (2m) + diag(V)` with the periodic central second difference.
pub fn build_hamiltonian(grid: &Grid1D) -> Operator {
    let n = grid.n_points();
    let hop = grid.hopping();
    let mut h = Operator::zeros(n);
    for j in 0..n {
        h[(j, j)] = Complex64::new(2.0 * hop + grid.potential()[j], 0.0);
        let next = (j + 1) % n;
        h[(j, next)] = Complex64::new(-hop, 0.0);
        h[(next, j)] = Complex64::new(-hop, 0.0);
    }
    h.assume(Symmetry::Hermitian)
}

/// Diagonal 0/1 projector onto the window.
pub fn window_projector(grid: &Grid1D, w: &Window) -> Result<Operator> {
    w.check(grid)?;
    let diag: Vec<f64> = (0..grid.n_points())
        .map(|j| if w.contains(j) { 1.0 } else { 0.0 })
        .collect();
    Ok(Operator::diagonal(&diag).assume(Symmetry::Projector))
}

fn dirichlet_bands(grid: &Grid1D, w: &Window) -> (Vec<f64>, Vec<f64>) {
    let hop = grid.hopping();
    let diag = (w.lo..w.hi).map(|j| 2.0 * hop + grid.potential()[j]).collect();
    (diag, vec![-hop; w.len() - 1])
}

/// The window block `PHP` as a `len x len` operator: hard walls on both
/// sides, except for a window covering the whole box, which keeps the
/// periodic wrap.
pub fn dirichlet_block(grid: &Grid1D, w: &Window) -> Result<Operator> {
    w.check(grid)?;
    let (diag, off) = dirichlet_bands(grid, w);
    let m = w.len();
    let mut h = Operator::zeros(m);
    for i in 0..m {
        h[(i, i)] = Complex64::new(diag[i], 0.0);
        if i + 1 < m {
            h[(i, i + 1)] = Complex64::new(off[i], 0.0);
            h[(i + 1, i)] = Complex64::new(off[i], 0.0);
        }
    }
    if m == grid.n_points() {
        let hop = Complex64::new(-grid.hopping(), 0.0);
        h[(0, m - 1)] += hop;
        h[(m - 1, 0)] += hop;
    }
    Ok(h.assume(Symmetry::Hermitian))
}

/// [`dirichlet_block`] embedded in the full grid, zero outside the window.
pub fn dirichlet_hamiltonian(grid: &Grid1D, w: &Window) -> Result<Operator> {
    let block = dirichlet_block(grid, w)?;
    let mut h = Operator::zeros(grid.n_points());
    for i in 0..w.len() {
        for j in 0..w.len() {
            h[(w.lo + i, w.lo + j)] = block[(i, j)];
        }
    }
    Ok(h.assume(Symmetry::Hermitian))
}

/// Ascending eigenvalues of the Dirichlet operator on the window.
pub fn dirichlet_spectrum(grid: &Grid1D, w: &Window) -> Result<Vec<f64>> {
    w.check(grid)?;
    if w.len() == grid.n_points() {
        return Ok(hermitian_eig(&build_hamiltonian(grid))?.eigenvalues().to_vec());
    }
    let (diag, off) = dirichlet_bands(grid, w);
    symmetric_tridiagonal_eigenvalues(&diag, &off)
}

/// `k`-th Dirichlet eigenmode (ascending energy) as a full-grid state.
pub fn dirichlet_mode(grid: &Grid1D, w: &Window, k: usize) -> Result<StateVector> {
    let spec = hermitian_eig(&dirichlet_block(grid, w)?)?;
    if k >= w.len() {
        return Err(ZenoError::InvalidParameter {
            name: "mode",
            value: k as f64,
        });
    }
    StateVector::normalized(w.embed(grid, spec.eigenvector(k)))
}

/// `|<reference|psi>| / |psi|` for a normalized reference.
pub fn fidelity(reference: &[Complex64], psi: &[Complex64]) -> f64 {
    let overlap: Complex64 = reference.iter().zip(psi).map(|(a, b)| a.conj() * b).sum();
    overlap.norm() / norm(psi)
}

/// `w x w` block `P exp(-i A t) P` on the window, row-major.
fn window_block(spec: &SpectralDecomposition, w: &Window, t: f64) -> Vec<Complex64> {
    let m = w.len();
    let mut block = vec![Complex64::new(0.0, 0.0); m * m];
    for (k, &e) in spec.eigenvalues().iter().enumerate() {
        let v = &spec.eigenvector(k)[w.lo..w.hi];
        let phase = Complex64::cis(-e * t);
        for i in 0..m {
            let a = v[i] * phase;
            let row = &mut block[i * m..(i + 1) * m];
            for (b, vj) in row.iter_mut().zip(v) {
                *b += a * vj.conj();
            }
        }
    }
    block
}

fn block_apply(block: &[Complex64], x: &[Complex64]) -> Vec<Complex64> {
    let m = x.len();
    (0..m)
        .map(|i| block[i * m..(i + 1) * m].iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

fn block_mul(a: &[Complex64], b: &[Complex64], m: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); m * m];
    for i in 0..m {
        let row = &mut out[i * m..(i + 1) * m];
        for k in 0..m {
            let aik = a[i * m + k];
            for (o, bkj) in row.iter_mut().zip(&b[k * m..(k + 1) * m]) {
                *o += aik * bkj;
            }
        }
    }
    out
}

fn block_operator(block: Vec<Complex64>, m: usize) -> Operator {
    Operator::from_fn(m, |i, j| block[i * m + j])
}

/// Lattice Hamiltonian with its spectral decomposition, reused across
/// windows, step counts and times.
#[derive(Debug, Clone)]
pub struct SpatialSystem {
    grid: Grid1D,
    spec: SpectralDecomposition,
}

impl SpatialSystem {
    pub fn new(grid: &Grid1D) -> Result<Self> {
        Ok(SpatialSystem {
            spec: hermitian_eig(&build_hamiltonian(grid))?,
            grid: grid.clone(),
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spec
    }

    fn prepare(&self, w: &Window, psi0: &StateVector) -> Result<Vec<Complex64>> {
        w.check(&self.grid)?;
        if 2 * w.len() > self.grid.n_points() && w.len() != self.grid.n_points() {
            return Err(ZenoError::InvalidGrid(
                "the box must be at least twice as wide as a partial window",
            ));
        }
        if psi0.dim() != self.grid.n_points() {
            return Err(ZenoError::DimensionMismatch {
                expected: self.grid.n_points(),
                found: psi0.dim(),
            });
        }
        let outside = psi0
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(j, _)| !w.contains(*j))
            .map(|(_, a)| a.norm_sqr())
            .sum::<f64>();
        if sqrt(outside) > SUPPORT_TOL {
            return Err(ZenoError::MalformedData(
                "initial state must be supported in the window",
            ));
        }
        Ok(psi0.amplitudes()[w.lo..w.hi].to_vec())
    }

    /// Window amplitudes after each of the `N` steps of
    /// `[P exp(-iHt/N) P]^N`; `norms[k]` is the norm after `k` steps.
    fn product_inner(&self, w: &Window, n: u32, t: f64, psi0: &StateVector) -> Result<(Vec<Complex64>, Vec<f64>)> {
        if n == 0 {
            return Err(ZenoError::InvalidParameter { name: "N", value: 0.0 });
        }
        let mut psi = self.prepare(w, psi0)?;
        let block = window_block(&self.spec, w, t / n as f64);
        let mut norms = Vec::with_capacity(n as usize + 1);
        norms.push(norm(&psi));
        for _ in 0..n {
            psi = block_apply(&block, &psi);
            norms.push(norm(&psi));
        }
        Ok((psi, norms))
    }

    /// Surviving full-grid vector `[P exp(-iHt/N) P]^N psi0`.
    pub fn zeno_product(&self, w: &Window, n: u32, t: f64, psi0: &StateVector) -> Result<Vec<Complex64>> {
        let (psi, _) = self.product_inner(w, n, t, psi0)?;
        Ok(w.embed(&self.grid, &psi))
    }

    /// Norm of the surviving vector after every step, starting with `|psi0|`.
    pub fn zeno_product_norms(&self, w: &Window, n: u32, t: f64, psi0: &StateVector) -> Result<Vec<f64>> {
        Ok(self.product_inner(w, n, t, psi0)?.1)
    }

    /// `exp(-i H_D t) psi0` with `H_D` the Dirichlet operator on the window.
    pub fn dirichlet_evolve(&self, w: &Window, t: f64, psi0: &StateVector) -> Result<Vec<Complex64>> {
        let inner = self.prepare(w, psi0)?;
        let spec = hermitian_eig(&dirichlet_block(&self.grid, w)?)?;
        Ok(w.embed(&self.grid, &spec.apply_function(|l| Complex64::cis(-l * t), &inner)))
    }

    /// Trapezoid rule with `nodes` equally spaced nodes for
    /// `int_0^t_max |V_N(t) psi0 - exp(-i H_D t) psi0|^2 dt`.
    pub fn time_averaged_defect(
        &self,
        w: &Window,
        n: u32,
        t_max: f64,
        psi0: &StateVector,
        nodes: usize,
    ) -> Result<f64> {
        if !(t_max >= 0.0 && t_max.is_finite()) {
            return Err(ZenoError::InvalidParameter {
                name: "t_max",
                value: t_max,
            });
        }
        if nodes < 2 {
            return Err(ZenoError::InvalidParameter {
                name: "nodes",
                value: nodes as f64,
            });
        }
        let inner = self.prepare(w, psi0)?;
        if t_max == 0.0 {
            return Ok(0.0);
        }
        let dirichlet = hermitian_eig(&dirichlet_block(&self.grid, w)?)?;
        let h = t_max / (nodes - 1) as f64;
        let mut total = 0.0;
        for k in 0..nodes {
            let t = k as f64 * h;
            let zeno = if k == 0 {
                inner.clone()
            } else {
                self.product_inner(w, n, t, psi0)?.0
            };
            let reference = dirichlet.apply_function(|l| Complex64::cis(-l * t), &inner);
            let diff: f64 = zeno.iter().zip(&reference).map(|(a, b)| (a - b).norm_sqr()).sum();
            let weight = if k == 0 || k == nodes - 1 { 0.5 } else { 1.0 };
            total += weight * diff;
        }
        Ok(total * h)
    }
}

/// See [`SpatialSystem::zeno_product`].
pub fn spatial_zeno_product(grid: &Grid1D, w: &Window, n: u32, t: f64, psi0: &StateVector) -> Result<Vec<Complex64>> {
    SpatialSystem::new(grid)?.zeno_product(w, n, t, psi0)
}

/// See [`SpatialSystem::time_averaged_defect`]; uses
/// [`DEFAULT_QUADRATURE_NODES`] nodes.
pub fn time_averaged_defect(grid: &Grid1D, w: &Window, n: u32, t_max: f64, psi0: &StateVector) -> Result<f64> {
    SpatialSystem::new(grid)?.time_averaged_defect(w, n, t_max, psi0, DEFAULT_QUADRATURE_NODES)
}

/// Momentum `p = -i d/dx` on the periodic lattice, diagonal in the discrete
/// Fourier basis with wavenumbers folded into `(-n/2, n/2]`.
pub fn spectral_momentum(grid: &Grid1D) -> Result<SpectralDecomposition> {
    let n = grid.n_points();
    let norm = 1.0 / sqrt(n as f64);
    let pairs = (0..n)
        .map(|k| {
            let folded = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
            let p = 2.0 * PI * folded / grid.box_length();
            let v = (0..n)
                .map(|j| Complex64::from_polar(norm, 2.0 * PI * ((k * j) % n) as f64 / n as f64))
                .collect();
            (p, v)
        })
        .collect();
    SpectralDecomposition::from_eigenpairs(pairs)
}

/// Outcome of [`translation_semigroup_demo`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TranslationReport {
    pub t: f64,
    pub s: f64,
    /// `|V(t) V(s) - V(t+s)|` in operator norm, `V(t) = P exp(-ipt) P`.
    pub semigroup_defect: f64,
    /// `|<u|V(t)|u>|^2` for the uniform state `u` on the window.
    pub survival: f64,
    /// Number of factors `N` compared against `N = 1`.
    pub n_compared: u32,
    /// Entrywise `max |V_N(t) - V_1(t)|`.
    pub n_dependence: f64,
    pub n_independent: bool,
}

fn lattice_steps(x: f64, dx: f64) -> Result<u64> {
    let steps = libm::round(x / dx);
    if !(x >= 0.0) || (x - steps * dx).abs() > LATTICE_TOL {
        return Err(ZenoError::NonLatticeTime { t: x, dx });
    }
    Ok(steps as u64)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Projected translations `P exp(-ipt) P` on a fixed window, sharing one
/// momentum decomposition across evaluations.
#[derive(Debug, Clone)]
pub struct TranslationDemo {
    grid: Grid1D,
    window: Window,
    momentum: SpectralDecomposition,
}

impl TranslationDemo {
    pub fn new(grid: &Grid1D, w: &Window) -> Result<Self> {
        w.check(grid)?;
        if 2 * w.len() > grid.n_points() {
            return Err(ZenoError::InvalidGrid(
                "the box must be at least twice as wide as the window",
            ));
        }
        Ok(TranslationDemo {
            momentum: spectral_momentum(grid)?,
            grid: grid.clone(),
            window: *w,
        })
    }

    fn block(&self, t: f64) -> Vec<Complex64> {
        window_block(&self.momentum, &self.window, t)
    }

    /// `|<u|V(t)|u>|^2` for the uniform window state `u`; `t` must be a whole
    /// number of lattice steps no longer than the window.
    pub fn survival(&self, t: f64) -> Result<f64> {
        let steps = lattice_steps(t, self.grid.dx())? as usize;
        if steps > self.window.len() {
            return Err(ZenoError::InvalidParameter { name: "t", value: t });
        }
        let m = self.window.len();
        let amp: Complex64 = self.block(t).iter().sum::<Complex64>() / m as f64;
        Ok(amp.norm_sqr())
    }

    /// Checks the semigroup law, the survival of the uniform window state
    /// and `N`-independence of the Zeno product at `t`. `t` and `s` must be
    /// whole lattice steps with `t + s` at most the window length.
    pub fn report(&self, t: f64, s: f64) -> Result<TranslationReport> {
        let dx = self.grid.dx();
        let (mt, ms) = (lattice_steps(t, dx)?, lattice_steps(s, dx)?);
        if (mt + ms) as usize > self.window.len() {
            return Err(ZenoError::InvalidParameter {
                name: "t+s",
                value: t + s,
            });
        }
        let m = self.window.len();
        let vt = self.block(t);
        let composed = block_mul(&vt, &self.block(s), m);
        let diff: Vec<Complex64> = composed.iter().zip(&self.block(t + s)).map(|(a, b)| a - b).collect();
        let semigroup_defect = block_operator(diff, m).op_norm();

        let amp: Complex64 = vt.iter().sum::<Complex64>() / m as f64;
        let survival = amp.norm_sqr();

        let n_compared = gcd(mt, 16).max(1) as u32;
        let vn = block_operator(self.block(t / n_compared as f64), m).pow(n_compared as usize);
        let n_dependence = vn.max_abs_diff(&block_operator(vt, m));
        Ok(TranslationReport {
            t,
            s,
            semigroup_defect,
            survival,
            n_compared,
            n_dependence,
            n_independent: n_dependence <= 1e-10,
        })
    }
}

/// See [`TranslationDemo::report`].
pub fn translation_semigroup_demo(grid: &Grid1D, w: &Window, t: f64, s: f64) -> Result<TranslationReport> {
    TranslationDemo::new(grid, w)?.report(t, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::cos;

    fn small() -> Grid1D {
        Grid1D::free(64, 2.0, 1.0).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(Grid1D::free(8, 1.0, 1.0).is_err());
        assert!(Grid1D::free(32, 0.0, 1.0).is_err());
        assert!(Grid1D::free(32, 1.0, -1.0).is_err());
        assert!(Grid1D::new(32, 1.0, 1.0, vec![f64::NAN; 32]).is_err());
        assert!(Window::new(3, 6).is_err());
        assert!(window_projector(&small(), &Window::new(60, 70).unwrap()).is_err());
    }

    #[test]
    fn interval_windows_put_walls_on_grid_points() {
        let grid = Grid1D::free(512, 2.0, 1.0).unwrap();
        let w = Window::from_interval(&grid, 0.5, 1.5).unwrap();
        assert_eq!((w.lo(), w.hi()), (129, 384));
        assert!((w.wall_separation(&grid) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn free_periodic_spectrum() {
        let grid = Grid1D::free(256, 2.0, 1.0).unwrap();
        let spec = hermitian_eig(&build_hamiltonian(&grid)).unwrap();
        assert!(spec.eigenvalues()[0].abs() < 1e-9);
        let dx = grid.dx();
        let k1 = 0.5 * (2.0 / (dx * dx)) * (1.0 - cos(2.0 * PI * dx / 2.0));
        // Modes ±1 are degenerate and come right after the constant mode.
        assert!((spec.eigenvalues()[1] - k1).abs() < 1e-8 * k1);
        assert!((spec.eigenvalues()[2] - k1).abs() < 1e-8 * k1);
    }

    #[test]
    fn constant_potential_shifts_spectrum() {
        let free = hermitian_eig(&build_hamiltonian(&small())).unwrap();
        let shifted = Grid1D::new(64, 2.0, 1.0, vec![0.75; 64]).unwrap();
        let spec = hermitian_eig(&build_hamiltonian(&shifted)).unwrap();
        for (a, b) in free.eigenvalues().iter().zip(spec.eigenvalues()) {
            assert!((b - a - 0.75).abs() < 1e-9);
        }
    }

    #[test]
    fn projector_examples() {
        let grid = Grid1D::free(256, 2.0, 1.0).unwrap();
        let p = window_projector(&grid, &Window::new(64, 192).unwrap()).unwrap();
        assert_eq!(p.trace().re, 128.0);
        assert_eq!((&p * &p).max_abs_diff(&p), 0.0);
        let full = window_projector(&small(), &Window::new(0, 64).unwrap()).unwrap();
        assert_eq!(full.max_abs_diff(&Operator::identity(64)), 0.0);
    }

    #[test]
    fn dirichlet_spectrum_matches_box() {
        let grid = Grid1D::free(1024, 2.0, 1.0).unwrap();
        let w = Window::from_interval(&grid, 0.5, 1.5).unwrap();
        let e = dirichlet_spectrum(&grid, &w).unwrap();
        let box_e1 = PI * PI / 2.0;
        assert!((e[0] - box_e1).abs() < 1e-4 * box_e1);
        assert!((e[1] / e[0] - 4.0).abs() < 0.04);
        let h = dirichlet_hamiltonian(&grid, &w).unwrap();
        assert_eq!(h[(w.lo() - 1, w.lo())], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn dirichlet_modes_vanish_outside() {
        let grid = small();
        let w = Window::new(16, 48).unwrap();
        let mode = dirichlet_mode(&grid, &w, 0).unwrap();
        assert!(mode.amplitudes()[..16].iter().all(|a| a.norm() == 0.0));
        let e = dirichlet_spectrum(&grid, &w).unwrap();
        let h = dirichlet_hamiltonian(&grid, &w).unwrap();
        let hv = h.apply(mode.amplitudes());
        let r: Vec<Complex64> = hv.iter().zip(mode.amplitudes()).map(|(a, b)| a - b * e[0]).collect();
        assert!(norm(&r) < 1e-9 * e[0]);
    }

    #[test]
    fn full_window_is_unitary() {
        let grid = Grid1D::free(32, 2.0, 1.0).unwrap();
        let sys = SpatialSystem::new(&grid).unwrap();
        let w = Window::new(0, 32).unwrap();
        let psi0 = dirichlet_mode(&grid, &Window::new(8, 24).unwrap(), 0).unwrap();
        let norms = sys.zeno_product_norms(&w, 50, 0.3, &psi0).unwrap();
        assert!(norms.iter().all(|n| (n - 1.0).abs() < 1e-12));
        assert!(sys.time_averaged_defect(&w, 10, 0.3, &psi0, 9).unwrap() < 1e-9);
        assert_eq!(sys.time_averaged_defect(&w, 10, 0.0, &psi0, 5).unwrap(), 0.0);
    }

    #[test]
    fn support_is_enforced() {
        let grid = small();
        let sys = SpatialSystem::new(&grid).unwrap();
        let w = Window::new(16, 48).unwrap();
        assert!(sys.zeno_product(&w, 4, 0.1, &StateVector::basis(64, 3)).is_err());
        let wide = Window::new(10, 50).unwrap();
        assert!(matches!(
            sys.zeno_product(&wide, 4, 0.1, &StateVector::basis(64, 3)),
            Err(ZenoError::InvalidGrid(_))
        ));
    }

    #[test]
    fn translations_are_exact_shifts() {
        let grid = Grid1D::free(64, 2.0, 1.0).unwrap();
        let w = Window::new(16, 48).unwrap();
        let report = translation_semigroup_demo(&grid, &w, 0.25, 0.25).unwrap();
        // Window of 32 points, shift of 8: survival (24/32)^2.
        assert!((report.survival - 0.5625).abs() < 1e-12);
        assert!(report.semigroup_defect < 1e-9);
        assert!(report.n_independent);
        let zero = translation_semigroup_demo(&grid, &w, 0.0, 0.0).unwrap();
        assert!((zero.survival - 1.0).abs() < 1e-12);
        assert!(matches!(
            translation_semigroup_demo(&grid, &w, 0.01, 0.0),
            Err(ZenoError::NonLatticeTime { .. })
        ));
    }
}
