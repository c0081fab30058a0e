//! Numerical laboratory for quantum Zeno dynamics.
//!
//! Everything here is a pure function of its inputs and builds on `core` +
//! `alloc` only; file formats, configuration and the command line live in the
//! `zenolab` companion crate.
//!
//! Units are natural (`ħ = 1`) and dimensionless throughout.
//!
//! * [`linops`]: dense complex operators, Hermitian eigendecomposition,
//!   propagators and projectors.
//! * [`survival`]: single-state survival analytics, Zeno time, effective
//!   decay rate and the Zeno/inverse-Zeno transition time.
//! * [`zeno_limit`]: the product `(P e^{-iHt/N} P)^N`, its limit and
//!   convergence diagnostics.
//! * [`subspaces`]: nonselective measurement channels over a partition of
//!   the Hilbert space.
//! * [`control`]: bang-bang kicks, strong continuous coupling and the hybrid
//!   pulse train that connects them.
//! * [`spatial`]: position measurements on a 1D lattice and the hard-wall
//!   limit.
//! * [`models`]: the worked examples used as presets and test fixtures.
#![no_std]
// NaN must fail range checks, so `!(x > 0.0)` is intended.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
mod math;

pub mod control;
pub mod linops;
pub mod models;
pub mod random;
pub mod spatial;
pub mod subspaces;
pub mod survival;
pub mod zeno_limit;

pub use error::{Result, ZenoError};
pub use linops::{DensityMatrix, Operator, SpectralDecomposition, StateVector, Symmetry};
pub use num_complex::Complex64;
