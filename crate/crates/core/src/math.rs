//! `f64` transcendental functions for `no_std` builds.

pub(crate) use libm::{atan2, cos, exp, log, sin, sqrt};

pub(crate) const PI: f64 = core::f64::consts::PI;
