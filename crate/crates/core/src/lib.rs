//! Numerics for the two-dimensional nonlinear Helmholtz equation
//! `-Δu - u = Q|u|^{p-2}u`.
//!
//! * [`specfun`]: Bessel/Hankel functions and the outgoing kernel `Phi`.
//! * [`field`]: grids, sampled fields, transforms, convolution and norms.
//! * [`resolvent`]: the outgoing resolvent, its real part, the weighted
//!   operator `K`, the `Phi = Phi1 + Phi2` split and norm experiments.
//! * [`dualvar`]: the dual functional `J`, fixed-point and dual solvers,
//!   positive subspaces and the concentration detector.
//! * [`farfield`]: restriction to the unit circle and far-field checks.
//! * [`radial`]: shooting solutions of the radial ODE used as an oracle.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dualvar;
pub mod error;
pub mod farfield;
pub mod field;
pub mod fit;
pub mod par;
pub mod radial;
pub mod resolvent;
pub mod specfun;

pub use error::{Error, Result};
pub use field::{Grid, GridField, RealField};
pub use num_complex::Complex64;
