//! Certification toolkit for local null controllability of control-affine
//! systems `x' = f(x) + B u + w(t)` on a finite horizon `[0, T]`.
//!
//! The crate is organised around the certification pipeline:
//!
//! * [`vecfield`] — a small expression language for vector fields and time
//!   signals, with exact symbolic differentiation (Jacobians, Hessians and
//!   Taylor-remainder coefficients).
//! * [`linalg`] — dense real-matrix kernel for small state dimensions:
//!   spectral norm, eigendecomposition, controllability matrix, rank and
//!   eigenvector condition number.
//! * [`gronwall`] — the Gronwall-type bound used by the certification
//!   argument, with quadrature and an ODE equality-case oracle.
//! * [`synthesize`] — constant-gain state-feedback synthesis (diagonal
//!   closed loop for invertible input matrices, Ackermann for single-input
//!   systems) and validation of user-supplied gains.
//! * [`certify`] — hypothesis checks, certificate constants, the admissible
//!   frequency window, the certified region radius, and the global
//!   controllability criterion.
//! * [`simulate`] — closed-loop integration in singularity-free rescaled
//!   time, the guaranteed decay envelope, trajectory export and batch runs.
//!
//! Grid searches and batch simulations run data-parallel through rayon when
//! the default `parallel` feature is enabled; disabling it yields a fully
//! sequential build with identical results.

pub mod certify;
pub mod gronwall;
pub mod linalg;
mod par;
pub mod simulate;
pub mod synthesize;
pub mod util;
pub mod vecfield;

pub use certify::{certify, certify_at, Certificate, CertificationProblem, DisturbanceBound};
pub use linalg::Matrix;
pub use simulate::{simulate_closed_loop, DisturbanceModel, Trajectory};
pub use vecfield::{Expression, VectorField};
