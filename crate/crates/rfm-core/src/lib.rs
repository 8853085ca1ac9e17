//! Random feature collocation for nonlinear PDEs, solved by randomized
//! sketch-preconditioned inexact Newton iterations.
//!
//! The crate has three layers:
//!
//! * dense randomized linear algebra ([`sketch`], [`qr`], [`lsqr`],
//!   [`scaling`], [`svd`]),
//! * nonlinear least-squares solvers built on top of them ([`solvers`]),
//! * a collocation discretizer for PDEs on boxes and perforated space-time
//!   domains ([`partition`], [`features`], [`geometry`], [`collocation`],
//!   [`assembly`]) with a catalog of manufactured benchmark problems
//!   ([`problems`]) and an experiment driver ([`bench`]).
//!
//! Everything is deterministic: random draws are counter-based functions of
//! explicit seeds, and the parallel kernels (rayon, behind the default
//! `parallel` feature) reduce in a fixed order.

pub mod assembly;
pub mod bench;
pub mod collocation;
pub mod error;
pub mod features;
pub mod geometry;
pub mod linesearch;
pub mod lsqr;
pub mod matrix;
pub mod ode;
mod par;
pub mod partition;
pub mod pou;
pub mod problems;
pub mod qr;
pub mod rng;
pub mod scaling;
pub mod selftest;
pub mod sketch;
pub mod solvers;
pub mod svd;

pub use error::{BenchError, LinalgError, RfmError};
pub use matrix::{DenseMatrix, LinearOperator};
pub use solvers::{
    amipn_solve, gauss_newton_solve, ipn_solve, lm_solve, NlsSystem, ScalingMode, SolverConfig,
    SolverReport, Termination,
};
