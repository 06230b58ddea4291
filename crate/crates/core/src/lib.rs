//! Feedback-based quantum optimization (FALQON and its constrained variants)
//! on an exact statevector simulator.
//!
//! The crate covers the whole pipeline: constrained binary problems and their
//! penalty conversion ([`problem`]), Pauli-sum Hamiltonians ([`pauli`]), the
//! Lyapunov observables ([`observable`]), the layered evolution engine
//! ([`simulator`]), feedback laws ([`control`]), the layer-by-layer drivers
//! ([`algorithms`]), brute-force ground truth and resource counts
//! ([`oracle`]) and the benchmark protocols ([`experiments`]).

// `!(x > 0.0)` is used on purpose so NaN is rejected too; index loops mirror the matrix algebra.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod algorithms;
pub mod bits;
pub mod control;
pub mod error;
pub mod experiments;
pub mod observable;
pub mod oracle;
pub mod pauli;
pub mod problem;
pub mod simulator;

pub use error::{Error, Result};
