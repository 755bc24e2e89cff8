//! Lewenstein-Sanpera splits of two-qubit density matrices with the largest separable weight.
//!
//! The separable-weight maximization is cast as a block-diagonal semidefinite
//! program and solved by the in-crate primal-dual interior-point solver in
//! [`sdp`]. The dual solution yields the optimal entanglement witness, and
//! [`verify`] re-checks every optimality condition without trusting the
//! solver.
//!
//! ```no_run
//! use lsd_core::lsd::decompose;
//! use lsd_core::sdp::SolverConfig;
//! use lsd_core::two_qubit::werner_state;
//!
//! let rho = werner_state(0.8).unwrap();
//! let dec = decompose(&rho, &SolverConfig::default()).unwrap();
//! assert!((dec.s - 0.3).abs() < 1e-6);
//! ```

#![forbid(unsafe_code)]

pub mod error;
pub mod linalg;
pub mod lsd;
pub mod sdp;
pub mod two_qubit;
pub mod verify;

pub use error::{Error, Result};
