//! # haarlab
//!
//! Numerics for the classical compact groups SO(D), SU(D) and Sp(D).
//!
//! The crate samples Haar-random group elements and pure states, evaluates Haar
//! moments through Gaussian integration, projects onto commutants (twirling),
//! and checks concentration, state-complexity, packing and statistical-query
//! bounds against Monte Carlo estimates.
//!
//! - [`numerics`]: fields, quaternions, dense matrices, norms, seeded streams and
//!   the sharded Monte Carlo machinery.
//! - [`haar`]: Haar sampling of group elements and states.
//! - [`gaussian`]: χ² moments, normalization constants and Gaussian-integration
//!   estimators with a direct Haar oracle.
//! - [`commutant`]: first/second-moment commutant bases, exact and Monte Carlo twirls.
//! - [`concentration`]: Lévy bounds, empirical tails, design deviation bounds.
//! - [`complexity`]: strong-state-complexity probability bounds and packing counts.
//! - [`born`]: Born distributions, expected TV distance and SQ lower bounds.
//! - [`verify`]: the acceptance criteria, runnable at quick or full scale.
//!
//! Sp(D) is always parameterized by its quaternionic dimension D; its elements
//! act on ℂ^{2D}. With n qubits, SO and SU use D = 2^n and Sp uses D = 2^(n-1).

#![forbid(unsafe_code)]

pub mod born;
pub mod commutant;
pub mod complexity;
pub mod concentration;
mod error;
pub mod gaussian;
pub mod haar;
pub mod numerics;
pub mod verify;

pub use error::{Error, Result};
pub use haar::{GroupElement, GroupId, GroupKind, PureState};
pub use numerics::rng::RngStream;
pub use numerics::{AmplitudeVector, DenseMatrix, FieldTag};
