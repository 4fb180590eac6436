//! Simulation and analysis toolkit for distributed intelligent reflecting
//! surfaces (IRSs) shared by two mobile operators on non-overlapping mmWave
//! bands.
//!
//! Operator X owns and configures the IRSs for its scheduled user; operator
//! Y is out-of-band (OOB) and sees the surfaces as randomly configured
//! reflectors. The crate provides:
//!
//! - [`scenario`]: topology, path loss and experiment configuration.
//! - [`channel`]: Saleh-Valenzuela channels over a discrete angle-book.
//! - [`irs`]: optimal/random phase configurations and effective channels.
//! - [`analysis`]: closed-form ergodic rate laws, outage law, design rule.
//! - [`montecarlo`]: slot-level experiments with deterministic reduction.
//! - [`checks`]: a fast invariant suite used by the `validate` command.

pub mod analysis;
pub mod channel;
pub mod checks;
pub mod error;
pub mod irs;
pub mod montecarlo;
pub mod quadrature;
pub mod rng;
pub mod scenario;

pub use error::{Error, Result};
