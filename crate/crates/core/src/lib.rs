//! Reliability of a k-out-of-n system of exchangeable, copula-dependent
//! components equipped with one cold standby unit.
//!
//! The analytic routes ([`reliability`], [`mrl`]) reduce every multiple
//! integral to one- or two-dimensional adaptive quadrature; [`simulate`]
//! samples the joint lifetime model directly and serves as an independent
//! check on all of them.

pub mod cli;
pub mod config;
pub mod copulas;
pub mod engine;
pub mod error;
pub mod marginals;
pub mod mrl;
pub mod reliability;
pub mod simulate;
pub mod system;

pub use copulas::{CopulaModel, Fgm4Params, ValidityReport};
pub use engine::{EvalConfig, EvalPath, Estimate};
pub use error::{Error, Result};
pub use marginals::MarginalModel;
pub use system::SystemSpec;
