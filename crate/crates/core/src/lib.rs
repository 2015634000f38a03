//! Exact sampling of Schur processes, two-sided Schur processes and the
//! Markov dynamics that preserve them.

pub mod cli;
pub mod combinatorics;
pub mod dynamics;
pub mod error;
pub mod kernels;
pub mod measure;
pub mod oracle;
pub mod samplers;
pub mod schur_eval;
pub mod specializations;
pub mod suite;

pub use error::{Error, Result};
