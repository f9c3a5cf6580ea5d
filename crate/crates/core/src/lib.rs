//! Exact calculator for gapped scale-sensitive dimensions, covering and
//! packing numbers, offset Rademacher complexities and minimax regression
//! regret on finite function classes, with a registry of inequality checks.

pub mod cli;
pub mod combinatorics;
pub mod constructions;
pub mod error;
pub mod games;
pub mod harness;
pub mod io;
pub mod model;
pub mod nonseq_cover;
pub mod nonseq_dims;
pub mod par;
pub mod rademacher;
pub mod rng;
pub mod rule;
pub mod sequential;

pub use error::{Error, Result};
pub use model::*;
pub use rule::DimKind;
