//! Exact Sturmian lattices of quadratic slope: words, lattices, SL substitutions,
//! bounded-displacement correspondences and aperiodic patch-tile catalogs.

pub mod error;
pub mod qfield;
pub mod words;
pub mod lattice;
pub mod superlattice;
pub mod bd;
pub mod tileset;
pub mod render;
pub mod cli;

pub use error::{Error, Result};
pub use qfield::{cf_eval, cf_expand, compare, CfKind, ContinuedFraction, QuadReal};
