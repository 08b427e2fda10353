//! Intersection type subtyping, unification constraints, two-player tiling
//! games and the reductions connecting them.

pub mod cli;
pub mod constraints;
pub mod equational;
pub mod gen;
pub mod matching;
pub mod rank1;
pub mod reduction;
pub mod subtyping;
pub mod tiling;
pub mod types;

pub use subtyping::{join_arrows, subtype, type_equal};
pub use types::{organize, parse_type, Path, Type};
