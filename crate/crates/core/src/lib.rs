//! Singularity and reduction-module analysis for scalar partial differential
//! equations in one dependent variable.

pub mod classify2;
pub mod error;
pub mod evolution;
pub mod expr;
pub mod gen;
pub mod jet;
pub mod manifold;
pub mod reduction;
pub mod vfmod;

pub use error::{Error, Result};
pub use expr::{Expr, MultiIndex, Var};
pub use jet::{JetContext, Split, SymbolDecl};
pub use vfmod::{CanonicalModule, VFModule, VectorField};
