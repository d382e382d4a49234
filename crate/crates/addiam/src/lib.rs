//! Additive diameters of group and Lie algebra representations, computed and
//! certified in exact rational arithmetic.
//!
//! The central quantity: given a representation of a group G on a space V and
//! a subspace U, the additive diameter is the least d such that d translates
//! of U under the action sum to all of V.  Everything here either produces a
//! replayable certificate (witness group elements plus an exact rank check,
//! or a structural lower-bound obstruction) or reports that nothing was
//! found; a failed random search is never treated as evidence.
//!
//! Modules:
//! - [`exactlin`]: arbitrary-precision rational matrices, fraction-free RREF,
//!   canonical subspaces.
//! - [`repkit`]: concrete representations (SL2 on binary forms, conjugation
//!   on matrix spaces) and group-element constructors.
//! - [`spaces`]: structured subspace families (upper-closed spans, block
//!   corner spaces) and stability predicates.
//! - [`groupdiam`]: diameter certificates for group actions.
//! - [`tiling`]: the combinatorial permutation-tiling chain for large block
//!   subspaces, verified on index sets.
//! - [`liediam`]: the three Lie-algebra diameter variants (elementary,
//!   monomial, associative).
//! - [`poly`]: sparse multivariate rational polynomials and trace-word
//!   expressions.
//! - [`eqmorph`]: equivariant polynomial maps, exact Jacobians, Waring-type
//!   covering bounds.
//! - [`cli`]: the command-line front end and the reproduction suite.

pub mod cli;
pub mod eqmorph;
pub mod exactlin;
pub mod groupdiam;
pub mod liediam;
pub mod poly;
pub mod repkit;
pub mod reproduce;
pub mod spaces;
pub mod tiling;

/// Crate-wide error type.  Contract violations (bad dimensions, singular
/// inputs, failed preconditions) are reported as values; internal invariant
/// breakage panics.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("singular matrix")]
    Singular,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
