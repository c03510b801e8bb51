//! A workbench for finitary operations and relations on small finite
//! universes `{0, 1, ..., m-1}`.
//!
//! The library computes arity-by-arity fragments of clones (sets of
//! operations containing the projections and closed under composition),
//! the Pol-Inv Galois connection between operations and relations, and
//! membership in *local* closures, where an operation belongs as soon as
//! every restriction to a finite domain is interpolated by a clone member.
//!
//! On top of that sit the concrete families the workbench exists to probe:
//!
//! * bounded / growth operation families over ordered windows
//!   ([`constructions::WitnessFamily`]) and their interpolants,
//! * translation clones over finitely generated abelian groups
//!   ([`group`], [`constructions::translation_op`]),
//! * indicator operations and patched ("projection off a block") operations,
//! * partial operations with explicit finite domains and the restriction
//!   map from clones to partial clones ([`partial`]),
//! * pairwise order checks between finitely generated clones, joins, meets,
//!   antichain and covering probes, and DOT export ([`lattice`]).
//!
//! Everything is exact and deterministic: sets are kept in sorted order,
//! random sampling is seeded, and every closure takes an explicit budget and
//! reports `BudgetExceeded` instead of silently truncating.

pub mod constructions;
pub mod error;
mod frontier;
pub mod galois;
pub mod group;
pub mod lattice;
pub mod operation;
pub mod partial;
pub mod relation;
pub mod sampling;
pub mod universe;

pub use error::Error;
pub use operation::{agree_on, compose, OpTable, Operation};
pub use relation::{preserves, Relation};
pub use universe::Universe;

/// Default ceiling for closure sizes (tables in a fragment, tuples in a
/// generated relation, members of a partial clone).
pub const DEFAULT_BUDGET: usize = 1_000_000;

/// Shorthand used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
