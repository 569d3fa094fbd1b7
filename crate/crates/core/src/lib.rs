//! Finite pocsets, their dual CAT(0) cube complexes, quotients by admissible
//! equivalence relations, and Stallings-style folding of equivariant
//! resolutions.

pub mod action;
pub mod complex;
pub mod fold;
pub mod io;
pub mod maps;
pub mod pocset;
pub mod quotient;
mod unionfind;

pub use action::{validate_action, GroupAction, Permutation};
pub use complex::{dual_complex, CubeComplex, Ultrafilter, DEFAULT_VERTEX_CAP};
pub use maps::PocsetMap;
pub use pocset::{validate_pocset, HalfspaceId, HyperplaneId, Pocset, RawPocset};
pub use quotient::{quotient_pocset, EquivalenceRelation, Quotient};
pub use fold::{elementary_fold, find_foldable_pairs, fold_to_target, folding_sequence, FoldConfig, FoldError, FoldTrace, ResolutionState};
pub use io::{RunConfig, Workspace};
