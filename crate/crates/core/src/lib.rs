//! Rank-width and bi-rank-width of edge-colored graphs over finite fields.
//!
//! Graphs carry nonzero colors from a finite field on their arcs and are
//! stored as square adjacency matrices with zero diagonal. The crate covers
//! field arithmetic, cut-rank functions, exact width search over layouts,
//! local and pivot complementation, minor and obstruction search, and the
//! bilinear-product term algebras that reconstruct graphs of bounded width.

pub mod cutrank;
pub mod error;
pub mod field;
pub mod graph;
pub mod iso;
pub mod layout;
pub mod matrix;
pub mod selfcheck;
pub mod terms;
pub mod transform;

pub use cutrank::{CutFunction, CutKind, VSet};
pub use error::{Error, Result};
pub use field::{sesqui_check, Elem, Field, QuadraticExtension, Sesquimorphism};
pub use graph::{ColoredGraph, SigmaGraph};
pub use iso::{canonical_form, isomorphic, CanonicalForm};
pub use layout::{Layout, Strategy, WidthResult};
pub use matrix::FMatrix;
pub use terms::{BiRankTerm, RankTerm};
pub use transform::{MinorAnswer, Relation};
