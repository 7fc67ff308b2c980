//! Combinatorial engine for multiple v.p.-bridge surface diagrams.
//!
//! A diagram records the pieces of a (3-manifold, graph) pair cut along a
//! multiple v.p.-bridge surface: the thick, thin, and boundary surface
//! components, the v.p.-compressionbody summaries between them (bridge,
//! vertical, and ghost arc counts, core loops), and a transverse
//! orientation. On top of that model the crate computes the extent-based
//! invariants (net extent, width, net Euler characteristic, Gabai width,
//! per-body defect), applies the invariant-controlled rewrite moves
//! (untelescoping, consolidation, destabilizations, unperturbing),
//! builds connected sums and trivalent vertex sums, extracts prime
//! factors along thin summing spheres, evaluates the classical bounds on
//! tunnel and bridge numbers, and runs a bounded best-effort minimization
//! search over move certificates.
//!
//! All arithmetic is exact: every quantity is an integer, half-integer,
//! or quarter-integer and is stored scaled. No floating point anywhere.

pub mod bounds;
pub mod certs;
pub mod corpus;
pub mod halfint;
pub mod handle;
pub mod invariant;
pub mod model;
pub mod moves;
pub mod search;
pub mod sums;
pub mod textfmt;

pub use halfint::Half;
pub use handle::{HandleError, HandlePresentation, OneHandle, ZeroHandle};
pub use invariant::{DeltaZeroClass, IdentityCheck, InvariantError, InvariantReport};
pub use model::{
    BodyId, Compressionbody, Diagram, GhostArcGraph, GraphPairMeta, Role, SurfaceComp, SurfaceId,
    TKind, ValidationReport, Violation,
};
pub use moves::{MoveError, MoveSpec, UntelescopeSpec};
pub use search::SearchBudget;
pub use sums::{FactorizationResult, SumAttach, SumError, SumPoint};
pub use textfmt::ParseError;
