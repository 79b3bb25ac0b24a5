//! Graphs assembled by operation trees (substitution, clique gluing, gluing
//! along small vertex sets), constructive proper colorings of the results,
//! and certificates comparing the color count against bounding functions.
//!
//! The crate is organized bottom up:
//!
//! * [`graph`]: immutable vertex-labelled graphs and colorings.
//! * [`oracle`]: exact brute-force references (clique number, chromatic
//!   number, fractional chromatic number, minimum vertex cutsets).
//! * [`bounds`]: bounding functions, exact and interval evaluation,
//!   certificate checking.
//! * [`optree`]: operation trees, validation, realization, normalization,
//!   cutset decomposition.
//! * [`synthesis`]: the coloring constructions and their certificates.
//! * [`generators`]: deterministic graph and tree families for tests and
//!   experiments.

pub mod bounds;
pub mod generators;
pub mod graph;
pub mod optree;
pub mod oracle;
pub mod synthesis;

/// Exact rational arithmetic; values are always in lowest terms with a
/// positive denominator.
pub type Rational = num::BigRational;

pub use bounds::{BoundError, BoundFn, Interval, Verdict};
pub use graph::{ColorId, Coloring, Graph, GraphError, VertexId, VertexSet};
pub use optree::{Diagnostics, OpTree, TreeError};
pub use oracle::{Budget, CutsetResult, OracleError};
pub use synthesis::{Certificate, ColoringConstraint, SynthesisError, TraceData};
