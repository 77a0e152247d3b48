//! Branching and merging homology of higher-dimensional automata.
//!
//! Automata are given as combinatorially-presented flows: a finite state set
//! plus globular generator cells glued along words of lower cells. The crate
//! computes the branching and merging homology of such a presentation, checks
//! T-homotopy equivalence, assembles the long exact sequence of a morphism's
//! cone, and cross-checks the fast germ-level computation against a literal
//! coequalizer of the path complex.
//!
//! Every value is immutable after construction and every operation is a pure
//! function, so presentations, complexes, and homology tables can be shared
//! freely across threads (per-state computations parallelize naturally).

pub mod cubical;
pub mod flow;
pub mod germs;
pub mod ingest;
pub mod linalg;
pub mod randgen;

pub use cubical::{ChainComplex, PrecubicalComplex, QuotientComplex};
pub use flow::{FlowMorphism, FlowPresentation, PathComplex, RawFlow, Word};
pub use germs::{BranchingHomology, GermComplex, LesReport, Side, TReport};
pub use linalg::{AbelianGroup, IntMatrix};
