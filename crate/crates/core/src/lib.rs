//! Exact-arithmetic calculator and verification harness for log Calabi-Yau
//! surface constructions over the plane.
//!
//! The crate models iterated blow-ups of the plane combinatorially: an ordered
//! ledger of (possibly infinitely near) centers with proximity data, declared
//! curves with multiplicity vectors, and contractions tracked as projections
//! of the resolution lattice. On top of that sit boundary divisors, the
//! discrepancy solver, ADE classification of contracted configurations,
//! composable birational maps with torus-exceptional-degree accounting, a
//! line-oriented construction DSL, and a replay harness with bundled
//! construction fixtures.
//!
//! All arithmetic is exact: arbitrary-precision integers in the intersection
//! lattice and arbitrary-precision rationals everywhere else. There is no
//! floating point in any computation path.

pub mod ade;
pub mod elaborate;
pub mod error;
pub mod lattice;
pub mod maps;
pub mod pairs;
pub mod replay;
pub mod report;
pub mod script;
pub mod surface;

pub use ade::{classify_ade, is_a_type_only, LabelSet, SingularityLabel};
pub use elaborate::{elaborate, Elaborated};
pub use lattice::{
    arithmetic_genus, canonical_class, cremona_image, enumerate_roots, intersect, DivisorClass,
    Int, Rat,
};
pub use maps::{aggregate_cover_metrics, BirationalMap, CoverMetrics, MapStep};
pub use pairs::{DiscrepancyTable, DualComplexType, LogPair, PairClass};
pub use replay::{builtin_fixtures, gen_chain_family, gen_dn_family, run_fixture, Fixture};
pub use script::{format, parse, ConstructionScript, ScriptError};
pub use surface::{CenterSpec, ClassId, CurveRecord, Graph, MarkedSurface, ValidationReport};
