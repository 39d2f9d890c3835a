//! Machine-readable report documents with exact rationals serialized as
//! `"p/q"` strings. Field order is fixed so reserialization is byte-stable.

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::lattice::{Int, Rat};

pub fn rat_string(r: &Rat) -> String {
    if r.denom() == &Int::one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CurveReport {
    pub name: String,
    pub class: String,
    pub self_intersection: String,
    pub k_intersection: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SurfaceSection {
    pub blowups: usize,
    pub rank: usize,
    pub curves: Vec<CurveReport>,
    pub contracted: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct PairSection {
    pub boundary: Vec<BoundaryReport>,
    pub index_one: bool,
    pub complexity: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coregularity: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_complex: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct BoundaryReport {
    pub class: String,
    pub coefficient: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct MapSection {
    pub name: String,
    pub ted: String,
    pub crepant: bool,
    pub exceptional: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ExpectationReport {
    pub expectation: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RootSearchSection {
    pub blowups: usize,
    pub roots: usize,
}

/// Full report for one checked script or replayed fixture.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ReportDocument {
    pub name: String,
    pub surface: SurfaceSection,
    pub pair: PairSection,
    pub singularities: String,
    pub maps: Vec<MapSection>,
    pub expectations: Vec<ExpectationReport>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub root_search: Option<RootSearchSection>,
}
