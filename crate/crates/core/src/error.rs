//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("ambient blow-up counts differ: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("repeated Cremona center index")]
    RepeatedIndex,
    #[error("index {index} out of range for {len} blow-ups")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("root system is infinite for n = {n} > 8")]
    RootSystemInfinite { n: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("center `{center}` references `{what}` which is not in the ledger yet")]
    DanglingReference { center: String, what: String },
    #[error("center `{0}` is already blown up")]
    AlreadyBlownUp(String),
    #[error("class `{0}` is already contracted")]
    AlreadyContracted(String),
    #[error("classes are not contractible: {0}")]
    NotContractible(String),
    #[error("unknown curve `{0}`")]
    UnknownCurve(String),
    #[error("negative pairing {pairing} between `{left}` and `{right}` in dual graph")]
    NegativeEdge {
        left: String,
        right: String,
        pairing: String,
    },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PairError {
    #[error("contracted classes do not form a negative definite system")]
    NotNegativeDefinite,
    #[error("discrepancy system is singular")]
    SingularSystem,
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("boundary is not reduced (a coefficient differs from 0 and 1)")]
    NonReducedBoundary,
    #[error("boundary dual graph does not match a recognized shape")]
    UnrecognizedShape,
    #[error("input graph is not a connected negative definite (-2)-configuration: {0}")]
    NotAde(String),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("cremona centers must be distinct declared proper points: {0}")]
    BadCremonaCenters(String),
    #[error("cremona centers lie on the declared line `{0}`")]
    CollinearCenters(String),
    #[error("auto line name `{0}` is already taken")]
    AutoLineNameTaken(String),
    #[error("cover aggregation requires crepant maps from the same pair: {0}")]
    BadCoverInput(String),
    #[error(transparent)]
    Pair(#[from] PairError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}
