//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by graph validation, orbit arithmetic, and the
/// thermodynamic and recoding pipelines.
#[derive(Debug, Error)]
pub enum Error {
    /// A vertex has no outgoing or no ingoing edge.
    #[error("dangling vertex: {0} has no {1} edge")]
    DanglingVertex(String, &'static str),

    /// The same vertex label appears twice.
    #[error("duplicate vertex: {0}")]
    DuplicateVertex(String),

    /// An edge references a label that is not a vertex.
    #[error("unknown endpoint: {0}")]
    UnknownEndpoint(String),

    /// Two points over different graphs were combined.
    #[error("graph mismatch: points belong to different graphs")]
    GraphMismatch,

    /// A roof or potential table has no entry for an admissible block.
    #[error("missing block in table: {0}")]
    MissingBlock(String),

    /// A word is not a path of the graph.
    #[error("inadmissible word: no edge {0} -> {1}")]
    InadmissibleWord(String, String),

    /// First-return construction never saw the cylinder again.
    #[error("cylinder is never returned to")]
    NeverReturns,

    /// A cylinder cannot serve the requested construction.
    #[error("invalid cylinder: {0}")]
    InvalidCylinder(String),

    /// The point is not fixed by the requested power of the shift.
    #[error("point is not periodic with period {0}")]
    NotPeriodic(usize),

    /// Horizontal segments need equal heights.
    #[error("height mismatch: horizontal segments join points of equal height")]
    HeightMismatch,

    /// Vertical segments need both endpoints on one flow orbit.
    #[error("points do not lie on a common orbit")]
    NotOnOrbit,

    /// Operation requires a strongly connected graph.
    #[error("graph is not topologically transitive")]
    NotTransitive,

    /// The counting window parameter violates eps < inf(r)/10.
    #[error("epsilon too large: need eps < inf(r)/10")]
    EpsilonTooLarge,

    /// Lattice data and transfer function disagree; indicates an internal bug.
    #[error("cocycle consistency failure on edge {0} -> {1}")]
    ConsistencyFailure(String, String),

    /// A numeric or structural argument is outside the supported range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A model file or point literal failed to parse.
    #[error("parse error: {0}")]
    Parse(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
