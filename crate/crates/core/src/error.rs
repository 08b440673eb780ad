use thiserror::Error;

/// Errors raised while building digraphs or evaluating forest matrices.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("vertex count must be at least 2, got {0}")]
    TooFewVertices(usize),

    #[error("loop arc at vertex {0}")]
    LoopArc(usize),

    #[error("duplicate arc ({0}, {1})")]
    DuplicateArc(usize, usize),

    #[error("arc ({tail}, {head}) has nonpositive weight {weight}")]
    NonPositiveWeight { tail: usize, head: usize, weight: f64 },

    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("numerical breakdown in forest recurrence at k = {k}: sigma ratio {ratio}")]
    NumericalBreakdown { k: usize, ratio: f64 },

    #[error("algebraic forest dimension {algebraic} disagrees with source-knot count {structural}")]
    DimensionMismatch { algebraic: usize, structural: usize },

    #[error("identity check '{identity}' failed: deviation {deviation:e} exceeds {tolerance:e}")]
    IdentityViolated {
        identity: &'static str,
        deviation: f64,
        tolerance: f64,
    },

    #[error("parameter {name} = {value} is outside its admissible range {range}")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        range: String,
    },

    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("enumeration limit exceeded: {0}")]
    EnumerationLimit(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("digraph is not strongly connected ({knots} source knots, {components} strong components)")]
    NotStrong { knots: usize, components: usize },

    #[error("Cesaro average did not converge: residual {residual:e} after T = {iterations}")]
    NoConvergence { residual: f64, iterations: u64 },

    #[error("unknown condition '{0}'")]
    UnknownCondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
