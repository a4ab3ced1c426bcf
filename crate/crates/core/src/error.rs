use thiserror::Error;

/// Pipeline stage tags for the extension workflow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Precondition,
    Reconstruct,
    Fitzpatrick,
    Conjugate,
    ProximalAverage,
    Extract,
    Query,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Stage::Precondition => "precondition",
            Stage::Reconstruct => "reconstruct",
            Stage::Fitzpatrick => "fitzpatrick",
            Stage::Conjugate => "conjugate",
            Stage::ProximalAverage => "proximal-average",
            Stage::Extract => "extract",
            Stage::Query => "query",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operator is not admissible: {0}")]
    NotAdmissible(String),

    #[error("graph sample is not monotone: pair ({i}, {j}) has product {value:e}")]
    NotMonotone { i: usize, j: usize, value: f64 },

    #[error("point is not in the graph sample")]
    NotInSample,

    #[error("point lies outside the domain of the resolvent")]
    NoSolution,

    #[error("domain membership is unknown for sampled operators")]
    UnknownDomain,

    #[error("no closed form or numeric route for this operator pair: {0}")]
    Unsupported(String),

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    Divergence { iterations: usize, residual: f64 },

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("contraction bound violated at step {step}: ratio {ratio} > bound {bound}")]
    BoundViolated { step: usize, ratio: f64, bound: f64 },

    #[error("grid bound too small: {0}")]
    BoundTooSmall(String),

    #[error("grid resolution {0} is too small (need an odd value >= 9)")]
    ResolutionTooSmall(usize),

    #[error("graph extraction produced no points; check eps or grid")]
    EmptyExtraction,

    #[error("extension stage `{stage}` failed: {source}")]
    Extension {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },

    #[error("{0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn at(self, stage: Stage) -> Error {
        match self {
            e @ Error::Extension { .. } => e,
            e => Error::Extension {
                stage,
                source: Box::new(e),
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
