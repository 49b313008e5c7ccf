use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed state: {0}")]
    Structural(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("parameter out of range: {0}")]
    Domain(String),

    #[error("projection did not converge after {sweeps} sweeps (worst remaining overlap {overlap:e}); try a smaller dt")]
    ProjectionFailed { sweeps: usize, overlap: f64 },

    #[error("balls {i} and {j} have coincident centers; reflection direction undefined (dt too large?)")]
    CoincidentCenters { i: usize, j: usize },

    #[error("step failed at t = {t}: {source}")]
    StepFailed {
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("need at least {needed} points above the floor, found {found}")]
    InsufficientPoints { needed: usize, found: usize },

    #[error("no sign change of U(x+1, {b}, {z}) found on [{lo}, {hi})")]
    RootNotFound { b: f64, z: f64, lo: f64, hi: f64 },

    #[error("quadrature did not reach tolerance (estimate {estimate:e}, error {error:e})")]
    Quadrature { estimate: f64, error: f64 },

    #[error("corrupt checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn at_time(self, t: f64) -> Error {
        match self {
            e @ Error::StepFailed { .. } => e,
            other => Error::StepFailed {
                t,
                source: Box::new(other),
            },
        }
    }
}
