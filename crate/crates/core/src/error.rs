use thiserror::Error;

/// Errors raised by the numerical kernels and the solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular 2x2 block (det = {det:e})")]
    SingularBlock { det: f64 },

    #[error("singular matrix: pivot {pivot:e} at column {column}")]
    SingularMatrix { column: usize, pivot: f64 },

    #[error("inverse iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("continued fraction did not converge within depth {max_depth} (last change {delta:e})")]
    CfNoConvergence { max_depth: usize, delta: f64 },

    #[error("quadrature did not converge: relative change {change:e} after doubling to {nodes} nodes")]
    QuadratureNonConvergence { nodes: usize, change: f64 },

    #[error("short-range potential matrix is singular on this basis: {0}")]
    SingularPotentialMatrix(Box<Error>),

    #[error("potential evaluated outside its tabulated range at r = {r}")]
    PotentialOutOfRange { r: f64 },

    #[error("Klein-Gordon level is not real: (l+1/2)^2 - alpha^2 = {discriminant}")]
    ImaginaryRoot { discriminant: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("at binding energy {energy}: {source}")]
    AtEnergy {
        energy: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_energy(self, energy: f64) -> Self {
        match self {
            Error::AtEnergy { .. } => self,
            other => Error::AtEnergy {
                energy,
                source: Box::new(other),
            },
        }
    }

    /// The innermost error, with any energy context stripped.
    pub fn root_cause(&self) -> &Error {
        match self {
            Error::AtEnergy { source, .. } => source.root_cause(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
