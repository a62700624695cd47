use thiserror::Error;

/// Grid node as `(i, j)`, `i` along x and `j` along y.
pub type Node = (usize, usize);

#[derive(Debug, Error)]
pub enum Error {
    #[error("minkowski_model: point is not on the hyperboloid (residual {residual:e})")]
    NotOnHyperboloid { residual: f64 },

    #[error("minkowski_model: matrix is not on the expected adjoint orbit ({reason})")]
    NotOnOrbit { reason: String },

    #[error("quadratic_differential: z = {re}{im:+}i lies outside the declared domain")]
    OutOfDomain { re: f64, im: f64 },

    #[error("gauss_solver: grid touches or leaves the unit disk at node {node:?}")]
    DomainViolation { node: Node },

    #[error("{module}: no convergence: {reason}")]
    NonConvergence { module: &'static str, reason: String },

    #[error("gauss_solver: immersion condition e^(2u) > |Q|^2 violated at node {node:?}")]
    ImmersionViolated { node: Node },

    #[error("lax_frame: e^u - |Q|^2 e^-u is not positive at node {node:?}")]
    DegenerateDenominator { node: Node },

    #[error("lax_frame: spectral parameter must be nonzero")]
    ZeroLambda,

    #[error("surface_builder: |det f - 1| = {drift:e} at node {node:?}")]
    HyperboloidDrift { node: Node, drift: f64 },

    #[error("surface_builder: first fundamental form degenerate at node {node:?}")]
    DegenerateMetric { node: Node },

    #[error("surface_builder: quadratic differential is not invariant under the {n_fold}-fold rotation")]
    NotInvariant { n_fold: usize },

    #[error("{module}: curvature K = {k} is out of range")]
    OutOfRange { module: &'static str, k: f64 },

    #[error("gauss_maps: |lambda_1| must differ from 1 (got {modulus})")]
    OnUnitCircle { modulus: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("config parse error: {0}")]
    Parse(String),

    #[error("config validation error at `{key}`: {message}")]
    Validation { key: String, message: String },

    #[error("config validation failed:{}", itemize(items))]
    Invalid { items: Vec<(String, String)> },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    pub(crate) fn validation(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            key: key.into(),
            message: message.into(),
        }
    }
}

fn itemize(items: &[(String, String)]) -> String {
    items.iter().map(|(k, m)| format!("\n  `{k}`: {m}")).collect()
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
