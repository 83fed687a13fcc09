use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {x} lies outside the domain of the map")]
    OutsideDomain { x: f64 },

    #[error("chain has no predecessor: it is not in the image of the extension map")]
    NotInImage,

    #[error("orbit left the domain after {step} steps")]
    OrbitEscaped { step: usize },

    #[error("stratum {stratum} is empty")]
    EmptyStratum { stratum: String },

    #[error("lifted chain {index} failed validation: {reason}")]
    InvalidLift { index: usize, reason: String },

    #[error("set Y does not contain {x}, which has no preimage")]
    InvalidCosurjectivitySet { x: f64 },

    #[error("no sign change for {what} on [{lo}, {hi}]")]
    BracketFailure { what: String, lo: f64, hi: f64 },

    #[error("no stable window of period {period} found scanning below {upper} with step {step}")]
    WindowNotFound { period: usize, upper: f64, step: f64 },

    #[error("no continuum graph is defined for regime {0}")]
    UnsupportedRegime(String),

    #[error("lift has gamma(0) = {gamma0} <= 0, so the compression is not a coisometry")]
    NotCoisometry { gamma0: f64 },

    #[error("sampled conjugacy has intertwining residual {residual} above tolerance {tol}")]
    InvalidConjugacy { residual: f64, tol: f64 },

    #[error("model basis exceeded the cap of {cap} chains")]
    ClosureOverflow { cap: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
