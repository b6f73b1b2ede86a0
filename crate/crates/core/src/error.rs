use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what} = {value} lies outside the domain [{lo}, {hi}]")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("conditional mean {side} {x} is undefined: the conditioning event has zero mass")]
    UndefinedConditional { side: &'static str, x: f64 },

    #[error("cutoff {x} must lie strictly inside ({lo}, {hi})")]
    DegenerateCutoff { x: f64, lo: f64, hi: f64 },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid environment: {0}")]
    InvalidEnvironment(String),

    #[error(
        "the agent never searches: theta_lo = {theta_lo} >= delta * E[theta] = {threshold}; \
         information has no value and no contracting equilibrium is constructed"
    )]
    NeverSearches { theta_lo: f64, threshold: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
    },

    #[error("invalid public-signal model: {0}")]
    InvalidModel(String),

    #[error("fixed point not bracketed: f(lo) = {at_lo}, f(hi) = {at_hi}")]
    Bracketing { at_lo: f64, at_hi: f64 },

    #[error("malformed contract: {0}")]
    MalformedContract(String),

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}
