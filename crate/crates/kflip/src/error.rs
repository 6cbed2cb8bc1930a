//! Crate-wide error type.

use std::fmt;

/// Errors produced by the analytical and simulation routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A precondition on the inputs was violated (message names the offender).
    InvalidInput(String),
    /// `beta * J` is at or below the critical value of the noise kind, so the
    /// spinodal field `H*` (and everything built on it) is undefined.
    SubcriticalTemperature { beta_j: f64, critical: f64 },
    /// The three-root (metastable / unstable / stable) structure is absent.
    NoMetastableState,
    /// The integrand denominator of the stationary-measure integral dropped
    /// below the safe threshold somewhere on the grid.
    QuadratureFailure { phi: f64, denominator: f64 },
    /// A log-space term left the representable range while assembling a
    /// transition probability.
    OverflowGuard { log_term: f64 },
    /// Brute-force transition enumeration is restricted to small systems.
    InstanceTooLarge { n_agents: usize, max: usize },
    /// A dense linear solve failed (zero pivot or non-convergent fallback).
    SingularSystem,
    /// The stationary solve produced an entry that is negative beyond dust
    /// tolerance, or an exact zero (underflow).
    NonPositiveStationary { state: usize, value: f64 },
    /// The fundamental-matrix residual check failed.
    IllConditioned { residual: f64 },
    /// A hitting-time variance came out negative beyond dust tolerance.
    NegativeVariance {
        from: usize,
        to: usize,
        variance: f64,
    },
    /// The step-length standard deviation vanishes, so its k-derivative is
    /// undefined.
    DegenerateSigma,
    /// Every Monte Carlo sample hit the step cap.
    AllCensored { max_steps: u64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::SubcriticalTemperature { beta_j, critical } => write!(
                f,
                "beta*J = {beta_j} is not above the critical value {critical}; no hysteresis"
            ),
            Error::NoMetastableState => {
                write!(f, "no metastable state: the three-root structure is absent")
            }
            Error::QuadratureFailure { phi, denominator } => write!(
                f,
                "quadrature failure: integrand denominator {denominator:e} at phi = {phi}"
            ),
            Error::OverflowGuard { log_term } => {
                write!(f, "log-space term {log_term} out of representable range")
            }
            Error::InstanceTooLarge { n_agents, max } => write!(
                f,
                "brute-force enumeration supports at most N = {max} agents, got {n_agents}"
            ),
            Error::SingularSystem => write!(f, "singular linear system"),
            Error::NonPositiveStationary { state, value } => write!(
                f,
                "stationary distribution entry {value:e} at state {state} is not positive"
            ),
            Error::IllConditioned { residual } => write!(
                f,
                "fundamental matrix residual {residual:e} exceeds tolerance"
            ),
            Error::NegativeVariance { from, to, variance } => write!(
                f,
                "hitting-time variance {variance:e} for {from} -> {to} is negative"
            ),
            Error::DegenerateSigma => {
                write!(
                    f,
                    "step-length sigma is zero; its k-derivative is undefined"
                )
            }
            Error::AllCensored { max_steps } => {
                write!(f, "all samples censored at {max_steps} steps")
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
