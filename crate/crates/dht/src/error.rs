//! Error type shared by all modules.

/// Crate-wide error enumeration.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter violates a basic invariant (positivity, finiteness).
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A family or transform constraint is violated; the message names it.
    #[error("constraint violated: {0}")]
    Constraint(String),

    /// A denominator fell below the singularity floor.
    #[error("singular denominator: |{what}| = {value:.3e} is below the floor {floor:.1e}")]
    SingularDenominator {
        what: &'static str,
        value: f64,
        floor: f64,
    },

    /// Evaluation requested outside a solution's validity domain.
    #[error("point (t, x) = ({t}, {x}) violates the domain predicate: {predicate}")]
    OutOfDomain { t: f64, x: f64, predicate: String },

    /// A non-finite number where a finite one is required.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// Adaptive integration could not proceed.
    #[error("integration failure at w = {at}: {reason}")]
    IntegrationFailure { at: f64, reason: String },

    /// A closed-form branch was evaluated at (or too near) one of its poles.
    #[error("closed-form branch has a pole near t = {t}")]
    Pole { t: f64 },

    /// The PDE solver hit an invalid state and stopped.
    #[error("solver failure at t = {t}, x = {x}: {reason}")]
    SolverFailure { t: f64, x: f64, reason: String },

    /// Invalid user-facing configuration (CLI flags, grid strings).
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors that signal a bad configuration rather than a
    /// verification failure; the CLI maps these to exit code 2.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. } | Error::Constraint(_) | Error::Config(_)
        )
    }
}
