use std::fmt;

/// One violated range constraint found by [`crate::params::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: String,
    pub value: f64,
    pub allowed: &'static str,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}` = {} outside allowed range {}", self.field, self.value, self.allowed)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters: {}", join(.0))]
    Validation(Vec<Violation>),

    #[error("degenerate range in `{group}`: min = {min}, max = {max}")]
    DegenerateRange { group: String, min: f64, max: f64 },

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("unknown field `{0}`")]
    UnknownField(String),

    #[error("field `{0}` referenced more than once")]
    DuplicateField(String),

    #[error("feedback payoff requested but feedback is disabled")]
    FeedbackDisabled,

    #[error("invalid integrator configuration: {0}")]
    Integrator(String),

    #[error("invalid job: {0}")]
    Spec(String),

    #[error("config error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Config { line: Option<usize>, message: String },

    #[error("non-finite state at step {step}: x = {x}, y = {y}")]
    NonFiniteState { step: usize, x: f64, y: f64 },

    #[error("anchor at t = {t} lies outside the integration horizon {horizon}")]
    AnchorOutsideHorizon { t: f64, horizon: f64 },

    #[error("requested time {t} is beyond the reachable horizon {horizon}")]
    BeyondHorizon { t: f64, horizon: f64 },

    #[error("no parameter set within bounds produced a finite loss")]
    NoFiniteLoss,

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Errors caused by bad user input (config or parameters) rather than by
    /// a failure while running.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Validation(_)
                | Error::DegenerateRange { .. }
                | Error::UnknownField(_)
                | Error::DuplicateField(_)
                | Error::Integrator(_)
                | Error::Spec(_)
                | Error::Config { .. }
                | Error::AnchorOutsideHorizon { .. }
        )
    }
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
