use thiserror::Error;

use crate::state::Level;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{source_name}:{line}: field `{field}`: {message}")]
    Parse {
        source_name: String,
        line: usize,
        field: String,
        message: String,
    },

    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },

    #[error("level {0} not in table")]
    MissingLevel(Level),

    #[error("level {level} has no value for `{field}`")]
    MissingCoefficient { level: Level, field: &'static str },

    #[error("level {level} violates an invariant: {message}")]
    InvalidLevel { level: Level, message: String },

    #[error("level {level} is not supported here: {reason}")]
    UnsupportedLevel { level: Level, reason: &'static str },

    #[error("no state with M_F = {twice_m_f}/2 in the {group} group")]
    NoSuchState { twice_m_f: i32, group: &'static str },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("transition {lower} -> {upper} not in the E2 table")]
    MissingTransition { lower: Level, upper: Level },

    #[error("forbidden transition: {0}")]
    Forbidden(String),

    #[error("coupling vanishes for this component and geometry")]
    ZeroAmplitude,

    #[error("fit did not converge after {iterations} iterations (last cost {cost:e})")]
    NoConvergence { iterations: u64, cost: f64 },

    #[error("degenerate sample design: {0}")]
    DegenerateDesign(String),

    #[error("component set is insufficient or linearly dependent: {0}")]
    DependentComponents(String),

    #[error("ions collided at t = {time:e} s (separation {separation:e} m)")]
    Collision { time: f64, separation: f64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
