//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid element: label `{label}` is not in carrier [{carrier}]")]
    InvalidElement { label: String, carrier: String },

    #[error("carrier mismatch: expected [{expected}], got [{got}]")]
    CarrierMismatch { expected: String, got: String },

    #[error("duplicate label `{0}` in carrier")]
    DuplicateLabel(String),

    #[error("carrier must have at least one element")]
    EmptyCarrier,

    #[error("carrier with {got} elements exceeds the supported maximum of {max}")]
    CarrierTooLarge { got: usize, max: usize },

    #[error("invalid value token `{0}`: expected `p`, `p/q`, or `inf`")]
    InvalidValue(String),

    #[error("zero denominator in rational token `{0}`")]
    ZeroDenominator(String),

    #[error("matrix shape error: {0}")]
    MatrixShape(String),

    #[error("CAL1 violation: lambda({{{point}}}^)({point}) = {value}, expected 0")]
    Cal1Violation { point: String, value: String },

    #[error("filter base must be a nonempty list of sets")]
    EmptyBase,

    #[error("degenerate filter rejected: {0}")]
    DegenerateFilter(&'static str),

    #[error("map is not total: no image assigned to `{0}`")]
    NotTotal(String),

    #[error("map assigns more than one image to `{0}`")]
    NotSingleValued(String),

    #[error("map is not surjective: `{0}` has an empty fiber")]
    NotSurjective(String),

    #[error("selection must assign one filter (on the same carrier) to every point")]
    BadSelection,

    #[error("raw lambda table is incomplete: missing entry for {0}")]
    IncompleteTable(String),

    #[error("parse error at line {line}, column {col}: {message}")]
    Parse {
        line: usize,
        col: usize,
        message: String,
    },

    #[error(
        "budget exceeded: estimated {estimate} instances over ceiling {budget} \
         (raise {env} or shrink the request)"
    )]
    BudgetExceeded {
        estimate: String,
        budget: u64,
        env: &'static str,
    },

    #[error("unknown theorem id `{0}`")]
    UnknownTheorem(String),

    #[error("unknown weakening id `{0}`")]
    UnknownWeakening(String),

    #[error("unknown mutation id `{0}`")]
    UnknownMutation(String),

    #[error("unknown filter class `{0}`")]
    UnknownClass(String),

    #[error("invalid instance spec: {0}")]
    InvalidSpec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
