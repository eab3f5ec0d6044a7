use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("precondition violated in {op}: {detail}")]
    Precondition { op: &'static str, detail: String },

    #[error("overflow in {op}: log-magnitude {log_value} exceeds the f64 range{}", radius_note(*.radius))]
    Overflow {
        op: &'static str,
        log_value: f64,
        radius: Option<f64>,
    },

    #[error("non-finite value in {op}{}", radius_note(*.radius))]
    NonFinite { op: &'static str, radius: Option<f64> },

    #[error("degenerate input in {op}: {detail}")]
    Degenerate { op: &'static str, detail: String },

    #[error("invalid configuration: {0}")]
    Config(String),
}

fn radius_note(radius: Option<f64>) -> String {
    match radius {
        Some(r) => format!(" at r = {r:e}"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn precondition(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Precondition {
            op,
            detail: detail.into(),
        }
    }

    /// Attach a radius to overflow / non-finite errors raised inside an integrand.
    pub(crate) fn at_radius(self, r: f64) -> Self {
        match self {
            Error::Overflow { op, log_value, .. } => Error::Overflow {
                op,
                log_value,
                radius: Some(r),
            },
            Error::NonFinite { op, .. } => Error::NonFinite { op, radius: Some(r) },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
