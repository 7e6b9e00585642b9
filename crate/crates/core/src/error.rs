use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid value for `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("no serving cell: anchor list is empty")]
    NoServingCell,

    #[error("user location coincides with a base station (singular path loss)")]
    SingularPathLoss,

    #[error("path-loss exponent {alpha} must lie in (2, 4]")]
    SeriesDiverges { alpha: f64 },

    #[error("negative band: {which} total {total} Hz is below the in-use {used} Hz")]
    NegativeBand {
        which: &'static str,
        total: f64,
        used: f64,
    },

    #[error("empty sweep: no values to evaluate")]
    EmptySweep,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check(cond: bool, field: &'static str, reason: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            field,
            reason: reason(),
        })
    }
}
