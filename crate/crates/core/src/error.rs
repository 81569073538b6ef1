use thiserror::Error;

/// Errors raised by distribution construction and the bound checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} supports n <= {max}, got n = {n} (raise with CUBECONC_MAX_N)")]
    Capacity {
        what: &'static str,
        n: usize,
        max: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range {lo}..={hi}")]
    IndexOutOfRange { index: usize, lo: usize, hi: usize },

    #[error("set is empty")]
    EmptySet,

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("malformed input: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_index(index: usize, lo: usize, hi: usize) -> Result<()> {
    if index < lo || index > hi {
        return Err(Error::IndexOutOfRange { index, lo, hi });
    }
    Ok(())
}

pub(crate) fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "{name} = {p} is not a probability"
        )));
    }
    Ok(())
}

pub(crate) fn check_positive_t(t: f64) -> Result<()> {
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "t = {t}; bounds are stated for finite t > 0"
        )));
    }
    Ok(())
}
