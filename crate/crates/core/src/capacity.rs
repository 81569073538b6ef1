//! Dimension caps for the exhaustive computations.
//!
//! Every cap can be lifted by setting `CUBECONC_MAX_N`; the value replaces
//! the default ceiling of each cap. Unset (the default) keeps the built-in
//! limits.

use crate::error::{Error, Result};

pub const ENV_MAX_N: &str = "CUBECONC_MAX_N";

/// Largest dimension a point can carry (bits are packed in a `u64`).
pub const MAX_POINT_DIM: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cap {
    /// Dense 2^n probability tables (2^24 doubles = 128 MiB).
    Dense,
    /// Random dense generation.
    RandomDense,
    /// Enumeration over every y in I_n.
    AllY,
    /// Exact concentration function (2^(2^n) subsets).
    ExactAlpha,
    /// Greedy lower bound on the concentration function.
    GreedyAlpha,
}

impl Cap {
    pub fn default_max(self) -> usize {
        match self {
            Cap::Dense => 24,
            Cap::RandomDense => 12,
            Cap::AllY => 12,
            Cap::ExactAlpha => 4,
            Cap::GreedyAlpha => 12,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Cap::Dense => "dense table",
            Cap::RandomDense => "random dense generation",
            Cap::AllY => "enumeration over all y",
            Cap::ExactAlpha => "exact concentration function",
            Cap::GreedyAlpha => "greedy concentration bound",
        }
    }
}

fn env_override() -> Option<usize> {
    std::env::var(ENV_MAX_N).ok()?.trim().parse().ok()
}

/// Effective ceiling for `cap`, honoring `CUBECONC_MAX_N`.
pub fn max_n(cap: Cap) -> usize {
    env_override()
        .unwrap_or_else(|| cap.default_max())
        .min(MAX_POINT_DIM)
}

pub fn ensure(cap: Cap, n: usize) -> Result<()> {
    let max = max_n(cap);
    if n > max {
        return Err(Error::Capacity {
            what: cap.label(),
            n,
            max,
        });
    }
    Ok(())
}
